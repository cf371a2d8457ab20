#include "neurogame/game.hpp"

#include <algorithm>
#include <cmath>

#include "neurogame/errors.hpp"

namespace neurogame {

std::string to_string(Nonlinearity f) {
  switch (f) {
    case Nonlinearity::relu: return "relu";
    case Nonlinearity::tanh: return "tanh";
    case Nonlinearity::identity: return "identity";
  }
  return "relu";
}

Nonlinearity parse_nonlinearity(const std::string& name) {
  if (name == "relu") return Nonlinearity::relu;
  if (name == "tanh") return Nonlinearity::tanh;
  if (name == "identity") return Nonlinearity::identity;
  throw InputError("unknown nonlinearity '" + name + "' (expected relu|tanh|identity)");
}

void Game::check(Coalition c) const {
  if (c.token_count() != token_count()) {
    throw InputError("coalition over " + std::to_string(c.token_count()) +
                     " tokens used with a game over " + std::to_string(token_count()));
  }
}

TabularGame::TabularGame(int n, std::vector<double> values, std::optional<double> bound)
    : n_(n), values_(std::move(values)) {
  if (n < 0 || n > kMaxTokens) {
    throw InputError("tabular games support at most " + std::to_string(kMaxTokens) +
                     " tokens, got " + std::to_string(n));
  }
  const std::size_t expected = std::size_t{1} << n;
  if (values_.size() != expected) {
    throw InputError("characteristic table has " + std::to_string(values_.size()) +
                     " entries, expected 2^" + std::to_string(n) + " = " +
                     std::to_string(expected));
  }
  if (!all_finite(values_)) throw InputError("characteristic table has non-finite entries");
  if (values_[0] != 0.0) {
    throw InputError("characteristic table violates normalization: v(empty) = " +
                     std::to_string(values_[0]));
  }
  double max_abs = 0.0;
  for (double v : values_) max_abs = std::max(max_abs, std::abs(v));
  if (bound) {
    if (!(*bound > 0.0)) throw InputError("value bound must be positive");
    if (max_abs > *bound) {
      throw InputError("characteristic table exceeds declared bound " +
                       std::to_string(*bound));
    }
    bound_ = *bound;
  } else {
    bound_ = max_abs;
  }
}

TabularGame TabularGame::from_function(int n, const std::function<double(Coalition)>& v) {
  if (n < 0 || n > kMaxTokens) {
    throw InputError("tabular games support at most " + std::to_string(kMaxTokens) +
                     " tokens, got " + std::to_string(n));
  }
  std::vector<double> values(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < values.size(); ++mask) {
    values[mask] = v(Coalition(n, mask));
  }
  return TabularGame(n, std::move(values));
}

std::vector<TabularGame::MonotonicityViolation> TabularGame::monotonicity_violations() const {
  std::vector<MonotonicityViolation> out;
  for (std::uint64_t mask = 0; mask < values_.size(); ++mask) {
    for (int i = 0; i < n_; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) continue;
      if (values_[mask] > values_[mask | bit]) out.push_back({mask, mask | bit});
    }
  }
  return out;
}

EmbeddingGame::EmbeddingGame(Matrix embeddings, Matrix value_projection,
                             Nonlinearity nonlinearity)
    : embeddings_(std::move(embeddings)),
      value_projection_(std::move(value_projection)),
      nonlinearity_(nonlinearity) {
  const std::size_t n = embeddings_.rows();
  if (n == 0 || n > static_cast<std::size_t>(kMaxTokens)) {
    throw InputError("embedding game needs 1.." + std::to_string(kMaxTokens) +
                     " tokens, got " + std::to_string(n));
  }
  if (embeddings_.cols() == 0) throw InputError("embedding dimension must be positive");
  if (value_projection_.cols() != embeddings_.cols() || value_projection_.rows() == 0) {
    throw InputError("value projection must have " + std::to_string(embeddings_.cols()) +
                     " columns to match the embedding dimension");
  }
  if (!embeddings_.all_finite() || !value_projection_.all_finite()) {
    throw InputError("embedding game inputs contain non-finite entries");
  }
  projected_ = Matrix(n, value_projection_.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const Vector v = dense_matvec(value_projection_, embeddings_.row(i));
    std::copy(v.begin(), v.end(), projected_.row(i).begin());
  }
}

double EmbeddingGame::evaluate(std::uint64_t mask) const {
  thread_local std::vector<double> scratch;
  const std::size_t dv = projected_.cols();
  scratch.assign(dv, 0.0);
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    const auto row = projected_.row(static_cast<std::size_t>(std::countr_zero(m)));
    for (std::size_t k = 0; k < dv; ++k) scratch[k] += row[k];
  }
  const double norm = l2_norm(scratch);
  switch (nonlinearity_) {
    case Nonlinearity::relu: return std::max(norm, 0.0);
    case Nonlinearity::tanh: return std::tanh(norm);
    case Nonlinearity::identity: return norm;
  }
  return norm;
}

GibbsTarget::GibbsTarget(double g) : gamma(g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw InputError("Gibbs temperature must be positive and finite");
  }
}

double characteristic_value(const Game& game, Coalition c) { return game.value(c); }

double coalition_energy(const Game& game, Coalition c) { return -game.value(c); }

double log_gibbs_weight(const Game& game, Coalition c, GibbsTarget target) {
  return game.value(c) / target.gamma;
}

double gibbs_unnormalized_weight(const Game& game, Coalition c, GibbsTarget target) {
  const double w = std::exp(log_gibbs_weight(game, c, target));
  if (!std::isfinite(w)) {
    throw NumericalError("Gibbs weight overflows; use log_gibbs_weight");
  }
  return w;
}

double marginal_contribution(const Game& game, int i, Coalition c) {
  if (c.contains(i)) {
    throw InputError("marginal contribution requires token " + std::to_string(i) +
                     " to be outside the coalition");
  }
  return game.value(c.with(i)) - game.value(c);
}

double pairwise_delta(const Game& game, int i, int j, Coalition c) {
  if (i == j) throw InputError("pairwise delta requires distinct tokens");
  if (c.contains(i) || c.contains(j)) {
    throw InputError("pairwise delta requires both tokens outside the coalition");
  }
  // Fixed evaluation order keeps the result exactly symmetric in (i, j).
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  return game.value(c.with(lo).with(hi)) - game.value(c.with(lo)) - game.value(c.with(hi)) +
         game.value(c);
}

}  // namespace neurogame
