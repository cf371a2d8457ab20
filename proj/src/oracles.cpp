#include "neurogame/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "neurogame/errors.hpp"

namespace neurogame {

namespace {

void require_limit(int n, int limit, const char* what) {
  if (n > limit) {
    throw LimitError(std::string(what) + " enumeration is limited to n <= " +
                     std::to_string(limit) + " tokens, got n = " + std::to_string(n));
  }
}

void require_token(const Game& game, int i) {
  if (i < 0 || i >= game.token_count()) {
    throw InputError("token index " + std::to_string(i) + " out of range for n = " +
                     std::to_string(game.token_count()));
  }
}

std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

// log C(m, s)
double log_binomial(int m, int s) {
  return std::lgamma(m + 1.0) - std::lgamma(s + 1.0) - std::lgamma(m - s + 1.0);
}

double log_sum_exp(const std::vector<double>& logs) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (double l : logs) max_log = std::max(max_log, l);
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  return max_log + std::log(acc);
}

// Weighted average of delta(C) over subsets C of `universe`, with log weights
// log_weight(C), evaluated with a max shift.
template <class LogWeight, class Delta>
double tilted_average(std::uint64_t universe, LogWeight&& log_weight, Delta&& delta) {
  std::vector<double> logs;
  std::vector<double> deltas;
  for_each_subset(universe, [&](std::uint64_t c) {
    logs.push_back(log_weight(c));
    deltas.push_back(delta(c));
  });
  const double max_log = *std::max_element(logs.begin(), logs.end());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    const double w = std::exp(logs[k] - max_log);
    num += w * deltas[k];
    den += w;
  }
  return num / den;
}

}  // namespace

double exact_shapley(const Game& game, int i) {
  require_token(game, i);
  const int n = game.token_count();
  require_limit(n, OracleLimits::coalitions, "Shapley subset");

  // weight[s] = s! (n-1-s)! / n! = 1 / (n * C(n-1, s))
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    double binom = 1.0;
    for (int k = 1; k <= s; ++k) binom = binom * (n - 1 - s + k) / k;
    weight[static_cast<std::size_t>(s)] = 1.0 / (n * binom);
  }

  const std::uint64_t others = Coalition::full_mask(n) & ~bit(i);
  double acc = 0.0;
  for_each_subset(others, [&](std::uint64_t c) {
    const double delta = game.value(Coalition(n, c | bit(i))) - game.value(Coalition(n, c));
    acc += weight[static_cast<std::size_t>(std::popcount(c))] * delta;
  });
  return acc;
}

double exact_shapley_by_permutations(const Game& game, int i) {
  require_token(game, i);
  const int n = game.token_count();
  require_limit(n, OracleLimits::permutations, "Shapley permutation");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  double acc = 0.0;
  double count = 0.0;
  do {
    std::uint64_t prefix = 0;
    for (int t : order) {
      if (t == i) break;
      prefix |= bit(t);
    }
    acc += game.value(Coalition(n, prefix | bit(i))) - game.value(Coalition(n, prefix));
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  return acc / count;
}

double exact_banzhaf(const Game& game, int i) {
  require_token(game, i);
  const int n = game.token_count();
  require_limit(n, OracleLimits::coalitions, "Banzhaf");

  const std::uint64_t others = Coalition::full_mask(n) & ~bit(i);
  double acc = 0.0;
  for_each_subset(others, [&](std::uint64_t c) {
    acc += game.value(Coalition(n, c | bit(i))) - game.value(Coalition(n, c));
  });
  return acc / std::ldexp(1.0, n - 1);
}

double exact_interaction(const Game& game, int i, int j) {
  require_token(game, i);
  require_token(game, j);
  if (i == j) throw InputError("interaction requires distinct tokens");
  const int n = game.token_count();
  require_limit(n, OracleLimits::coalitions, "interaction");

  const std::uint64_t others = Coalition::full_mask(n) & ~bit(i) & ~bit(j);
  double acc = 0.0;
  for_each_subset(others, [&](std::uint64_t c) {
    acc += pairwise_delta(game, i, j, Coalition(n, c));
  });
  return acc / std::ldexp(1.0, n - 2);
}

double ExactGameValues::efficiency_gap() const {
  double sum = 0.0;
  for (double phi : shapley) sum += phi;
  return sum - grand_value;
}

ExactGameValues exact_game_values(const Game& game) {
  const int n = game.token_count();
  require_limit(n, OracleLimits::coalitions, "exact game value");
  const auto un = static_cast<std::size_t>(n);
  ExactGameValues out;
  out.shapley.resize(un);
  out.banzhaf.resize(un);
  out.interactions = Matrix(un, un);
  for (int i = 0; i < n; ++i) {
    out.shapley[static_cast<std::size_t>(i)] = exact_shapley(game, i);
    out.banzhaf[static_cast<std::size_t>(i)] = exact_banzhaf(game, i);
    for (int j = i + 1; j < n; ++j) {
      const double value = exact_interaction(game, i, j);
      out.interactions(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = value;
      out.interactions(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = value;
    }
  }
  out.grand_value = game.value(Coalition::full(n)) - game.value(Coalition(n));
  return out;
}

double exact_gibbs_tilted_value(const Game& game, GibbsTarget target, TiltedKind kind,
                                int i, int j) {
  require_token(game, i);
  const int n = game.token_count();
  require_limit(n, OracleLimits::tilted, "Gibbs-tilted");
  const double gamma = target.gamma;

  switch (kind) {
    case TiltedKind::shapley_prefix: {
      const std::uint64_t others = Coalition::full_mask(n) & ~bit(i);
      // The sampler picks the size uniformly from n values and then a uniform
      // subset of that size: q(P) = 1 / (n C(n-1, s)). The reported proposal
      // is p(P) = s! (n-1-s)! / (n-1)! = 1 / C(n-1, s).
      return tilted_average(
          others,
          [&](std::uint64_t c) {
            const int s = std::popcount(c);
            const double log_q = -std::log(static_cast<double>(n)) - log_binomial(n - 1, s);
            const double log_p = -log_binomial(n - 1, s);
            return log_q + game.value(Coalition(n, c)) / gamma - log_p;
          },
          [&](std::uint64_t c) {
            return game.value(Coalition(n, c | bit(i))) - game.value(Coalition(n, c));
          });
    }
    case TiltedKind::banzhaf: {
      const std::uint64_t others = Coalition::full_mask(n) & ~bit(i);
      return tilted_average(
          others, [&](std::uint64_t c) { return game.value(Coalition(n, c)) / gamma; },
          [&](std::uint64_t c) {
            return game.value(Coalition(n, c | bit(i))) - game.value(Coalition(n, c));
          });
    }
    case TiltedKind::interaction: {
      require_token(game, j);
      if (i == j) throw InputError("interaction requires distinct tokens");
      const std::uint64_t others = Coalition::full_mask(n) & ~bit(i) & ~bit(j);
      return tilted_average(
          others, [&](std::uint64_t c) { return game.value(Coalition(n, c)) / gamma; },
          [&](std::uint64_t c) { return pairwise_delta(game, i, j, Coalition(n, c)); });
    }
  }
  return 0.0;
}

TiltedGameValues exact_gibbs_tilted_values(const Game& game, GibbsTarget target) {
  const int n = game.token_count();
  require_limit(n, OracleLimits::tilted, "Gibbs-tilted");
  const auto un = static_cast<std::size_t>(n);
  TiltedGameValues out;
  out.shapley_prefix.resize(un);
  out.banzhaf.resize(un);
  out.interactions = Matrix(un, un);
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out.shapley_prefix[ui] = exact_gibbs_tilted_value(game, target, TiltedKind::shapley_prefix, i);
    out.banzhaf[ui] = exact_gibbs_tilted_value(game, target, TiltedKind::banzhaf, i);
    for (int j = i + 1; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double value = exact_gibbs_tilted_value(game, target, TiltedKind::interaction, i, j);
      out.interactions(ui, uj) = value;
      out.interactions(uj, ui) = value;
    }
  }
  return out;
}

namespace {

void require_ising_inputs(std::span<const double> fields, const Matrix& couplings) {
  if (fields.empty()) throw InputError("Ising system needs at least one spin");
  if (!all_finite(fields)) throw InputError("fields contain non-finite entries");
  require_coupling_matrix(couplings, fields.size());
}

// Energy of the configuration encoded by `mask` (bit set = spin +1).
double energy_of_mask(std::span<const double> fields, const Matrix& couplings,
                      std::uint64_t mask) {
  const std::size_t n = fields.size();
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double si = (mask >> i) & 1u ? 1.0 : -1.0;
    h -= fields[i] * si;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sj = (mask >> j) & 1u ? 1.0 : -1.0;
      h -= couplings(i, j) * si * sj;
    }
  }
  return h;
}

}  // namespace

double hamiltonian(std::span<const double> fields, const Matrix& couplings,
                   std::span<const int> spins) {
  require_ising_inputs(fields, couplings);
  if (spins.size() != fields.size()) {
    throw InputError("spin configuration has " + std::to_string(spins.size()) +
                     " entries, expected " + std::to_string(fields.size()));
  }
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] == 1) {
      mask |= std::uint64_t{1} << i;
    } else if (spins[i] != -1) {
      throw InputError("spin " + std::to_string(i) + " is " + std::to_string(spins[i]) +
                       ", expected -1 or +1");
    }
  }
  return energy_of_mask(fields, couplings, mask);
}

ExactSpinMarginals exact_spin_marginals(std::span<const double> fields,
                                        const Matrix& couplings, double gamma) {
  require_ising_inputs(fields, couplings);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InputError("spin temperature gamma must be positive and finite");
  }
  const int n = static_cast<int>(fields.size());
  require_limit(n, OracleLimits::spins, "spin configuration");

  const std::size_t configs = std::size_t{1} << n;
  std::vector<double> log_weights(configs);
  for (std::size_t mask = 0; mask < configs; ++mask) {
    log_weights[mask] = -energy_of_mask(fields, couplings, mask) / gamma;
  }
  const double log_z = log_sum_exp(log_weights);

  ExactSpinMarginals out;
  out.log_partition = log_z;
  out.expected_spins.assign(fields.size(), 0.0);
  for (std::size_t mask = 0; mask < configs; ++mask) {
    const double p = std::exp(log_weights[mask] - log_z);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out.expected_spins[i] += (mask >> i) & 1u ? p : -p;
    }
    out.expected_active_count += p * std::popcount(mask);
  }
  out.alphas.resize(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out.alphas[i] = (1.0 + out.expected_spins[i]) / 2.0;
  }
  return out;
}

}  // namespace neurogame
