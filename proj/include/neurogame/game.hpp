#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "neurogame/coalition.hpp"
#include "neurogame/linalg.hpp"

namespace neurogame {

enum class Nonlinearity { relu, tanh, identity };

std::string to_string(Nonlinearity f);
Nonlinearity parse_nonlinearity(const std::string& name);

// A cooperative game over n tokens: a characteristic function v(C) with
// v(empty) == 0. Implementations are immutable and safe to evaluate from
// multiple threads.
class Game {
 public:
  virtual ~Game() = default;

  virtual int token_count() const = 0;

  // v(C). Throws InputError when c was built for a different token count.
  double value(Coalition c) const {
    check(c);
    return evaluate(c.mask());
  }

 protected:
  virtual double evaluate(std::uint64_t mask) const = 0;

 private:
  void check(Coalition c) const;
};

// Explicit table of 2^n values indexed by coalition mask (bit i = token i).
class TabularGame final : public Game {
 public:
  static constexpr int kMaxTokens = 20;

  // Validates v(empty) == 0, finiteness, and |v(C)| <= bound. When no bound
  // is given the tightest one (max |v|) is recorded.
  TabularGame(int n, std::vector<double> values, std::optional<double> bound = {});

  static TabularGame from_function(int n, const std::function<double(Coalition)>& v);

  int token_count() const override { return n_; }
  const std::vector<double>& values() const { return values_; }
  double bound() const { return bound_; }

  struct MonotonicityViolation {
    std::uint64_t subset;
    std::uint64_t superset;
  };
  // Pairs (C, C + {i}) with v(C) > v(C + {i}). Monotonicity is advisory; an
  // empty result means the game is monotone.
  std::vector<MonotonicityViolation> monotonicity_violations() const;

 protected:
  double evaluate(std::uint64_t mask) const override { return values_[mask]; }

 private:
  int n_;
  std::vector<double> values_;
  double bound_ = 0.0;
};

// v(C) = f(|| sum_{i in C} W_v x_i ||_2) over position-aware embeddings x_i.
// The projected rows W_v x_i are computed once at construction.
class EmbeddingGame final : public Game {
 public:
  // embeddings: n x d (one token per row); value_projection: d_v x d.
  EmbeddingGame(Matrix embeddings, Matrix value_projection,
                Nonlinearity nonlinearity = Nonlinearity::relu);

  int token_count() const override { return static_cast<int>(embeddings_.rows()); }
  const Matrix& embeddings() const { return embeddings_; }
  const Matrix& value_projection() const { return value_projection_; }
  // n x d_v; row i is W_v x_i.
  const Matrix& projected_values() const { return projected_; }
  Nonlinearity nonlinearity() const { return nonlinearity_; }

 protected:
  double evaluate(std::uint64_t mask) const override;

 private:
  Matrix embeddings_;
  Matrix value_projection_;
  Matrix projected_;
  Nonlinearity nonlinearity_;
};

// Temperature of the Gibbs target over coalitions, D(C) ~ exp(v(C) / gamma).
struct GibbsTarget {
  explicit GibbsTarget(double g);
  double gamma;
};

double characteristic_value(const Game& game, Coalition c);

// E(C) = -v(C).
double coalition_energy(const Game& game, Coalition c);

// log of the unnormalized Gibbs weight, v(C) / gamma.
double log_gibbs_weight(const Game& game, Coalition c, GibbsTarget target);

// exp(v(C) / gamma). Throws NumericalError if the weight is not representable;
// callers that need large exponents should work with log_gibbs_weight.
double gibbs_unnormalized_weight(const Game& game, Coalition c, GibbsTarget target);

// v(C + {i}) - v(C); requires i not in C.
double marginal_contribution(const Game& game, int i, Coalition c);

// v(C + {i, j}) - v(C + {i}) - v(C + {j}) + v(C); requires i != j, both
// outside C.
double pairwise_delta(const Game& game, int i, int j, Coalition c);

}  // namespace neurogame
