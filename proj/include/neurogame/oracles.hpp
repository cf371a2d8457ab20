#pragma once

#include <span>

#include "neurogame/game.hpp"
#include "neurogame/linalg.hpp"

namespace neurogame {

// Enumeration limits. Each keeps a single oracle call within seconds.
struct OracleLimits {
  static constexpr int permutations = 12;  // n! orderings
  static constexpr int coalitions = 20;    // 2^(n-1) coalitions
  static constexpr int tilted = 16;        // Gibbs-tilted sums
  static constexpr int spins = 16;         // 2^n spin configurations
};

// Shapley value by the subset closed form
//   sum_{C subset T\{i}} |C|! (n-1-|C|)! / n! * Delta_i(C).
double exact_shapley(const Game& game, int i);

// Shapley value by averaging over all n! orderings.
double exact_shapley_by_permutations(const Game& game, int i);

// Mean marginal contribution over all 2^(n-1) coalitions excluding i.
double exact_banzhaf(const Game& game, int i);

// Uniform average of the pairwise second difference over all 2^(n-2)
// coalitions excluding i and j.
double exact_interaction(const Game& game, int i, int j);

struct ExactGameValues {
  Vector shapley;
  Vector banzhaf;
  Matrix interactions;  // symmetric, zero diagonal
  double grand_value = 0.0;  // v(T) - v(empty)

  // sum(shapley) - (v(T) - v(empty)); zero up to rounding.
  double efficiency_gap() const;
};

ExactGameValues exact_game_values(const Game& game);

// The limits that the gibbs-mode estimators converge to:
//   shapley_prefix  -- prefix sets of the permutation sampler, weighted by
//                      q(P) exp(v(P)/gamma) / p(P) with q the sampler's true
//                      density and p the reported proposal probability;
//   banzhaf         -- coalitions C of T\{i} weighted by exp(v(C)/gamma);
//   interaction     -- coalitions C of T\{i,j} weighted by exp(v(C)/gamma).
enum class TiltedKind { shapley_prefix, banzhaf, interaction };

double exact_gibbs_tilted_value(const Game& game, GibbsTarget target, TiltedKind kind,
                                int i, int j = -1);

struct TiltedGameValues {
  Vector shapley_prefix;
  Vector banzhaf;
  Matrix interactions;
};

TiltedGameValues exact_gibbs_tilted_values(const Game& game, GibbsTarget target);

// H(S) = -sum_i J_i s_i - sum_{i<j} J_ij s_i s_j with s_i in {-1, +1}.
double hamiltonian(std::span<const double> fields, const Matrix& couplings,
                   std::span<const int> spins);

struct ExactSpinMarginals {
  Vector expected_spins;
  Vector alphas;  // (1 + <s_i>) / 2
  double log_partition = 0.0;  // log sum_S exp(-H(S)/gamma)
  double expected_active_count = 0.0;  // sum_S P(S) * #{i : s_i = +1}
};

// Exact Gibbs marginals under P(S) ~ exp(-H(S)/gamma) by full enumeration.
ExactSpinMarginals exact_spin_marginals(std::span<const double> fields,
                                        const Matrix& couplings, double gamma);

}  // namespace neurogame
