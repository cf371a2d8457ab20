#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "neurogame/coalition.hpp"
#include "neurogame/game.hpp"
#include "neurogame/linalg.hpp"
#include "neurogame/rng.hpp"

namespace neurogame {

// gibbs: self-normalized importance weights exp(v(C)/gamma)/p(C) over
// uniform proposals. Converges to the Gibbs-tilted expectation of the
// marginal contribution (see exact_gibbs_tilted_value).
// classic: plain averaging over the same proposals; unbiased for the
// Shapley value, Banzhaf index and uniform interaction potential.
enum class EstimatorMode { gibbs, classic };

std::string to_string(EstimatorMode mode);
EstimatorMode parse_estimator_mode(const std::string& name);

struct EstimatorConfig {
  std::size_t sample_count = 25;
  std::uint64_t seed = 0;
  double gamma = 0.25;
  EstimatorMode mode = EstimatorMode::gibbs;
  // Worker hint for estimate_all; results do not depend on it.
  int threads = 1;

  void validate() const;
};

struct ProposalDraw {
  Coalition coalition;
  double proposal_prob;
};

// s! (n-1-s)! / (n-1)! for a prefix of size s among n tokens.
double prefix_proposal_probability(int n, int prefix_size);

// Tokens preceding i in a random ordering of the other n-1 tokens, cut at a
// uniform length r in {0, ..., n-1}. The reported proposal probability is
// prefix_proposal_probability(n, r).
ProposalDraw sample_permutation_prefix(CounterStream& stream, int n, int i);

// Each token outside `excluded` joins independently with probability 1/2;
// proposal probability 2^-(n - |excluded|).
ProposalDraw sample_bernoulli_coalition(CounterStream& stream, int n, Coalition excluded);

struct WeightedSampleBatch {
  Vector log_raw_weights;     // v(C_k)/gamma - log p(C_k); zeros in classic mode
  Vector normalized_weights;  // sums to 1
  Vector marginals;           // Delta samples
  Vector proposal_probs;

  std::size_t size() const { return marginals.size(); }
  double estimate() const;
  // (sum w)^2 / sum w^2 on the normalized weights.
  double effective_sample_size() const;
};

// Self-normalized Gibbs weights, computed with a max-shift in log space.
// values[k] is v(C_k); the batch carries `marginals` through unchanged.
WeightedSampleBatch normalize_weights(std::span<const double> values,
                                      std::span<const double> proposal_probs,
                                      std::span<const double> marginals, double gamma);

// Equal weights 1/K (classic mode).
WeightedSampleBatch uniform_weights(std::span<const double> proposal_probs,
                                    std::span<const double> marginals);

// Estimate from one target's batch plus its sampling diagnostics.
struct TargetEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  double effective_sample_size = 0.0;
  std::uint64_t evaluations = 0;  // characteristic-function calls made
};

// Standard error for a batch: the sample standard deviation over sqrt(K) for
// equal weights, the delta-method sqrt(sum w_k^2 (Delta_k - est)^2) otherwise.
double batch_standard_error(const WeightedSampleBatch& batch, EstimatorMode mode);

TargetEstimate estimate_shapley(const Game& game, int i, const EstimatorConfig& cfg);
TargetEstimate estimate_banzhaf(const Game& game, int i, const EstimatorConfig& cfg);
TargetEstimate estimate_interaction(const Game& game, int i, int j,
                                    const EstimatorConfig& cfg);

struct EstimatedGameValues {
  Vector shapley_hat;
  Vector banzhaf_hat;
  Matrix interactions_hat;  // symmetric, zero diagonal
  Vector shapley_se;
  Vector banzhaf_se;
  Matrix interactions_se;
  Vector shapley_ess;
  Vector banzhaf_ess;
  Matrix interactions_ess;
  std::uint64_t evaluations = 0;
};

// All n Shapley, n Banzhaf and n(n-1)/2 interaction estimates. Every target
// draws from its own stream keyed by (seed, kind, index), so the output is a
// pure function of (game, cfg) for any thread count.
EstimatedGameValues estimate_all(const Game& game, const EstimatorConfig& cfg);

// Characteristic evaluations made by estimate_all: 2 per Shapley sample,
// 2 per Banzhaf sample and 4 per interaction sample, i.e. 2 K n (n + 1).
std::uint64_t expected_evaluation_count(int n, std::size_t sample_count);

}  // namespace neurogame
