#include "neurogame/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "neurogame/errors.hpp"
#include "neurogame/parallel.hpp"

namespace neurogame {

std::string to_string(EstimatorMode mode) {
  return mode == EstimatorMode::gibbs ? "gibbs" : "classic";
}

EstimatorMode parse_estimator_mode(const std::string& name) {
  if (name == "gibbs") return EstimatorMode::gibbs;
  if (name == "classic") return EstimatorMode::classic;
  throw InputError("unknown estimator mode '" + name + "' (expected gibbs|classic)");
}

void EstimatorConfig::validate() const {
  if (sample_count < 1) throw InputError("sample count K must be at least 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InputError("coalition temperature gamma must be positive and finite");
  }
}

double prefix_proposal_probability(int n, int prefix_size) {
  if (n < 1 || prefix_size < 0 || prefix_size > n - 1) {
    throw InputError("prefix size " + std::to_string(prefix_size) +
                     " impossible for n = " + std::to_string(n));
  }
  // 1 / C(n-1, s), with the binomial built incrementally so small cases are exact.
  const int m = n - 1;
  const int s = std::min(prefix_size, m - prefix_size);
  double binom = 1.0;
  for (int k = 1; k <= s; ++k) binom = binom * static_cast<double>(m - s + k) / k;
  return 1.0 / binom;
}

ProposalDraw sample_permutation_prefix(CounterStream& stream, int n, int i) {
  if (n < 1 || n > kMaxTokens || i < 0 || i >= n) {
    throw InputError("permutation prefix needs 0 <= i < n <= 64");
  }
  std::array<int, kMaxTokens> others{};
  int count = 0;
  for (int t = 0; t < n; ++t) {
    if (t != i) others[count++] = t;
  }
  const int r = static_cast<int>(stream.below(static_cast<std::uint64_t>(n)));
  // First r positions of a Fisher-Yates shuffle are the first r tokens of a
  // uniformly random ordering.
  Coalition prefix(n);
  for (int t = 0; t < r; ++t) {
    const int pick = t + static_cast<int>(stream.below(static_cast<std::uint64_t>(count - t)));
    std::swap(others[t], others[pick]);
    prefix = prefix.with(others[t]);
  }
  return {prefix, prefix_proposal_probability(n, r)};
}

ProposalDraw sample_bernoulli_coalition(CounterStream& stream, int n, Coalition excluded) {
  if (excluded.token_count() != n) throw InputError("excluded set built for a different n");
  if (excluded.size() < 1 || excluded.size() > 2 || n < excluded.size()) {
    throw InputError("Bernoulli coalitions exclude one or two tokens");
  }
  const Coalition free = excluded.complement();
  const std::uint64_t coins = stream.next();
  std::uint64_t mask = 0;
  int bit = 0;
  free.for_each([&](int t) {
    if ((coins >> bit) & 1u) mask |= std::uint64_t{1} << t;
    ++bit;
  });
  return {Coalition(n, mask), std::ldexp(1.0, -free.size())};
}

namespace {

void check_batch_inputs(std::span<const double> proposal_probs,
                        std::span<const double> marginals) {
  if (marginals.empty()) throw InputError("a weighted batch needs at least one sample");
  if (proposal_probs.size() != marginals.size()) {
    throw InputError("batch inputs have mismatched lengths");
  }
  for (double p : proposal_probs) {
    if (!(p > 0.0 && p <= 1.0)) throw InputError("proposal probabilities must lie in (0, 1]");
  }
  if (!all_finite(marginals)) throw InputError("batch marginals contain NaN or Inf");
}

}  // namespace

WeightedSampleBatch normalize_weights(std::span<const double> values,
                                      std::span<const double> proposal_probs,
                                      std::span<const double> marginals, double gamma) {
  check_batch_inputs(proposal_probs, marginals);
  if (values.size() != marginals.size()) throw InputError("batch inputs have mismatched lengths");
  if (!all_finite(values)) throw InputError("coalition values contain NaN or Inf");
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");

  const std::size_t k = values.size();
  WeightedSampleBatch batch;
  batch.log_raw_weights.resize(k);
  batch.normalized_weights.resize(k);
  batch.marginals.assign(marginals.begin(), marginals.end());
  batch.proposal_probs.assign(proposal_probs.begin(), proposal_probs.end());

  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < k; ++s) {
    batch.log_raw_weights[s] = values[s] / gamma - std::log(proposal_probs[s]);
    max_log = std::max(max_log, batch.log_raw_weights[s]);
  }
  double total = 0.0;
  for (std::size_t s = 0; s < k; ++s) {
    batch.normalized_weights[s] = std::exp(batch.log_raw_weights[s] - max_log);
    total += batch.normalized_weights[s];
  }
  for (double& w : batch.normalized_weights) w /= total;
  return batch;
}

WeightedSampleBatch uniform_weights(std::span<const double> proposal_probs,
                                    std::span<const double> marginals) {
  check_batch_inputs(proposal_probs, marginals);
  const std::size_t k = marginals.size();
  WeightedSampleBatch batch;
  batch.log_raw_weights.assign(k, 0.0);
  batch.normalized_weights.assign(k, 1.0 / static_cast<double>(k));
  batch.marginals.assign(marginals.begin(), marginals.end());
  batch.proposal_probs.assign(proposal_probs.begin(), proposal_probs.end());
  return batch;
}

double WeightedSampleBatch::estimate() const {
  double acc = 0.0;
  for (std::size_t s = 0; s < marginals.size(); ++s) acc += normalized_weights[s] * marginals[s];
  return acc;
}

double WeightedSampleBatch::effective_sample_size() const {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double w : normalized_weights) {
    sum += w;
    sum_sq += w * w;
  }
  return sum * sum / sum_sq;
}

double batch_standard_error(const WeightedSampleBatch& batch, EstimatorMode mode) {
  const std::size_t k = batch.size();
  const double est = batch.estimate();
  if (mode == EstimatorMode::classic) {
    if (k < 2) return 0.0;
    double ss = 0.0;
    for (double d : batch.marginals) ss += (d - est) * (d - est);
    return std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
  }
  double acc = 0.0;
  for (std::size_t s = 0; s < k; ++s) {
    const double w = batch.normalized_weights[s];
    const double dev = batch.marginals[s] - est;
    acc += w * w * dev * dev;
  }
  return std::sqrt(acc);
}

namespace {

struct RawSamples {
  Vector values;  // v(C_k), the coalition the Gibbs weight is taken on
  Vector proposals;
  Vector marginals;
  std::uint64_t evaluations = 0;

  explicit RawSamples(std::size_t k) {
    values.reserve(k);
    proposals.reserve(k);
    marginals.reserve(k);
  }
};

TargetEstimate summarize(const RawSamples& raw, const EstimatorConfig& cfg) {
  const WeightedSampleBatch batch =
      cfg.mode == EstimatorMode::gibbs
          ? normalize_weights(raw.values, raw.proposals, raw.marginals, cfg.gamma)
          : uniform_weights(raw.proposals, raw.marginals);
  TargetEstimate out;
  out.value = batch.estimate();
  out.standard_error = batch_standard_error(batch, cfg.mode);
  out.effective_sample_size = batch.effective_sample_size();
  out.evaluations = raw.evaluations;
  return out;
}

void check_token(const Game& game, int i) {
  if (i < 0 || i >= game.token_count()) {
    throw InputError("token index " + std::to_string(i) + " out of range for n = " +
                     std::to_string(game.token_count()));
  }
}

}  // namespace

TargetEstimate estimate_shapley(const Game& game, int i, const EstimatorConfig& cfg) {
  cfg.validate();
  check_token(game, i);
  const int n = game.token_count();
  CounterStream stream(derive_stream_key(cfg.seed, StreamKind::shapley,
                                         static_cast<std::uint64_t>(i)));
  RawSamples raw(cfg.sample_count);
  for (std::size_t k = 0; k < cfg.sample_count; ++k) {
    const ProposalDraw draw = sample_permutation_prefix(stream, n, i);
    const double without = game.value(draw.coalition);
    const double with = game.value(draw.coalition.with(i));
    raw.evaluations += 2;
    raw.values.push_back(without);
    raw.proposals.push_back(draw.proposal_prob);
    raw.marginals.push_back(with - without);
  }
  return summarize(raw, cfg);
}

TargetEstimate estimate_banzhaf(const Game& game, int i, const EstimatorConfig& cfg) {
  cfg.validate();
  check_token(game, i);
  const int n = game.token_count();
  const Coalition excluded = Coalition(n).with(i);
  CounterStream stream(derive_stream_key(cfg.seed, StreamKind::banzhaf,
                                         static_cast<std::uint64_t>(i)));
  RawSamples raw(cfg.sample_count);
  for (std::size_t k = 0; k < cfg.sample_count; ++k) {
    const ProposalDraw draw = sample_bernoulli_coalition(stream, n, excluded);
    const double without = game.value(draw.coalition);
    const double with = game.value(draw.coalition.with(i));
    raw.evaluations += 2;
    raw.values.push_back(without);
    raw.proposals.push_back(draw.proposal_prob);
    raw.marginals.push_back(with - without);
  }
  return summarize(raw, cfg);
}

TargetEstimate estimate_interaction(const Game& game, int i, int j,
                                    const EstimatorConfig& cfg) {
  cfg.validate();
  check_token(game, i);
  check_token(game, j);
  if (i == j) throw InputError("interaction estimate requires distinct tokens");
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  const int n = game.token_count();
  const Coalition excluded = Coalition(n).with(lo).with(hi);
  CounterStream stream(derive_stream_key(cfg.seed, StreamKind::interaction,
                                         static_cast<std::uint64_t>(lo),
                                         static_cast<std::uint64_t>(hi)));
  RawSamples raw(cfg.sample_count);
  for (std::size_t k = 0; k < cfg.sample_count; ++k) {
    const ProposalDraw draw = sample_bernoulli_coalition(stream, n, excluded);
    const Coalition c = draw.coalition;
    const double v_c = game.value(c);
    const double v_i = game.value(c.with(lo));
    const double v_j = game.value(c.with(hi));
    const double v_ij = game.value(c.with(lo).with(hi));
    raw.evaluations += 4;
    raw.values.push_back(v_c);
    raw.proposals.push_back(draw.proposal_prob);
    raw.marginals.push_back(v_ij - v_i - v_j + v_c);
  }
  return summarize(raw, cfg);
}

EstimatedGameValues estimate_all(const Game& game, const EstimatorConfig& cfg) {
  cfg.validate();
  const int n = game.token_count();
  const auto un = static_cast<std::size_t>(n);

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(un * (un - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }

  // Task layout: [0, n) Shapley, [n, 2n) Banzhaf, then the pairs.
  std::vector<TargetEstimate> results(2 * un + pairs.size());
  parallel_for(results.size(), cfg.threads, [&](std::size_t task) {
    if (task < un) {
      results[task] = estimate_shapley(game, static_cast<int>(task), cfg);
    } else if (task < 2 * un) {
      results[task] = estimate_banzhaf(game, static_cast<int>(task - un), cfg);
    } else {
      const auto [i, j] = pairs[task - 2 * un];
      results[task] = estimate_interaction(game, i, j, cfg);
    }
  });

  EstimatedGameValues out;
  out.shapley_hat.resize(un);
  out.banzhaf_hat.resize(un);
  out.shapley_se.resize(un);
  out.banzhaf_se.resize(un);
  out.shapley_ess.resize(un);
  out.banzhaf_ess.resize(un);
  out.interactions_hat = Matrix(un, un);
  out.interactions_se = Matrix(un, un);
  out.interactions_ess = Matrix(un, un);
  for (std::size_t i = 0; i < un; ++i) {
    out.shapley_hat[i] = results[i].value;
    out.shapley_se[i] = results[i].standard_error;
    out.shapley_ess[i] = results[i].effective_sample_size;
    out.banzhaf_hat[i] = results[un + i].value;
    out.banzhaf_se[i] = results[un + i].standard_error;
    out.banzhaf_ess[i] = results[un + i].effective_sample_size;
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const TargetEstimate& r = results[2 * un + p];
    out.interactions_hat(i, j) = out.interactions_hat(j, i) = r.value;
    out.interactions_se(i, j) = out.interactions_se(j, i) = r.standard_error;
    out.interactions_ess(i, j) = out.interactions_ess(j, i) = r.effective_sample_size;
  }
  for (const TargetEstimate& r : results) out.evaluations += r.evaluations;
  return out;
}

std::uint64_t expected_evaluation_count(int n, std::size_t sample_count) {
  const auto un = static_cast<std::uint64_t>(n);
  return 2 * static_cast<std::uint64_t>(sample_count) * un * (un + 1);
}

}  // namespace neurogame
