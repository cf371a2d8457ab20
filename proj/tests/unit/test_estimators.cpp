#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "../support/reference.hpp"
#include "neurogame/errors.hpp"
#include "neurogame/estimators.hpp"
#include "neurogame/harness.hpp"
#include "neurogame/oracles.hpp"

using namespace neurogame;

namespace {
const TabularGame kExample = demo_game();

TabularGame additive(const Vector& w) {
  return TabularGame::from_function(static_cast<int>(w.size()), [&](Coalition c) {
    double s = 0.0;
    c.for_each([&](int i) { s += w[static_cast<std::size_t>(i)]; });
    return s;
  });
}

EstimatorConfig classic(std::size_t k, std::uint64_t seed) {
  EstimatorConfig cfg;
  cfg.sample_count = k;
  cfg.seed = seed;
  cfg.mode = EstimatorMode::classic;
  return cfg;
}
}  // namespace

TEST(Proposals, PrefixProbabilityFormula) {
  EXPECT_EQ(prefix_proposal_probability(3, 1), 0.5);
  EXPECT_EQ(prefix_proposal_probability(3, 0), 1.0);
  EXPECT_EQ(prefix_proposal_probability(1, 0), 1.0);
  EXPECT_NEAR(prefix_proposal_probability(8, 3), 6.0 * 24.0 / 5040.0, 1e-15);
  EXPECT_THROW(prefix_proposal_probability(3, 3), InputError);
}

TEST(Proposals, PrefixSamplerExcludesTargetAndReportsFormula) {
  CounterStream s(derive_stream_key(1, StreamKind::shapley, 0));
  const ProposalDraw single = sample_permutation_prefix(s, 1, 0);
  EXPECT_TRUE(single.coalition.empty());
  EXPECT_EQ(single.proposal_prob, 1.0);
  std::map<std::uint64_t, int> counts;
  const int draws = 60000;
  for (int k = 0; k < draws; ++k) {
    const ProposalDraw d = sample_permutation_prefix(s, 3, 1);
    EXPECT_FALSE(d.coalition.contains(1));
    EXPECT_EQ(d.proposal_prob, prefix_proposal_probability(3, d.coalition.size()));
    ++counts[d.coalition.mask()];
  }
  // True sampler density over T\{t2}: size-0 and size-2 prefixes 1/3 each,
  // each singleton 1/6.
  EXPECT_NEAR(counts[0b000] / double(draws), 1.0 / 3, 0.01);
  EXPECT_NEAR(counts[0b101] / double(draws), 1.0 / 3, 0.01);
  EXPECT_NEAR(counts[0b001] / double(draws), 1.0 / 6, 0.01);
  EXPECT_NEAR(counts[0b100] / double(draws), 1.0 / 6, 0.01);
}

TEST(Proposals, BernoulliSampler) {
  CounterStream s(derive_stream_key(2, StreamKind::banzhaf, 0));
  EXPECT_EQ(sample_bernoulli_coalition(s, 3, Coalition::of(3, {0})).proposal_prob, 0.25);
  EXPECT_EQ(sample_bernoulli_coalition(s, 3, Coalition::of(3, {0, 1})).proposal_prob, 0.5);
  int with_j = 0;
  const int draws = 40000;
  for (int k = 0; k < draws; ++k) {
    const ProposalDraw d = sample_bernoulli_coalition(s, 2, Coalition::of(2, {0}));
    EXPECT_FALSE(d.coalition.contains(0));
    EXPECT_EQ(d.proposal_prob, 0.5);
    with_j += d.coalition.contains(1);
  }
  EXPECT_NEAR(with_j / double(draws), 0.5, 0.01);
  const ProposalDraw big = sample_bernoulli_coalition(s, 64, Coalition::of(64, {5}));
  EXPECT_FALSE(big.coalition.contains(5));
  EXPECT_EQ(big.proposal_prob, std::ldexp(1.0, -63));
}

TEST(Weights, WorkedExampleNormalization) {
  const Vector values{0.5, 0.8, 1.0};
  const Vector probs{1.0, 1.0, 1.0};
  const Vector marginals{0.5, 1.0, 0.6};
  const WeightedSampleBatch b = normalize_weights(values, probs, marginals, 1.0);
  EXPECT_NEAR(b.normalized_weights[0], 0.25, 0.005);
  EXPECT_NEAR(b.normalized_weights[1], 0.34, 0.005);
  EXPECT_NEAR(b.normalized_weights[2], 0.41, 0.005);
  EXPECT_NEAR(b.estimate(), 0.711, 0.001);
  const double z = std::exp(0.5) + std::exp(0.8) + std::exp(1.0);
  EXPECT_NEAR(b.normalized_weights[1], std::exp(0.8) / z, 1e-15);
}

TEST(Weights, SingleAndEqualSamples) {
  const WeightedSampleBatch one = normalize_weights(Vector{3.0}, Vector{0.2}, Vector{1.5}, 0.1);
  EXPECT_EQ(one.normalized_weights, Vector{1.0});
  EXPECT_EQ(one.effective_sample_size(), 1.0);
  const WeightedSampleBatch eq = normalize_weights(Vector(7, 0.4), Vector(7, 0.25), Vector(7, 1.0), 0.5);
  for (double w : eq.normalized_weights) EXPECT_NEAR(w, 1.0 / 7, 1e-15);
  EXPECT_NEAR(eq.effective_sample_size(), 7.0, 1e-12);
}

TEST(Weights, ScaleInvarianceAndSum) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v(40), p(40), d(40), shifted(40);
    for (std::size_t k = 0; k < 40; ++k) {
      v[k] = u(rng);
      p[k] = std::ldexp(1.0, -1 - static_cast<int>(k % 5));
      d[k] = u(rng);
    }
    const double c = 10.0 * u(rng);
    for (std::size_t k = 0; k < 40; ++k) shifted[k] = v[k] + c;
    const WeightedSampleBatch a = normalize_weights(v, p, d, 0.25);
    const WeightedSampleBatch b = normalize_weights(shifted, p, d, 0.25);
    double sum = 0.0;
    for (std::size_t k = 0; k < 40; ++k) {
      EXPECT_NEAR(a.normalized_weights[k], b.normalized_weights[k], 1e-12);
      sum += a.normalized_weights[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_GE(a.effective_sample_size(), 1.0);
    EXPECT_LE(a.effective_sample_size(), 40.0 + 1e-9);
  }
}

TEST(Weights, ExtremeValuesDoNotOverflow) {
  const WeightedSampleBatch b =
      normalize_weights(Vector{800.0, 801.0}, Vector{1.0, 1.0}, Vector{0.0, 1.0}, 0.001);
  EXPECT_NEAR(b.normalized_weights[1], 1.0, 1e-12);
  EXPECT_THROW(normalize_weights(Vector{std::nan("")}, Vector{1.0}, Vector{0.0}, 1.0), InputError);
  EXPECT_THROW(normalize_weights(Vector{0.0}, Vector{0.0}, Vector{0.0}, 1.0), InputError);
  EXPECT_THROW(normalize_weights(Vector{0.0, 1.0}, Vector{1.0}, Vector{0.0}, 1.0), InputError);
}

TEST(Estimators, AdditiveGameExactInClassicMode) {
  const Vector w{0.3, -0.7, 1.1, 0.25, 0.0};
  const TabularGame g = additive(w);
  for (std::size_t k : {1u, 7u, 100u}) {
    for (int i = 0; i < 5; ++i) {
      EXPECT_NEAR(estimate_shapley(g, i, classic(k, 3)).value, w[static_cast<std::size_t>(i)], 1e-12);
      EXPECT_NEAR(estimate_banzhaf(g, i, classic(k, 3)).value, w[static_cast<std::size_t>(i)], 1e-12);
    }
    EXPECT_NEAR(estimate_interaction(g, 0, 2, classic(k, 3)).value, 0.0, 1e-12);
    EstimatorConfig gibbs = classic(k, 3);
    gibbs.mode = EstimatorMode::gibbs;
    EXPECT_NEAR(estimate_interaction(g, 1, 3, gibbs).value, 0.0, 1e-12);
  }
}

TEST(Estimators, ClassicModeWorkedExampleLargeK) {
  const EstimatorConfig cfg = classic(100000, 12345);
  EXPECT_NEAR(estimate_shapley(kExample, 1, cfg).value, 0.7667, 0.02);
  EXPECT_NEAR(estimate_banzhaf(kExample, 1, cfg).value, 0.775, 0.02);
  EXPECT_NEAR(estimate_interaction(kExample, 0, 1, cfg).value, 0.45, 0.02);
}

TEST(Estimators, EvaluationCountsAndErrors) {
  const EstimatorConfig cfg = classic(10, 1);
  EXPECT_EQ(estimate_shapley(kExample, 0, cfg).evaluations, 20u);
  EXPECT_EQ(estimate_banzhaf(kExample, 0, cfg).evaluations, 20u);
  EXPECT_EQ(estimate_interaction(kExample, 0, 2, cfg).evaluations, 40u);
  EXPECT_THROW(estimate_interaction(kExample, 1, 1, cfg), InputError);
  EXPECT_THROW(estimate_shapley(kExample, 3, cfg), InputError);
  EstimatorConfig bad = cfg;
  bad.sample_count = 0;
  EXPECT_THROW(estimate_shapley(kExample, 0, bad), InputError);
  bad = cfg;
  bad.gamma = 0.0;
  EXPECT_THROW(estimate_shapley(kExample, 0, bad), InputError);
}

TEST(Estimators, EstimateAllStructureAndDeterminism) {
  EstimatorConfig cfg;
  cfg.sample_count = 64;
  cfg.seed = 77;
  const EstimatedGameValues a = estimate_all(kExample, cfg);
  cfg.threads = 3;
  const EstimatedGameValues b = estimate_all(kExample, cfg);
  EXPECT_EQ(a.shapley_hat, b.shapley_hat);
  EXPECT_EQ(a.banzhaf_hat, b.banzhaf_hat);
  EXPECT_EQ(a.interactions_hat, b.interactions_hat);
  EXPECT_EQ(a.shapley_se, b.shapley_se);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(std::isfinite(a.shapley_hat[i]));
    EXPECT_EQ(a.interactions_hat(i, i), 0.0);
    EXPECT_GE(a.shapley_ess[i], 1.0);
    EXPECT_LE(a.shapley_ess[i], 64.0 + 1e-9);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a.interactions_hat(i, j), a.interactions_hat(j, i));
  }
  EXPECT_EQ(a.evaluations, expected_evaluation_count(3, 64));
  EXPECT_EQ(expected_evaluation_count(3, 64), 2u * 64 * 3 * 4);
  cfg.seed = 78;
  EXPECT_NE(estimate_all(kExample, cfg).shapley_hat, a.shapley_hat);
}

TEST(Estimators, SingleSampleReportsUnitEss) {
  EstimatorConfig cfg;
  cfg.sample_count = 1;
  const EstimatedGameValues v = estimate_all(kExample, cfg);
  for (double e : v.shapley_ess) EXPECT_EQ(e, 1.0);
  for (double e : v.banzhaf_ess) EXPECT_EQ(e, 1.0);
}

TEST(Estimators, GibbsModeFlattensToClassicEstimand) {
  std::mt19937_64 rng(31);
  const TabularGame g(5, ref::random_table(5, rng));
  EstimatorConfig cfg;
  cfg.sample_count = 40000;
  cfg.seed = 5;
  cfg.gamma = 1e9;
  for (int i = 0; i < 5; ++i) {
    const TargetEstimate b = estimate_banzhaf(g, i, cfg);
    EXPECT_NEAR(b.value, exact_banzhaf(g, i), 4 * b.standard_error + 1e-9);
  }
}

TEST(Estimators, ModeNames) {
  EXPECT_EQ(parse_estimator_mode("gibbs"), EstimatorMode::gibbs);
  EXPECT_EQ(to_string(EstimatorMode::classic), "classic");
  EXPECT_THROW(parse_estimator_mode("uniform"), InputError);
}

TEST(Streams, CounterStreamIsReproducibleAndUnbiased) {
  CounterStream a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
  CounterStream c(7);
  std::vector<int> hist(6, 0);
  for (int k = 0; k < 60000; ++k) ++hist[c.below(6)];
  for (int h : hist) EXPECT_NEAR(h / 60000.0, 1.0 / 6, 0.01);
  EXPECT_NE(derive_stream_key(1, StreamKind::shapley, 0), derive_stream_key(1, StreamKind::banzhaf, 0));
  EXPECT_NE(derive_stream_key(1, StreamKind::interaction, 0, 1),
            derive_stream_key(1, StreamKind::interaction, 1, 0));
  for (int k = 0; k < 1000; ++k) {
    const double x = c.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}
