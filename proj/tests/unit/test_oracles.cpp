#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/reference.hpp"
#include "neurogame/errors.hpp"
#include "neurogame/harness.hpp"
#include "neurogame/oracles.hpp"

using namespace neurogame;

namespace {
const TabularGame kExample = demo_game();
const ref::Table kTable = kExample.values();

Matrix to_matrix(const std::vector<std::vector<double>>& rows) { return Matrix::from_rows(rows); }
}  // namespace

TEST(ExactShapley, WorkedExampleAgainstOrderings) {
  for (int i = 0; i < 3; ++i) {
    const double expected = ref::shapley_by_orderings(kTable, 3, i);
    EXPECT_NEAR(exact_shapley(kExample, i), expected, 1e-12);
    EXPECT_NEAR(exact_shapley_by_permutations(kExample, i), expected, 1e-12);
  }
  EXPECT_NEAR(exact_shapley(kExample, 1), 0.7667, 5e-5);
  const ExactGameValues v = exact_game_values(kExample);
  EXPECT_NEAR(v.shapley[0] + v.shapley[1] + v.shapley[2], 1.8, 1e-12);
  EXPECT_EQ(v.grand_value, 1.8);
}

TEST(ExactShapley, AdditiveGameGivesWeights) {
  const Vector w{0.4, -1.1, 2.0, 0.0};
  const TabularGame g = TabularGame::from_function(4, [&](Coalition c) {
    double s = 0.0;
    c.for_each([&](int i) { s += w[static_cast<std::size_t>(i)]; });
    return s;
  });
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(exact_shapley(g, i), w[static_cast<std::size_t>(i)], 1e-12);
    EXPECT_NEAR(exact_banzhaf(g, i), w[static_cast<std::size_t>(i)], 1e-12);
    for (int j = 0; j < 4; ++j)
      if (j != i) EXPECT_NEAR(exact_interaction(g, i, j), 0.0, 1e-12);
  }
}

TEST(ExactBanzhaf, WorkedExample) {
  EXPECT_NEAR(exact_banzhaf(kExample, 1), 0.775, 1e-12);
  EXPECT_NEAR(exact_banzhaf(kExample, 1), (0.5 + 1.0 + 0.6 + 1.0) / 4, 1e-12);
  const TabularGame single(1, {0.0, 0.37});
  EXPECT_EQ(exact_banzhaf(single, 0), 0.37);
  EXPECT_EQ(exact_shapley(single, 0), 0.37);
}

TEST(ExactInteraction, WorkedExampleAndSymmetry) {
  EXPECT_NEAR(exact_interaction(kExample, 0, 1), 0.45, 1e-12);
  EXPECT_EQ(exact_interaction(kExample, 0, 1), exact_interaction(kExample, 1, 0));
  EXPECT_THROW(exact_interaction(kExample, 1, 1), InputError);
}

TEST(ExactOracles, RandomGamesMatchReference) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    const ref::Table t = ref::random_table(n, rng);
    const TabularGame g(n, t);
    for (int i = 0; i < n; ++i) {
      const double phi = ref::shapley_by_orderings(t, n, i);
      EXPECT_NEAR(exact_shapley(g, i), phi, 1e-10);
      EXPECT_NEAR(exact_shapley_by_permutations(g, i), phi, 1e-10);
      EXPECT_NEAR(exact_banzhaf(g, i), ref::banzhaf(t, n, i), 1e-12);
      for (int j = i + 1; j < n; ++j) {
        EXPECT_NEAR(exact_interaction(g, i, j), ref::interaction(t, n, i, j), 1e-12);
      }
    }
  }
}

TEST(ExactOracles, LimitsRefuseExplicitly) {
  const TabularGame big = TabularGame::from_function(13, [](Coalition c) { return c.size(); });
  EXPECT_THROW(exact_shapley_by_permutations(big, 0), LimitError);
  EXPECT_NEAR(exact_shapley(big, 0), 1.0, 1e-9);
  const EmbeddingGame huge(Matrix(21, 2, 1.0), Matrix::identity(2));
  try {
    exact_banzhaf(huge, 0);
    FAIL() << "expected LimitError";
  } catch (const LimitError& e) {
    EXPECT_NE(std::string(e.what()).find("20"), std::string::npos);
  }
  EXPECT_THROW(exact_shapley(huge, 0), LimitError);
  EXPECT_THROW(exact_interaction(huge, 0, 1), LimitError);
  const TabularGame seventeen = TabularGame::from_function(17, [](Coalition c) { return c.size(); });
  EXPECT_THROW(exact_gibbs_tilted_value(seventeen, GibbsTarget(1), TiltedKind::banzhaf, 0), LimitError);
  EXPECT_THROW(exact_spin_marginals(Vector(17, 0.1), Matrix(17, 17), 1.0), LimitError);
}

TEST(Tilted, WorkedExampleMatchesHandEnumeration) {
  const GibbsTarget t(1.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(exact_gibbs_tilted_value(kExample, t, TiltedKind::banzhaf, i),
                ref::tilted_banzhaf(kTable, 3, i, 1.0), 1e-12);
    EXPECT_NEAR(exact_gibbs_tilted_value(kExample, t, TiltedKind::shapley_prefix, i),
                ref::tilted_prefix(kTable, 3, i, 1.0), 1e-12);
  }
  // Weights exp(v(C)) over C in {empty, {t1}, {t3}, {t1,t3}}.
  const double w0 = 1, w1 = std::exp(0.2), w3 = std::exp(0.4), w13 = std::exp(0.8);
  const double hand = (w0 * 0.5 + w1 * 1.0 + w3 * 0.6 + w13 * 1.0) / (w0 + w1 + w3 + w13);
  EXPECT_NEAR(exact_gibbs_tilted_value(kExample, t, TiltedKind::banzhaf, 1), hand, 1e-12);
  EXPECT_NEAR(exact_gibbs_tilted_value(kExample, t, TiltedKind::interaction, 0, 1),
              ref::tilted_interaction(kTable, 3, 0, 1, 1.0), 1e-12);
}

TEST(Tilted, FlatTargetRecoversUniform) {
  std::mt19937_64 rng(8);
  const ref::Table t = ref::random_table(6, rng);
  const TabularGame g(6, t);
  const GibbsTarget flat(1e9);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(exact_gibbs_tilted_value(g, flat, TiltedKind::banzhaf, i), exact_banzhaf(g, i), 1e-6);
    EXPECT_NEAR(exact_gibbs_tilted_value(g, flat, TiltedKind::shapley_prefix, i),
                exact_banzhaf(g, i), 1e-6);
  }
  EXPECT_NEAR(exact_gibbs_tilted_value(g, flat, TiltedKind::interaction, 1, 4),
              exact_interaction(g, 1, 4), 1e-6);
}

TEST(Tilted, ConstantGameMatchesUniform) {
  const TabularGame g = TabularGame::from_function(4, [](Coalition c) { return c.empty() ? 0.0 : 0.7; });
  const TiltedGameValues tv = exact_gibbs_tilted_values(g, GibbsTarget(0.3));
  for (int i = 0; i < 4; ++i) {
    // Only the empty coalition has a different weight; it is also the only
    // coalition with a nonzero marginal.
    EXPECT_NEAR(tv.banzhaf[static_cast<std::size_t>(i)],
                ref::tilted_banzhaf(g.values(), 4, i, 0.3), 1e-12);
  }
  // When v is constant on the coalitions a target is weighted over, the
  // tilt is flat and the tilted value is the uniform one.
  const TabularGame solo = TabularGame::from_function(4, [](Coalition c) {
    return c.contains(2) ? 0.9 + 0.1 * c.size() : 0.0;
  });
  const GibbsTarget t(0.3);
  EXPECT_NEAR(exact_gibbs_tilted_value(solo, t, TiltedKind::banzhaf, 2), exact_banzhaf(solo, 2), 1e-12);
}

TEST(Tilted, StableAtLowTemperature) {
  const GibbsTarget cold(1e-3);
  const double b = exact_gibbs_tilted_value(kExample, cold, TiltedKind::banzhaf, 1);
  // Weight concentrates on {t1, t3}, whose marginal for t2 is 1.0.
  EXPECT_NEAR(b, 1.0, 1e-9);
}

TEST(Hamiltonian, KnownValues) {
  const Vector one{1.0};
  const int up = 1;
  EXPECT_EQ(hamiltonian(one, Matrix(1, 1), std::span<const int>(&up, 1)), -1.0);
  const std::vector<int> all_up{1, 1, 1};
  EXPECT_NEAR(hamiltonian(demo_fields(), demo_couplings(), all_up), -2.702, 1e-12);
  const std::vector<int> mixed{1, -1, 1};
  EXPECT_EQ(hamiltonian(Vector(3, 0.0), Matrix(3, 3), mixed), 0.0);
  const std::vector<int> bad{1, 0, 1};
  EXPECT_THROW(hamiltonian(demo_fields(), demo_couplings(), bad), InputError);
}

TEST(SpinMarginals, ClosedFormsAndSymmetry) {
  const ExactSpinMarginals one = exact_spin_marginals(Vector{0.5}, Matrix(1, 1), 1.0);
  EXPECT_NEAR(one.expected_spins[0], std::tanh(0.5), 1e-12);
  EXPECT_NEAR(one.alphas[0], 0.7311, 5e-5);

  const ExactSpinMarginals zero = exact_spin_marginals(Vector(5, 0.0), Matrix(5, 5), 0.7);
  for (double a : zero.alphas) EXPECT_EQ(a, 0.5);

  const ExactSpinMarginals flip =
      exact_spin_marginals(Vector{0, 0}, to_matrix({{0, 1}, {1, 0}}), 1.0);
  EXPECT_NEAR(flip.expected_spins[0], 0.0, 1e-15);
  EXPECT_NEAR(flip.expected_spins[1], 0.0, 1e-15);
}

TEST(SpinMarginals, ZeroCouplingIsTanh) {
  const Vector h{0.3, -1.2, 2.0, 0.0, -0.05};
  for (double gamma : {0.1, 1.0, 5.0}) {
    const ExactSpinMarginals m = exact_spin_marginals(h, Matrix(5, 5), gamma);
    for (std::size_t i = 0; i < h.size(); ++i) {
      EXPECT_NEAR(m.expected_spins[i], std::tanh(h[i] / gamma), 1e-12);
    }
  }
}

TEST(SpinMarginals, MatchesReferenceAndActiveCount) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 7;
    Vector h(n);
    std::vector<std::vector<double>> j(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      h[a] = u(rng);
      for (std::size_t b = a + 1; b < n; ++b) j[a][b] = j[b][a] = 0.5 * u(rng);
    }
    const ref::Marginals expected = ref::spin_marginals(h, j, 0.8);
    const ExactSpinMarginals got = exact_spin_marginals(h, to_matrix(j), 0.8);
    double alpha_sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      EXPECT_NEAR(got.expected_spins[a], expected.spins[a], 1e-12);
      EXPECT_EQ(got.alphas[a], (1.0 + got.expected_spins[a]) / 2.0);
      alpha_sum += got.alphas[a];
    }
    EXPECT_NEAR(alpha_sum, expected.active, 1e-9);
    EXPECT_NEAR(got.expected_active_count, expected.active, 1e-9);
  }
}

TEST(SpinMarginals, WorkedExampleAtUnitTemperature) {
  std::vector<std::vector<double>> j = demo_couplings().to_rows();
  const ref::Marginals expected = ref::spin_marginals(demo_fields(), j, 1.0);
  const ExactSpinMarginals got = exact_spin_marginals(demo_fields(), demo_couplings(), 1.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got.expected_spins[i], expected.spins[i], 1e-12);
  EXPECT_NEAR(got.expected_spins[0], 0.71783991, 1e-8);
}

TEST(SpinMarginals, ExtremeTemperaturesStayFinite) {
  const ExactSpinMarginals cold = exact_spin_marginals(demo_fields(), demo_couplings(), 1e-6);
  for (double s : cold.expected_spins) EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(cold.log_partition));
  const ExactSpinMarginals hot = exact_spin_marginals(demo_fields(), demo_couplings(), 1e6);
  for (double a : hot.alphas) EXPECT_NEAR(a, 0.5, 1e-5);
}

TEST(SpinMarginals, InputValidation) {
  EXPECT_THROW(exact_spin_marginals(Vector{0.1, 0.2}, to_matrix({{0, 1}, {0.9, 0}}), 1.0), InputError);
  EXPECT_THROW(exact_spin_marginals(Vector{0.1, 0.2}, Matrix(2, 2), 0.0), InputError);
}
