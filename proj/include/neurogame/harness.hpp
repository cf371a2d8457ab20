#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "neurogame/io.hpp"
#include "neurogame/oracles.hpp"

namespace neurogame {

// The three-token worked example ("not good movie"), replayed with the
// example's own coalitions and weights injected.
struct DemoReport {
  Vector stated_weights;
  Vector computed_weights;
  double stated_shapley_2 = 0.0;
  double computed_shapley_2 = 0.0;
  double computed_banzhaf_2 = 0.0;
  double stated_interaction_12 = 0.0;
  double computed_interaction_12 = 0.0;
  double computed_field_2 = 0.0;  // lambda_2 = 0.6 blend
  Vector stated_iteration_1;
  Vector computed_iteration_1;
  Vector stated_iteration_2;
  Vector computed_iteration_2;
  Vector stated_final_spins;
  Vector stated_final_alphas;
  Vector alphas_from_stated_spins;
  MeanFieldResult fixed_point;  // undamped, run to tolerance 1e-6
  ExactSpinMarginals exact;
  Vector exact_shapley;
  Vector exact_banzhaf;
  std::string text;
};

DemoReport run_demo();

// The example's characteristic table (bit i = token i) and its stated fields
// and couplings.
TabularGame demo_game();
Vector demo_fields();
Matrix demo_couplings();

Json run_oracle(const InputDocument& doc, const RunConfig& cfg, std::string* trace_csv = nullptr);
Json run_estimate(const InputDocument& doc, const RunConfig& cfg);
Json run_attend(const InputDocument& doc, const RunConfig& cfg, std::string* trace_csv = nullptr);

struct BenchOptions {
  std::vector<int> sizes{8, 16, 32, 64};
  std::vector<std::size_t> samples{64, 256, 1024, 4096};
  int dim = 8;
};

struct BenchRow {
  int n = 0;
  std::size_t samples = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t expected_evaluations = 0;
  double estimate_seconds = 0.0;
  int mf_iterations = 0;
  std::uint64_t coupling_operations = 0;
  double meanfield_seconds = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double total_seconds = 0.0;

  // Every row's evaluation count equals 2 K n (n + 1) and every mean-field
  // run spent exactly n^2 coupling operations per iteration.
  bool counts_match() const;
  std::string csv() const;
};

BenchReport run_bench(const RunConfig& cfg, const BenchOptions& options = {});

}  // namespace neurogame
