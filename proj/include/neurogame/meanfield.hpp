#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "neurogame/linalg.hpp"

namespace neurogame {

struct MeanFieldConfig {
  double gamma = 0.25;
  int max_iterations = 25;
  double tolerance = 1e-4;
  // new = damping * old + (1 - damping) * tanh(h_eff / gamma)
  double damping = 0.7;

  void validate() const;
};

struct MeanFieldResult {
  Vector expected_spins;
  Vector alphas;
  int iterations_used = 0;
  // Self-consistency residual max_i |tanh(h_i/gamma) - s_i| of the last
  // iterate that was tested.
  double final_residual = 0.0;
  bool converged = false;
  // residual_trace[t] is the residual measured in iteration t + 1.
  Vector residual_trace;
  // Multiply-adds spent in coupling sums: n^2 per iteration.
  std::uint64_t coupling_operations = 0;
};

// h_i = J_i + sum_{j != i} J_ij s_j.
double effective_field(std::span<const double> fields, const Matrix& couplings,
                       std::span<const double> spins, int i);

// One synchronous (Jacobi) update of every spin from the previous iterate,
// blended with it by cfg.damping.
Vector mean_field_step(std::span<const double> fields, const Matrix& couplings,
                       std::span<const double> spins, const MeanFieldConfig& cfg);

// Iterates until the self-consistency residual drops below cfg.tolerance or
// cfg.max_iterations is reached; hitting the cap is not an error. Starts from
// zeros unless initial_spins is given.
MeanFieldResult solve_fixed_point(std::span<const double> fields, const Matrix& couplings,
                                  const MeanFieldConfig& cfg,
                                  std::optional<Vector> initial_spins = std::nullopt);

// alpha_i = (1 + s_i) / 2. Throws InputError for spins outside [-1, 1].
Vector spins_to_attention(std::span<const double> spins);

}  // namespace neurogame
