#include "neurogame/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neurogame/errors.hpp"

namespace neurogame {

void MeanFieldConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InputError("spin temperature gamma must be positive and finite");
  }
  if (max_iterations < 1) throw InputError("mean-field iteration cap T must be at least 1");
  if (!(tolerance > 0.0)) throw InputError("mean-field tolerance must be positive");
  if (!(damping >= 0.0 && damping < 1.0)) throw InputError("damping must lie in [0, 1)");
}

namespace {

void require_system(std::span<const double> fields, const Matrix& couplings,
                    std::span<const double> spins) {
  if (fields.empty()) throw InputError("mean-field system needs at least one spin");
  if (!all_finite(fields)) throw InputError("fields contain non-finite entries");
  require_coupling_matrix(couplings, fields.size());
  if (spins.size() != fields.size()) {
    throw InputError("spin vector has " + std::to_string(spins.size()) +
                     " entries, expected " + std::to_string(fields.size()));
  }
}

// Coupling sums run over the full row; the diagonal is zero, so the j == i
// term contributes nothing and every row costs exactly n multiply-adds.
double field_unchecked(std::span<const double> fields, const Matrix& couplings,
                       std::span<const double> spins, std::size_t i) {
  const auto row = couplings.row(i);
  double h = fields[i];
  for (std::size_t j = 0; j < row.size(); ++j) h += row[j] * spins[j];
  return h;
}

void undamped_update(std::span<const double> fields, const Matrix& couplings,
                     std::span<const double> spins, double gamma, Vector& out) {
  out.resize(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out[i] = std::tanh(field_unchecked(fields, couplings, spins, i) / gamma);
  }
}

}  // namespace

double effective_field(std::span<const double> fields, const Matrix& couplings,
                       std::span<const double> spins, int i) {
  require_system(fields, couplings, spins);
  if (i < 0 || static_cast<std::size_t>(i) >= fields.size()) {
    throw InputError("spin index " + std::to_string(i) + " out of range");
  }
  return field_unchecked(fields, couplings, spins, static_cast<std::size_t>(i));
}

Vector mean_field_step(std::span<const double> fields, const Matrix& couplings,
                       std::span<const double> spins, const MeanFieldConfig& cfg) {
  cfg.validate();
  require_system(fields, couplings, spins);
  Vector update;
  undamped_update(fields, couplings, spins, cfg.gamma, update);
  for (std::size_t i = 0; i < update.size(); ++i) {
    update[i] = cfg.damping * spins[i] + (1.0 - cfg.damping) * update[i];
  }
  return update;
}

MeanFieldResult solve_fixed_point(std::span<const double> fields, const Matrix& couplings,
                                  const MeanFieldConfig& cfg,
                                  std::optional<Vector> initial_spins) {
  cfg.validate();
  Vector spins = initial_spins ? std::move(*initial_spins) : Vector(fields.size(), 0.0);
  require_system(fields, couplings, spins);
  for (double s : spins) {
    if (!(s >= -1.0 && s <= 1.0)) throw InputError("initial spins must lie in [-1, 1]");
  }

  const auto n = static_cast<std::uint64_t>(fields.size());
  MeanFieldResult result;
  result.residual_trace.reserve(static_cast<std::size_t>(cfg.max_iterations));
  Vector update;
  for (int t = 1; t <= cfg.max_iterations; ++t) {
    undamped_update(fields, couplings, spins, cfg.gamma, update);
    result.coupling_operations += n * n;
    result.iterations_used = t;
    if (!all_finite(update)) {
      throw NumericalError("mean-field update produced a non-finite value at iteration " +
                           std::to_string(t));
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < spins.size(); ++i) {
      residual = std::max(residual, std::abs(update[i] - spins[i]));
    }
    result.residual_trace.push_back(residual);
    result.final_residual = residual;
    if (residual < cfg.tolerance) {
      // `spins` is the iterate whose residual was just certified.
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < spins.size(); ++i) {
      spins[i] = cfg.damping * spins[i] + (1.0 - cfg.damping) * update[i];
    }
  }
  result.alphas = spins_to_attention(spins);
  result.expected_spins = std::move(spins);
  return result;
}

Vector spins_to_attention(std::span<const double> spins) {
  Vector alphas(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (!(spins[i] >= -1.0 && spins[i] <= 1.0)) {
      throw InputError("spin " + std::to_string(i) + " lies outside [-1, 1]");
    }
    alphas[i] = (1.0 + spins[i]) / 2.0;
  }
  return alphas;
}

}  // namespace neurogame
