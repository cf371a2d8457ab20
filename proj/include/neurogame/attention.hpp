#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neurogame/estimators.hpp"
#include "neurogame/game.hpp"
#include "neurogame/linalg.hpp"
#include "neurogame/meanfield.hpp"

namespace neurogame {

// How raw Shapley/Banzhaf scores are normalized before blending: by their L1
// norm, or by their signed sum. The two agree when all scores share a sign.
enum class Normalization { l1, sum };

// Where the game values feeding the fields come from. `exact` enumerates
// (small n only) and bypasses the random streams entirely.
enum class ValueSource { monte_carlo, exact };

std::string to_string(Normalization norm);
Normalization parse_normalization(const std::string& name);
std::string to_string(ValueSource source);
ValueSource parse_value_source(const std::string& name);

// lambda = logistic(w . x + b)
double gate_lambda(std::span<const double> embedding, std::span<const double> gate_weights,
                   double gate_bias);

struct NormalizedScores {
  Vector values;
  // True when the signed sum and the L1 norm differ by more than 1e-12, i.e.
  // the choice of convention changed the result.
  bool conventions_differ = false;
};

// Throws DegenerateInputError when the chosen denominator is zero.
NormalizedScores normalize_scores(std::span<const double> raw,
                                  Normalization norm = Normalization::l1);

// J_i = lambda_i * shapley_i + (1 - lambda_i) * banzhaf_i, lambda_i in [0, 1].
Vector combine_fields(std::span<const double> shapley_norm,
                      std::span<const double> banzhaf_norm, std::span<const double> lambdas);

struct HeadParams {
  Matrix value_projection;  // d_v x d, applied as W_v x_i
  Vector gate_weights;      // length d
  double gate_bias = 0.0;
  EstimatorConfig estimator;  // coalition temperature lives here
  MeanFieldConfig meanfield;  // spin temperature lives here
  Normalization normalization = Normalization::l1;
  Nonlinearity nonlinearity = Nonlinearity::relu;
  ValueSource source = ValueSource::monte_carlo;
};

struct MultiHeadParams {
  std::vector<HeadParams> heads;
  Matrix output_projection;  // (H d_v) x d_model
};

struct HeadOutput {
  Vector z;  // sum_i alpha_i v_i; empty when the game has no value vectors
  Vector lambdas;
  Vector shapley;  // raw estimates (or exact values)
  Vector banzhaf;
  Vector fields;
  Matrix interactions;
  Vector alphas;
  double alpha_sum = 0.0;  // reported, never renormalized
  MeanFieldResult meanfield;
  bool normalization_warning = false;
  std::uint64_t evaluations = 0;
};

struct AttentionOutput {
  Vector output;
  std::vector<HeadOutput> heads;
};

// Pipeline after the game is fixed: game values, normalization, fields, mean
// field, aggregation. `values` (n x d_v) may be empty, in which case z is
// left empty.
HeadOutput attend_game(const Game& game, const Matrix& values, std::span<const double> lambdas,
                       const HeadParams& params);

// Spin stage only, from given fields and couplings.
HeadOutput attend_fields(std::span<const double> fields, const Matrix& couplings,
                         const Matrix& values, const MeanFieldConfig& cfg);

// embeddings: n x d, one token per row.
AttentionOutput single_head_attend(const Matrix& embeddings, const HeadParams& params);

// Runs every head with its own parameters (including its own seed),
// concatenates head outputs in order and applies the output projection.
AttentionOutput multi_head_attend(const Matrix& embeddings, const MultiHeadParams& params);

}  // namespace neurogame
