#include "neurogame/attention.hpp"

#include <cmath>
#include <string>

#include "neurogame/errors.hpp"
#include "neurogame/oracles.hpp"

namespace neurogame {

std::string to_string(Normalization norm) { return norm == Normalization::l1 ? "l1" : "sum"; }

Normalization parse_normalization(const std::string& name) {
  if (name == "l1") return Normalization::l1;
  if (name == "sum") return Normalization::sum;
  throw InputError("unknown normalization '" + name + "' (expected l1|sum)");
}

std::string to_string(ValueSource source) {
  return source == ValueSource::monte_carlo ? "monte_carlo" : "exact";
}

ValueSource parse_value_source(const std::string& name) {
  if (name == "monte_carlo") return ValueSource::monte_carlo;
  if (name == "exact") return ValueSource::exact;
  throw InputError("unknown value source '" + name + "' (expected monte_carlo|exact)");
}

double gate_lambda(std::span<const double> embedding, std::span<const double> gate_weights,
                   double gate_bias) {
  if (embedding.size() != gate_weights.size()) {
    throw InputError("gate weights have " + std::to_string(gate_weights.size()) +
                     " entries, embedding has " + std::to_string(embedding.size()));
  }
  return logistic(dot(gate_weights, embedding) + gate_bias);
}

NormalizedScores normalize_scores(std::span<const double> raw, Normalization norm) {
  if (raw.empty()) throw InputError("cannot normalize an empty score vector");
  if (!all_finite(raw)) throw InputError("scores contain non-finite entries");
  double l1 = 0.0;
  double sum = 0.0;
  for (double x : raw) {
    l1 += std::abs(x);
    sum += x;
  }
  const double denom = norm == Normalization::l1 ? l1 : sum;
  if (denom == 0.0) {
    throw DegenerateInputError("score normalization is undefined: " +
                               std::string(norm == Normalization::l1 ? "L1 norm" : "sum") +
                               " of the scores is zero");
  }
  NormalizedScores out;
  out.values.reserve(raw.size());
  for (double x : raw) out.values.push_back(x / denom);
  out.conventions_differ = std::abs(l1 - sum) > 1e-12;
  return out;
}

Vector combine_fields(std::span<const double> shapley_norm,
                      std::span<const double> banzhaf_norm, std::span<const double> lambdas) {
  if (shapley_norm.size() != banzhaf_norm.size() || shapley_norm.size() != lambdas.size()) {
    throw InputError("field components have mismatched lengths");
  }
  Vector fields(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw InputError("gate value " + std::to_string(i) + " lies outside [0, 1]");
    }
    fields[i] = lambda * shapley_norm[i] + (1.0 - lambda) * banzhaf_norm[i];
  }
  return fields;
}

namespace {

void finish_head(HeadOutput& out, const Matrix& values, const MeanFieldConfig& cfg) {
  out.meanfield = solve_fixed_point(out.fields, out.interactions, cfg);
  out.alphas = out.meanfield.alphas;
  out.alpha_sum = 0.0;
  for (double a : out.alphas) out.alpha_sum += a;
  if (!values.empty()) {
    if (values.rows() != out.alphas.size()) {
      throw InputError("value matrix has " + std::to_string(values.rows()) +
                       " rows, expected one per token");
    }
    out.z.assign(values.cols(), 0.0);
    for (std::size_t i = 0; i < values.rows(); ++i) {
      const auto row = values.row(i);
      for (std::size_t k = 0; k < row.size(); ++k) out.z[k] += out.alphas[i] * row[k];
    }
  }
}

}  // namespace

HeadOutput attend_game(const Game& game, const Matrix& values, std::span<const double> lambdas,
                       const HeadParams& params) {
  const auto n = static_cast<std::size_t>(game.token_count());
  if (n == 0) throw InputError("attention needs at least one token");
  if (lambdas.size() != n) {
    throw InputError("expected " + std::to_string(n) + " gate values, got " +
                     std::to_string(lambdas.size()));
  }
  params.meanfield.validate();

  HeadOutput out;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  if (params.source == ValueSource::exact) {
    ExactGameValues exact = exact_game_values(game);
    out.shapley = std::move(exact.shapley);
    out.banzhaf = std::move(exact.banzhaf);
    out.interactions = std::move(exact.interactions);
  } else {
    EstimatedGameValues est = estimate_all(game, params.estimator);
    out.shapley = std::move(est.shapley_hat);
    out.banzhaf = std::move(est.banzhaf_hat);
    out.interactions = std::move(est.interactions_hat);
    out.evaluations = est.evaluations;
  }

  const NormalizedScores shapley_norm = normalize_scores(out.shapley, params.normalization);
  const NormalizedScores banzhaf_norm = normalize_scores(out.banzhaf, params.normalization);
  out.normalization_warning = shapley_norm.conventions_differ || banzhaf_norm.conventions_differ;
  out.fields = combine_fields(shapley_norm.values, banzhaf_norm.values, out.lambdas);
  finish_head(out, values, params.meanfield);
  return out;
}

HeadOutput attend_fields(std::span<const double> fields, const Matrix& couplings,
                         const Matrix& values, const MeanFieldConfig& cfg) {
  HeadOutput out;
  out.fields.assign(fields.begin(), fields.end());
  out.interactions = couplings;
  finish_head(out, values, cfg);
  return out;
}

AttentionOutput single_head_attend(const Matrix& embeddings, const HeadParams& params) {
  const EmbeddingGame game(embeddings, params.value_projection, params.nonlinearity);
  if (params.gate_weights.size() != embeddings.cols()) {
    throw InputError("gate weights have " + std::to_string(params.gate_weights.size()) +
                     " entries, embedding dimension is " + std::to_string(embeddings.cols()));
  }
  Vector lambdas(embeddings.rows());
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    lambdas[i] = gate_lambda(embeddings.row(i), params.gate_weights, params.gate_bias);
  }
  AttentionOutput out;
  out.heads.push_back(attend_game(game, game.projected_values(), lambdas, params));
  out.output = out.heads.front().z;
  return out;
}

AttentionOutput multi_head_attend(const Matrix& embeddings, const MultiHeadParams& params) {
  if (params.heads.empty()) throw InputError("multi-head attention needs at least one head");
  AttentionOutput out;
  Vector concat;
  for (const HeadParams& head : params.heads) {
    AttentionOutput single = single_head_attend(embeddings, head);
    concat.insert(concat.end(), single.output.begin(), single.output.end());
    out.heads.push_back(std::move(single.heads.front()));
  }
  if (params.output_projection.rows() != concat.size()) {
    throw InputError("output projection has " + std::to_string(params.output_projection.rows()) +
                     " rows, concatenated head outputs have " + std::to_string(concat.size()));
  }
  out.output = dense_vecmat(concat, params.output_projection);
  return out;
}

}  // namespace neurogame
