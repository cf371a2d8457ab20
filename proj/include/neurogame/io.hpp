#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "neurogame/attention.hpp"
#include "neurogame/estimators.hpp"
#include "neurogame/game.hpp"
#include "neurogame/linalg.hpp"
#include "neurogame/meanfield.hpp"

namespace neurogame {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct HeadSpec {
  std::optional<Matrix> value_projection;  // d_v x d
  std::optional<Vector> gate_weights;      // length d
  double gate_bias = 0.0;
};

// Validated contents of an input file. See docs/formats.md for the schema.
struct InputDocument {
  int schema_version = kSchemaVersion;
  int n = 0;
  int d = 0;
  std::optional<Matrix> embeddings;            // n x d
  std::optional<Vector> characteristic_table;  // 2^n, mask-indexed
  std::optional<double> value_bound;
  std::vector<HeadSpec> heads;
  std::optional<Matrix> output_projection;
  std::optional<Vector> lambdas;  // gates for table-driven runs
  std::optional<Vector> fields;
  std::optional<Matrix> couplings;
  Nonlinearity nonlinearity = Nonlinearity::relu;

  bool has_game() const { return embeddings.has_value() || characteristic_table.has_value(); }
  bool has_field_override() const { return fields.has_value(); }
};

// Throws InputError with a field-level message on any schema or invariant
// violation.
InputDocument parse_input(const Json& doc);
InputDocument load_input(const std::filesystem::path& path);
Json to_json(const InputDocument& doc);

struct RunConfig {
  double coalition_gamma = 0.25;
  double spin_gamma = 0.25;
  std::size_t samples = 25;
  int max_iterations = 25;
  double tolerance = 1e-4;
  double damping = 0.7;
  std::uint64_t seed = 0;
  EstimatorMode mode = EstimatorMode::gibbs;
  Normalization normalization = Normalization::l1;
  ValueSource source = ValueSource::monte_carlo;
  int threads = 0;  // 0 = auto; never affects results

  void validate() const;
};

RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);
// Echo of every result-affecting setting (the thread hint is omitted).
Json to_json(const RunConfig& cfg);

EstimatorConfig estimator_config(const RunConfig& cfg, std::uint64_t seed);
MeanFieldConfig meanfield_config(const RunConfig& cfg);

// The game described by the document: the table, or the embeddings under
// head 0's value projection.
std::unique_ptr<Game> make_game(const InputDocument& doc);

// Head parameters for every head, filling defaults: d_v = d / H with an
// identity-slice projection, zero gate weights, and head seeds derived from
// (cfg.seed, head index).
MultiHeadParams make_head_params(const InputDocument& doc, const RunConfig& cfg);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);

// Pretty-printed JSON with shortest round-trip number formatting.
std::string dump_json(const Json& doc);

}  // namespace neurogame
