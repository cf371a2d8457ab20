#include "neurogame/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "neurogame/errors.hpp"
#include "neurogame/parallel.hpp"
#include "neurogame/rng.hpp"

namespace neurogame {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw InputError(path + ": " + msg);
}

double read_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

Vector read_vector(const Json& j, const std::string& path, std::optional<std::size_t> length = {}) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  if (length && j.size() != *length) {
    fail(path, "expected " + std::to_string(*length) + " numbers, got " + std::to_string(j.size()));
  }
  Vector out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(read_number(j[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Matrix read_matrix(const Json& j, const std::string& path, std::optional<std::size_t> rows,
                   std::optional<std::size_t> cols) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  if (rows && j.size() != *rows) {
    fail(path, "expected " + std::to_string(*rows) + " rows, got " + std::to_string(j.size()));
  }
  if (j.empty()) fail(path, "matrix must have at least one row");
  std::vector<Vector> data;
  const std::size_t width = cols ? *cols : (j[0].is_array() ? j[0].size() : 0);
  for (std::size_t r = 0; r < j.size(); ++r) {
    data.push_back(read_vector(j[r], path + "[" + std::to_string(r) + "]", width));
  }
  if (width == 0) fail(path, "matrix rows must be non-empty");
  return Matrix::from_rows(data);
}

int read_count(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto x = j.get<long long>();
  if (x < 0) fail(path, "expected a non-negative integer");
  return static_cast<int>(x);
}

std::string read_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

HeadSpec read_head(const Json& j, const std::string& path, int d) {
  if (!j.is_object()) fail(path, "expected an object");
  HeadSpec head;
  if (j.contains("value_projection")) {
    head.value_projection = read_matrix(j["value_projection"], path + ".value_projection", {},
                                        static_cast<std::size_t>(d));
  }
  if (j.contains("gate_weights")) {
    head.gate_weights =
        read_vector(j["gate_weights"], path + ".gate_weights", static_cast<std::size_t>(d));
  }
  if (j.contains("gate_bias")) head.gate_bias = read_number(j["gate_bias"], path + ".gate_bias");
  return head;
}

template <class F>
auto rethrow_with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

}  // namespace

InputDocument parse_input(const Json& j) {
  if (!j.is_object()) fail("input", "top level must be a JSON object");
  InputDocument doc;
  if (j.contains("schema_version")) {
    doc.schema_version = read_count(j["schema_version"], "input.schema_version");
    if (doc.schema_version != kSchemaVersion) {
      fail("input.schema_version", "unsupported version " + std::to_string(doc.schema_version));
    }
  }
  if (!j.contains("n")) fail("input.n", "required field missing");
  doc.n = read_count(j["n"], "input.n");
  if (doc.n < 1 || doc.n > kMaxTokens) {
    fail("input.n", "token count must lie in 1.." + std::to_string(kMaxTokens));
  }
  const auto n = static_cast<std::size_t>(doc.n);

  const bool has_embeddings = j.contains("embeddings");
  const bool has_table = j.contains("characteristic_table");
  if (has_embeddings && has_table) {
    fail("input", "schema violation: 'embeddings' and 'characteristic_table' are mutually exclusive");
  }
  if (!has_embeddings && !has_table && !j.contains("fields")) {
    fail("input", "schema violation: one of 'embeddings', 'characteristic_table' or 'fields' is required");
  }

  if (j.contains("d")) doc.d = read_count(j["d"], "input.d");
  if (has_embeddings) {
    if (!j.contains("d")) fail("input.d", "required when 'embeddings' is present");
    if (doc.d < 1) fail("input.d", "embedding dimension must be positive");
    doc.embeddings =
        read_matrix(j["embeddings"], "input.embeddings", n, static_cast<std::size_t>(doc.d));
  }

  if (j.contains("value_bound")) doc.value_bound = read_number(j["value_bound"], "input.value_bound");
  if (has_table) {
    if (doc.n > TabularGame::kMaxTokens) {
      fail("input.characteristic_table",
           "tables support at most " + std::to_string(TabularGame::kMaxTokens) + " tokens");
    }
    doc.characteristic_table =
        read_vector(j["characteristic_table"], "input.characteristic_table", std::size_t{1} << n);
    rethrow_with_path("input.characteristic_table", [&] {
      return TabularGame(doc.n, *doc.characteristic_table, doc.value_bound);
    });
  }

  if (j.contains("nonlinearity")) {
    doc.nonlinearity = rethrow_with_path("input.nonlinearity", [&] {
      return parse_nonlinearity(read_string(j["nonlinearity"], "input.nonlinearity"));
    });
  }

  if (j.contains("head") && j.contains("heads")) {
    fail("input", "schema violation: give either 'head' or 'heads', not both");
  }
  if ((j.contains("head") || j.contains("heads")) && !has_embeddings) {
    fail("input", "head parameters require 'embeddings'");
  }
  if (j.contains("head")) doc.heads.push_back(read_head(j["head"], "input.head", doc.d));
  if (j.contains("heads")) {
    const Json& heads = j["heads"];
    if (!heads.is_array() || heads.empty()) fail("input.heads", "expected a non-empty array");
    for (std::size_t h = 0; h < heads.size(); ++h) {
      doc.heads.push_back(read_head(heads[h], "input.heads[" + std::to_string(h) + "]", doc.d));
    }
  }
  if (j.contains("output_projection")) {
    if (!has_embeddings) fail("input.output_projection", "requires 'embeddings'");
    doc.output_projection = read_matrix(j["output_projection"], "input.output_projection", {}, {});
  }

  if (j.contains("lambdas")) {
    doc.lambdas = read_vector(j["lambdas"], "input.lambdas", n);
    for (std::size_t i = 0; i < n; ++i) {
      const double l = (*doc.lambdas)[i];
      if (!(l >= 0.0 && l <= 1.0)) fail("input.lambdas[" + std::to_string(i) + "]", "must lie in [0, 1]");
    }
  }

  if (j.contains("couplings") && !j.contains("fields")) {
    fail("input.couplings", "requires 'fields'");
  }
  if (j.contains("fields")) {
    doc.fields = read_vector(j["fields"], "input.fields", n);
    if (j.contains("couplings")) {
      doc.couplings = read_matrix(j["couplings"], "input.couplings", n, n);
      rethrow_with_path("input.couplings", [&] {
        require_coupling_matrix(*doc.couplings, n);
        return 0;
      });
    } else {
      doc.couplings = Matrix(n, n);
    }
  }
  return doc;
}

InputDocument load_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open input file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": JSON parse error: " + e.what());
  }
  return parse_input(j);
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (double x : m.row(r)) row.push_back(x);
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const InputDocument& doc) {
  Json out;
  out["schema_version"] = doc.schema_version;
  out["n"] = doc.n;
  if (doc.d > 0) out["d"] = doc.d;
  if (doc.embeddings) out["embeddings"] = to_json(*doc.embeddings);
  if (doc.characteristic_table) out["characteristic_table"] = to_json(*doc.characteristic_table);
  if (doc.value_bound) out["value_bound"] = *doc.value_bound;
  out["nonlinearity"] = to_string(doc.nonlinearity);
  if (!doc.heads.empty()) {
    Json heads = Json::array();
    for (const HeadSpec& h : doc.heads) {
      Json head = Json::object();
      if (h.value_projection) head["value_projection"] = to_json(*h.value_projection);
      if (h.gate_weights) head["gate_weights"] = to_json(*h.gate_weights);
      head["gate_bias"] = h.gate_bias;
      heads.push_back(std::move(head));
    }
    out["heads"] = std::move(heads);
  }
  if (doc.output_projection) out["output_projection"] = to_json(*doc.output_projection);
  if (doc.lambdas) out["lambdas"] = to_json(*doc.lambdas);
  if (doc.fields) out["fields"] = to_json(*doc.fields);
  if (doc.couplings) out["couplings"] = to_json(*doc.couplings);
  return out;
}

void RunConfig::validate() const {
  estimator_config(*this, seed).validate();
  meanfield_config(*this).validate();
}

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) fail("config", "top level must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    const std::string path = "config." + key;
    if (key == "coalition_gamma") {
      cfg.coalition_gamma = read_number(value, path);
    } else if (key == "spin_gamma") {
      cfg.spin_gamma = read_number(value, path);
    } else if (key == "gamma") {
      cfg.coalition_gamma = cfg.spin_gamma = read_number(value, path);
    } else if (key == "samples" || key == "K") {
      cfg.samples = static_cast<std::size_t>(read_count(value, path));
    } else if (key == "max_iterations" || key == "T") {
      cfg.max_iterations = read_count(value, path);
    } else if (key == "tolerance") {
      cfg.tolerance = read_number(value, path);
    } else if (key == "damping") {
      cfg.damping = read_number(value, path);
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) fail(path, "expected an integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "mode") {
      cfg.mode = rethrow_with_path(path, [&] { return parse_estimator_mode(read_string(value, path)); });
    } else if (key == "normalization") {
      cfg.normalization = rethrow_with_path(path, [&] { return parse_normalization(read_string(value, path)); });
    } else if (key == "source") {
      cfg.source = rethrow_with_path(path, [&] { return parse_value_source(read_string(value, path)); });
    } else if (key == "threads") {
      cfg.threads = value.is_string() && value.get<std::string>() == "auto" ? 0 : read_count(value, path);
    } else if (key != "schema_version") {
      fail(path, "unknown configuration key");
    }
  }
  rethrow_with_path("config", [&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open config file");
  try {
    return parse_config(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": JSON parse error: " + e.what());
  }
}

Json to_json(const RunConfig& cfg) {
  Json out;
  out["coalition_gamma"] = cfg.coalition_gamma;
  out["spin_gamma"] = cfg.spin_gamma;
  out["samples"] = cfg.samples;
  out["max_iterations"] = cfg.max_iterations;
  out["tolerance"] = cfg.tolerance;
  out["damping"] = cfg.damping;
  out["seed"] = cfg.seed;
  out["mode"] = to_string(cfg.mode);
  out["normalization"] = to_string(cfg.normalization);
  out["source"] = to_string(cfg.source);
  return out;
}

EstimatorConfig estimator_config(const RunConfig& cfg, std::uint64_t seed) {
  EstimatorConfig est;
  est.sample_count = cfg.samples;
  est.seed = seed;
  est.gamma = cfg.coalition_gamma;
  est.mode = cfg.mode;
  est.threads = resolve_thread_count(cfg.threads);
  return est;
}

MeanFieldConfig meanfield_config(const RunConfig& cfg) {
  MeanFieldConfig mf;
  mf.gamma = cfg.spin_gamma;
  mf.max_iterations = cfg.max_iterations;
  mf.tolerance = cfg.tolerance;
  mf.damping = cfg.damping;
  return mf;
}

MultiHeadParams make_head_params(const InputDocument& doc, const RunConfig& cfg) {
  if (!doc.embeddings) throw InputError("head parameters require embeddings");
  const std::size_t d = static_cast<std::size_t>(doc.d);
  const std::size_t heads = std::max<std::size_t>(1, doc.heads.size());
  MultiHeadParams params;
  std::size_t concat = 0;
  for (std::size_t h = 0; h < heads; ++h) {
    const HeadSpec given = h < doc.heads.size() ? doc.heads[h] : HeadSpec{};
    HeadParams head;
    if (given.value_projection) {
      head.value_projection = *given.value_projection;
    } else {
      if (d % heads != 0) {
        throw InputError("input.heads[" + std::to_string(h) +
                         "].value_projection: required when d is not divisible by the head count");
      }
      const std::size_t dv = d / heads;
      head.value_projection = Matrix(dv, d);
      for (std::size_t r = 0; r < dv; ++r) head.value_projection(r, h * dv + r) = 1.0;
    }
    head.gate_weights = given.gate_weights ? *given.gate_weights : Vector(d, 0.0);
    head.gate_bias = given.gate_bias;
    head.estimator = estimator_config(cfg, derive_stream_key(cfg.seed, StreamKind::head, h));
    head.meanfield = meanfield_config(cfg);
    head.normalization = cfg.normalization;
    head.nonlinearity = doc.nonlinearity;
    head.source = cfg.source;
    concat += head.value_projection.rows();
    params.heads.push_back(std::move(head));
  }
  if (doc.output_projection) {
    if (doc.output_projection->rows() != concat) {
      throw InputError("input.output_projection: expected " + std::to_string(concat) +
                       " rows (H * d_v), got " + std::to_string(doc.output_projection->rows()));
    }
    params.output_projection = *doc.output_projection;
  } else {
    params.output_projection = Matrix::identity(concat);
  }
  return params;
}

std::unique_ptr<Game> make_game(const InputDocument& doc) {
  if (doc.characteristic_table) {
    return std::make_unique<TabularGame>(doc.n, *doc.characteristic_table, doc.value_bound);
  }
  if (doc.embeddings) {
    MultiHeadParams params = make_head_params(doc, RunConfig{});
    return std::make_unique<EmbeddingGame>(*doc.embeddings,
                                           std::move(params.heads.front().value_projection),
                                           doc.nonlinearity);
  }
  throw InputError("input: this command needs 'embeddings' or 'characteristic_table'");
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace neurogame
