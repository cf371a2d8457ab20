#include "neurogame/harness.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "neurogame/attention.hpp"
#include "neurogame/errors.hpp"
#include "neurogame/oracles.hpp"
#include "neurogame/rng.hpp"

namespace neurogame {

TabularGame demo_game() {
  // mask bit 0 = "not", bit 1 = "good", bit 2 = "movie"
  return TabularGame(3, {0.0, 0.2, 0.5, 1.2, 0.4, 0.8, 1.0, 1.8});
}

Vector demo_fields() { return {0.423, 0.711, 0.512}; }

Matrix demo_couplings() {
  return Matrix::from_rows({{0.0, 0.466, 0.312}, {0.466, 0.0, 0.278}, {0.312, 0.278, 0.0}});
}

namespace {

std::string fmt(const Vector& v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

std::string fmt(double x, int precision) { return fmt(Vector{x}, precision); }

double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

DemoReport run_demo() {
  const TabularGame game = demo_game();
  constexpr double kGamma = 1.0;
  const int n = 3;

  // The example's three sampled coalitions with equal proposal probability.
  const std::array<Coalition, 3> sampled{Coalition::of(n, {1}), Coalition::of(n, {0, 2}),
                                         Coalition::of(n, {1, 2})};
  // Coalitions preceding "good" that the example pairs with each sample.
  const std::array<Coalition, 3> prefixes{Coalition(n), Coalition::of(n, {0, 2}),
                                          Coalition::of(n, {2})};
  // Contexts for the ("not", "good") second difference, as stated.
  const std::array<Coalition, 3> contexts{Coalition(n), Coalition::of(n, {2}), Coalition(n)};

  Vector values;
  Vector proposals(3, 1.0);
  Vector marginals;
  Vector deltas;
  for (std::size_t k = 0; k < 3; ++k) {
    values.push_back(game.value(sampled[k]));
    marginals.push_back(marginal_contribution(game, 1, prefixes[k]));
    deltas.push_back(pairwise_delta(game, 0, 1, contexts[k]));
  }
  const WeightedSampleBatch phi_batch = normalize_weights(values, proposals, marginals, kGamma);
  const WeightedSampleBatch j_batch = normalize_weights(values, proposals, deltas, kGamma);

  DemoReport r;
  r.stated_weights = {0.25, 0.34, 0.41};
  r.computed_weights = phi_batch.normalized_weights;
  r.stated_shapley_2 = 0.711;
  r.computed_shapley_2 = phi_batch.estimate();
  // Same coalitions and weights; only the interpretation differs.
  r.computed_banzhaf_2 = phi_batch.estimate();
  r.stated_interaction_12 = 0.466;
  r.computed_interaction_12 = j_batch.estimate();
  r.computed_field_2 =
      combine_fields(Vector{r.computed_shapley_2}, Vector{r.computed_banzhaf_2}, Vector{0.6})[0];

  const Vector fields = demo_fields();
  const Matrix couplings = demo_couplings();
  MeanFieldConfig undamped;
  undamped.gamma = kGamma;
  undamped.damping = 0.0;
  undamped.tolerance = 1e-6;
  undamped.max_iterations = 500;

  r.stated_iteration_1 = {0.400, 0.611, 0.471};
  r.computed_iteration_1 = mean_field_step(fields, couplings, Vector(3, 0.0), undamped);
  r.stated_iteration_2 = {0.693, 0.773, 0.668};
  r.computed_iteration_2 = mean_field_step(fields, couplings, r.computed_iteration_1, undamped);
  r.stated_final_spins = {0.721, 0.798, 0.703};
  r.stated_final_alphas = {0.861, 0.899, 0.852};
  r.alphas_from_stated_spins = spins_to_attention(r.stated_final_spins);
  r.fixed_point = solve_fixed_point(fields, couplings, undamped);
  r.exact = exact_spin_marginals(fields, couplings, kGamma);

  const ExactGameValues exact_values = exact_game_values(game);
  r.exact_shapley = exact_values.shapley;
  r.exact_banzhaf = exact_values.banzhaf;

  std::ostringstream os;
  os << "Worked example: tokens t1 \"not\", t2 \"good\", t3 \"movie\"; K = 3, gamma = 1\n"
     << "v: {t1}=0.2 {t2}=0.5 {t3}=0.4 {t1,t2}=1.2 {t1,t3}=0.8 {t2,t3}=1.0 {t1,t2,t3}=1.8\n"
     << "sampled coalitions: {t2} {t1,t3} {t2,t3}\n\n"
     << "normalized weights (stated):   " << fmt(r.stated_weights, 2) << "\n"
     << "normalized weights (computed): " << fmt(r.computed_weights, 4)
     << "   max |delta| " << fmt(max_abs_diff(r.stated_weights, r.computed_weights), 4) << "\n"
     << "φ̂₂ = " << fmt(r.stated_shapley_2, 3) << " (stated)   computed "
     << fmt(r.computed_shapley_2, 6) << "   delta " << fmt(r.computed_shapley_2 - r.stated_shapley_2, 6)
     << "\n"
     << "β̂₂ = " << fmt(r.stated_shapley_2, 3) << " (stated)   computed "
     << fmt(r.computed_banzhaf_2, 6) << "   delta " << fmt(r.computed_banzhaf_2 - r.stated_shapley_2, 6)
     << "\n"
     << "Ĵ₁₂ = " << fmt(r.stated_interaction_12, 3) << " (stated)   computed "
     << fmt(r.computed_interaction_12, 6) << "   delta "
     << fmt(r.computed_interaction_12 - r.stated_interaction_12, 6) << "\n"
     << "J₂ with λ₂ = 0.6: " << fmt(r.computed_field_2, 6) << "\n\n"
     << "fields J = " << fmt(fields, 3) << "; couplings J12=0.466 J13=0.312 J23=0.278\n"
     << "iteration-1 spins (stated):   " << fmt(r.stated_iteration_1, 3) << "\n"
     << "iteration-1 spins (computed): " << fmt(r.computed_iteration_1, 4) << "   max |delta| "
     << fmt(max_abs_diff(r.stated_iteration_1, r.computed_iteration_1), 4) << "\n"
     << "iteration-2 spins (stated):   " << fmt(r.stated_iteration_2, 3) << "\n"
     << "iteration-2 spins (computed): " << fmt(r.computed_iteration_2, 4) << "   max |delta| "
     << fmt(max_abs_diff(r.stated_iteration_2, r.computed_iteration_2), 4) << "\n"
     << "final spins (stated):         " << fmt(r.stated_final_spins, 3) << "\n"
     << "  final α (stated):           " << fmt(r.stated_final_alphas, 3) << "\n"
     << "  final α from stated spins:  " << fmt(r.alphas_from_stated_spins, 4) << "\n"
     << "undamped fixed point:         " << fmt(r.fixed_point.expected_spins, 4) << " after "
     << r.fixed_point.iterations_used << " iterations\n"
     << "  α at fixed point:           " << fmt(r.fixed_point.alphas, 4) << "\n"
     << "exact Gibbs marginals:        " << fmt(r.exact.expected_spins, 4) << "\n"
     << "  α from exact marginals:     " << fmt(r.exact.alphas, 4) << "\n\n"
     << "exact Shapley values:  " << fmt(r.exact_shapley, 4) << "\n"
     << "exact Banzhaf indices: " << fmt(r.exact_banzhaf, 4) << "\n";
  r.text = os.str();
  return r;
}

namespace {

Json meanfield_json(const MeanFieldResult& mf) {
  Json out;
  out["expected_spins"] = to_json(mf.expected_spins);
  out["alphas"] = to_json(mf.alphas);
  out["iterations_used"] = mf.iterations_used;
  out["final_residual"] = mf.final_residual;
  out["converged"] = mf.converged;
  out["coupling_operations"] = mf.coupling_operations;
  return out;
}

void append_trace(std::string* trace, std::size_t head, const MeanFieldResult& mf) {
  if (trace == nullptr) return;
  if (trace->empty()) *trace = "head,iteration,residual\n";
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t t = 0; t < mf.residual_trace.size(); ++t) {
    os << head << "," << (t + 1) << "," << mf.residual_trace[t] << "\n";
  }
  *trace += os.str();
}

Json header(const char* command, const InputDocument& doc, const RunConfig& cfg) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = command;
  out["config"] = to_json(cfg);
  out["n"] = doc.n;
  return out;
}

Vector gates_for(const InputDocument& doc, const RunConfig& cfg) {
  const auto n = static_cast<std::size_t>(doc.n);
  if (doc.lambdas) return *doc.lambdas;
  if (doc.embeddings) {
    const HeadParams head = make_head_params(doc, cfg).heads.front();
    Vector lambdas(n);
    for (std::size_t i = 0; i < n; ++i) {
      lambdas[i] = gate_lambda(doc.embeddings->row(i), head.gate_weights, head.gate_bias);
    }
    return lambdas;
  }
  return Vector(n, 0.5);
}

}  // namespace

Json run_oracle(const InputDocument& doc, const RunConfig& cfg, std::string* trace_csv) {
  cfg.validate();
  Json out = header("oracle", doc, cfg);
  Vector fields;
  Matrix couplings;
  if (doc.has_game()) {
    const std::unique_ptr<Game> game = make_game(doc);
    const ExactGameValues exact = exact_game_values(*game);
    out["shapley"] = to_json(exact.shapley);
    out["banzhaf"] = to_json(exact.banzhaf);
    out["interactions"] = to_json(exact.interactions);
    Json efficiency;
    double sum = 0.0;
    for (double phi : exact.shapley) sum += phi;
    efficiency["shapley_sum"] = sum;
    efficiency["grand_value"] = exact.grand_value;
    efficiency["gap"] = exact.efficiency_gap();
    out["efficiency"] = efficiency;
    if (doc.n <= 8) {
      double gap = 0.0;
      for (int i = 0; i < doc.n; ++i) {
        gap = std::max(gap, std::abs(exact_shapley_by_permutations(*game, i) -
                                     exact.shapley[static_cast<std::size_t>(i)]));
      }
      out["shapley_permutation_check"] = gap;
    }
    if (const auto* table = dynamic_cast<const TabularGame*>(game.get())) {
      out["monotonicity_violations"] = table->monotonicity_violations().size();
    }
    const TiltedGameValues tilted = exact_gibbs_tilted_values(*game, GibbsTarget(cfg.coalition_gamma));
    Json tilted_json;
    tilted_json["gamma"] = cfg.coalition_gamma;
    tilted_json["shapley_prefix"] = to_json(tilted.shapley_prefix);
    tilted_json["banzhaf"] = to_json(tilted.banzhaf);
    tilted_json["interactions"] = to_json(tilted.interactions);
    out["gibbs_tilted"] = tilted_json;

    const Vector lambdas = gates_for(doc, cfg);
    out["lambdas"] = to_json(lambdas);
    if (doc.fields) {
      fields = *doc.fields;
      couplings = *doc.couplings;
    } else {
      const NormalizedScores phi = normalize_scores(exact.shapley, cfg.normalization);
      const NormalizedScores beta = normalize_scores(exact.banzhaf, cfg.normalization);
      out["normalization_warning"] = phi.conventions_differ || beta.conventions_differ;
      fields = combine_fields(phi.values, beta.values, lambdas);
      couplings = exact.interactions;
    }
  } else {
    fields = *doc.fields;
    couplings = *doc.couplings;
  }
  out["fields"] = to_json(fields);
  out["couplings"] = to_json(couplings);

  const ExactSpinMarginals spins = exact_spin_marginals(fields, couplings, cfg.spin_gamma);
  Json spins_json;
  spins_json["gamma"] = cfg.spin_gamma;
  spins_json["expected_spins"] = to_json(spins.expected_spins);
  spins_json["alphas"] = to_json(spins.alphas);
  spins_json["log_partition"] = spins.log_partition;
  spins_json["expected_active_count"] = spins.expected_active_count;
  out["spin_marginals"] = spins_json;

  const MeanFieldResult mf = solve_fixed_point(fields, couplings, meanfield_config(cfg));
  out["meanfield"] = meanfield_json(mf);
  append_trace(trace_csv, 0, mf);
  return out;
}

Json run_estimate(const InputDocument& doc, const RunConfig& cfg) {
  cfg.validate();
  const std::unique_ptr<Game> game = make_game(doc);
  const EstimatorConfig est_cfg = estimator_config(cfg, cfg.seed);
  const EstimatedGameValues est = estimate_all(*game, est_cfg);
  Json out = header("estimate", doc, cfg);
  out["shapley_hat"] = to_json(est.shapley_hat);
  out["banzhaf_hat"] = to_json(est.banzhaf_hat);
  out["interactions_hat"] = to_json(est.interactions_hat);
  out["shapley_standard_error"] = to_json(est.shapley_se);
  out["banzhaf_standard_error"] = to_json(est.banzhaf_se);
  out["interactions_standard_error"] = to_json(est.interactions_se);
  out["shapley_effective_sample_size"] = to_json(est.shapley_ess);
  out["banzhaf_effective_sample_size"] = to_json(est.banzhaf_ess);
  out["interactions_effective_sample_size"] = to_json(est.interactions_ess);
  out["evaluations"] = est.evaluations;
  out["expected_evaluations"] = expected_evaluation_count(doc.n, cfg.samples);
  return out;
}

Json run_attend(const InputDocument& doc, const RunConfig& cfg, std::string* trace_csv) {
  cfg.validate();
  Json out = header("attend", doc, cfg);
  std::vector<HeadOutput> heads;
  Vector output;
  bool has_output = false;

  if (doc.embeddings) {
    const MultiHeadParams params = make_head_params(doc, cfg);
    if (doc.fields) {
      Vector concat;
      for (const HeadParams& head : params.heads) {
        const EmbeddingGame game(*doc.embeddings, head.value_projection, head.nonlinearity);
        heads.push_back(attend_fields(*doc.fields, *doc.couplings, game.projected_values(), head.meanfield));
        concat.insert(concat.end(), heads.back().z.begin(), heads.back().z.end());
      }
      output = dense_vecmat(concat, params.output_projection);
    } else {
      AttentionOutput result = multi_head_attend(*doc.embeddings, params);
      heads = std::move(result.heads);
      output = std::move(result.output);
    }
    has_output = true;
  } else if (doc.fields) {
    heads.push_back(attend_fields(*doc.fields, *doc.couplings, Matrix(), meanfield_config(cfg)));
  } else {
    const std::unique_ptr<Game> game = make_game(doc);
    HeadParams head;
    head.estimator = estimator_config(cfg, derive_stream_key(cfg.seed, StreamKind::head, 0));
    head.meanfield = meanfield_config(cfg);
    head.normalization = cfg.normalization;
    head.source = cfg.source;
    heads.push_back(attend_game(*game, Matrix(), gates_for(doc, cfg), head));
  }

  out["output"] = has_output ? to_json(output) : Json(nullptr);
  Json heads_json = Json::array();
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const HeadOutput& head = heads[h];
    Json hj;
    hj["alphas"] = to_json(head.alphas);
    hj["alpha_sum"] = head.alpha_sum;
    hj["z"] = has_output ? to_json(head.z) : Json(nullptr);
    if (!head.lambdas.empty()) {
      hj["lambdas"] = to_json(head.lambdas);
      hj["shapley"] = to_json(head.shapley);
      hj["banzhaf"] = to_json(head.banzhaf);
      hj["normalization_warning"] = head.normalization_warning;
      hj["evaluations"] = head.evaluations;
    }
    hj["fields"] = to_json(head.fields);
    hj["couplings"] = to_json(head.interactions);
    hj["meanfield"] = meanfield_json(head.meanfield);
    heads_json.push_back(std::move(hj));
    append_trace(trace_csv, h, head.meanfield);
  }
  out["head_outputs"] = std::move(heads_json);
  if (heads.size() == 1) {
    // Lets a single-head report be fed back in as a solver-only input.
    out["fields"] = to_json(heads.front().fields);
    out["couplings"] = to_json(heads.front().interactions);
  }
  return out;
}

bool BenchReport::counts_match() const {
  for (const BenchRow& row : rows) {
    if (row.evaluations != row.expected_evaluations) return false;
    const auto n = static_cast<std::uint64_t>(row.n);
    if (row.coupling_operations != n * n * static_cast<std::uint64_t>(row.mf_iterations)) {
      return false;
    }
  }
  return true;
}

std::string BenchReport::csv() const {
  std::ostringstream os;
  os << "n,K,evaluations,expected_evaluations,estimate_seconds,mf_iterations,"
        "coupling_operations,coupling_operations_per_iteration,meanfield_seconds\n";
  for (const BenchRow& r : rows) {
    os << r.n << "," << r.samples << "," << r.evaluations << "," << r.expected_evaluations << ","
       << std::setprecision(6) << r.estimate_seconds << "," << r.mf_iterations << ","
       << r.coupling_operations << ","
       << (r.mf_iterations ? r.coupling_operations / static_cast<std::uint64_t>(r.mf_iterations) : 0)
       << "," << r.meanfield_seconds << "\n";
  }
  return os.str();
}

BenchReport run_bench(const RunConfig& cfg, const BenchOptions& options) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  const auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  const auto start = Clock::now();
  BenchReport report;
  for (int n : options.sizes) {
    const auto un = static_cast<std::size_t>(n);
    const auto ud = static_cast<std::size_t>(options.dim);
    CounterStream stream(derive_stream_key(cfg.seed, StreamKind::synthetic,
                                           static_cast<std::uint64_t>(n)));
    Matrix embeddings(un, ud);
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t k = 0; k < ud; ++k) embeddings(i, k) = 2.0 * stream.uniform() - 1.0;
    }
    const EmbeddingGame game(embeddings, Matrix::identity(ud));

    Vector fields(un);
    Matrix couplings(un, un);
    for (std::size_t i = 0; i < un; ++i) {
      fields[i] = 2.0 * stream.uniform() - 1.0;
      for (std::size_t j = i + 1; j < un; ++j) {
        couplings(i, j) = couplings(j, i) = (stream.uniform() - 0.5) / static_cast<double>(n);
      }
    }
    MeanFieldConfig mf_cfg = meanfield_config(cfg);
    // Run all T iterations so the operation count is comparable across n.
    mf_cfg.tolerance = std::numeric_limits<double>::denorm_min();
    const auto mf_start = Clock::now();
    const MeanFieldResult mf = solve_fixed_point(fields, couplings, mf_cfg);
    const double mf_seconds = seconds_since(mf_start);

    for (std::size_t k : options.samples) {
      RunConfig run = cfg;
      run.samples = k;
      const auto t0 = Clock::now();
      const EstimatedGameValues est = estimate_all(game, estimator_config(run, cfg.seed));
      BenchRow row;
      row.n = n;
      row.samples = k;
      row.evaluations = est.evaluations;
      row.expected_evaluations = expected_evaluation_count(n, k);
      row.estimate_seconds = seconds_since(t0);
      row.mf_iterations = mf.iterations_used;
      row.coupling_operations = mf.coupling_operations;
      row.meanfield_seconds = mf_seconds;
      report.rows.push_back(row);
    }
  }
  report.total_seconds = seconds_since(start);
  return report;
}

}  // namespace neurogame
