#include <memory>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neurogame/attention.hpp"
#include "neurogame/errors.hpp"
#include "neurogame/estimators.hpp"
#include "neurogame/game.hpp"
#include "neurogame/harness.hpp"
#include "neurogame/io.hpp"
#include "neurogame/meanfield.hpp"
#include "neurogame/oracles.hpp"

namespace py = pybind11;
using namespace neurogame;

namespace {

using Rows = std::vector<Vector>;

py::dict meanfield_dict(const MeanFieldResult& mf) {
  py::dict d;
  d["expected_spins"] = mf.expected_spins;
  d["alphas"] = mf.alphas;
  d["iterations_used"] = mf.iterations_used;
  d["final_residual"] = mf.final_residual;
  d["converged"] = mf.converged;
  d["residual_trace"] = mf.residual_trace;
  d["coupling_operations"] = mf.coupling_operations;
  return d;
}

std::string run_command(const std::string& command, const std::string& input_json,
                        const std::string& config_json) {
  const InputDocument doc = parse_input(Json::parse(input_json));
  const RunConfig cfg = config_json.empty() ? RunConfig{} : parse_config(Json::parse(config_json));
  if (command == "oracle") return dump_json(run_oracle(doc, cfg));
  if (command == "estimate") return dump_json(run_estimate(doc, cfg));
  if (command == "attend") return dump_json(run_attend(doc, cfg));
  throw InputError("unknown command '" + command + "' (expected oracle, estimate or attend)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Game-theoretic attention core";

  py::register_exception<LimitError>(m, "LimitError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Game, std::shared_ptr<Game>>(m, "Game")
      .def_property_readonly("n", &Game::token_count)
      .def("value", [](const Game& g, const std::vector<int>& members) {
        Coalition c(g.token_count());
        for (int i : members) {
          if (i < 0 || i >= g.token_count()) throw py::index_error("token index out of range");
          c = c.with(i);
        }
        return g.value(c);
      });

  py::class_<TabularGame, Game, std::shared_ptr<TabularGame>>(m, "TabularGame")
      .def(py::init([](int n, std::vector<double> table) {
             return std::make_shared<TabularGame>(n, std::move(table));
           }),
           py::arg("n"), py::arg("table"));

  py::class_<EmbeddingGame, Game, std::shared_ptr<EmbeddingGame>>(m, "EmbeddingGame")
      .def(py::init([](const Rows& embeddings, const Rows& value_projection,
                       const std::string& nonlinearity) {
             return std::make_shared<EmbeddingGame>(Matrix::from_rows(embeddings),
                                                    Matrix::from_rows(value_projection),
                                                    parse_nonlinearity(nonlinearity));
           }),
           py::arg("embeddings"), py::arg("value_projection"), py::arg("nonlinearity") = "relu");

  m.def(
      "exact_values",
      [](const Game& game) {
        const ExactGameValues v = exact_game_values(game);
        py::dict d;
        d["shapley"] = v.shapley;
        d["banzhaf"] = v.banzhaf;
        d["interactions"] = v.interactions.to_rows();
        d["grand_value"] = v.grand_value;
        return d;
      },
      py::arg("game"));

  m.def(
      "gibbs_tilted_values",
      [](const Game& game, double gamma) {
        const TiltedGameValues v = exact_gibbs_tilted_values(game, GibbsTarget(gamma));
        py::dict d;
        d["shapley_prefix"] = v.shapley_prefix;
        d["banzhaf"] = v.banzhaf;
        d["interactions"] = v.interactions.to_rows();
        return d;
      },
      py::arg("game"), py::arg("gamma"));

  m.def(
      "estimate",
      [](const Game& game, std::size_t samples, std::uint64_t seed, double gamma,
         const std::string& mode, int threads) {
        EstimatorConfig cfg;
        cfg.sample_count = samples;
        cfg.seed = seed;
        cfg.gamma = gamma;
        cfg.mode = parse_estimator_mode(mode);
        cfg.threads = threads;
        EstimatedGameValues v;
        {
          py::gil_scoped_release release;
          v = estimate_all(game, cfg);
        }
        py::dict d;
        d["shapley"] = v.shapley_hat;
        d["banzhaf"] = v.banzhaf_hat;
        d["interactions"] = v.interactions_hat.to_rows();
        d["shapley_standard_error"] = v.shapley_se;
        d["banzhaf_standard_error"] = v.banzhaf_se;
        d["shapley_effective_sample_size"] = v.shapley_ess;
        d["evaluations"] = v.evaluations;
        return d;
      },
      py::arg("game"), py::arg("samples") = 25, py::arg("seed") = 0, py::arg("gamma") = 0.25,
      py::arg("mode") = "gibbs", py::arg("threads") = 1);

  m.def(
      "solve_mean_field",
      [](const Vector& fields, const Rows& couplings, double gamma, int max_iterations,
         double tolerance, double damping) {
        MeanFieldConfig cfg;
        cfg.gamma = gamma;
        cfg.max_iterations = max_iterations;
        cfg.tolerance = tolerance;
        cfg.damping = damping;
        return meanfield_dict(solve_fixed_point(fields, Matrix::from_rows(couplings), cfg));
      },
      py::arg("fields"), py::arg("couplings"), py::arg("gamma") = 0.25,
      py::arg("max_iterations") = 25, py::arg("tolerance") = 1e-4, py::arg("damping") = 0.7);

  m.def(
      "spin_marginals",
      [](const Vector& fields, const Rows& couplings, double gamma) {
        const ExactSpinMarginals s = exact_spin_marginals(fields, Matrix::from_rows(couplings), gamma);
        py::dict d;
        d["expected_spins"] = s.expected_spins;
        d["alphas"] = s.alphas;
        d["log_partition"] = s.log_partition;
        return d;
      },
      py::arg("fields"), py::arg("couplings"), py::arg("gamma"));

  m.def("run", &run_command, py::arg("command"), py::arg("input_json"),
        py::arg("config_json") = "",
        "Run oracle, estimate or attend on JSON documents; returns the JSON report.");

  m.def("demo", [] { return run_demo().text; });
  m.attr("schema_version") = kSchemaVersion;
}
