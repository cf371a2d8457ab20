#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neurogame/errors.hpp"
#include "neurogame/harness.hpp"
#include "neurogame/io.hpp"
#include "neurogame/parallel.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputError = 2,
  kLimitRefusal = 3,
  kInternalError = 4,
};

struct Options {
  std::string input;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string out;
  std::string trace;
  std::string threads;
  std::vector<int> sizes;
  std::vector<std::size_t> samples;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw neurogame::InputError("cannot open output file '" + path + "'");
  os << text;
  if (!os) throw neurogame::InputError("failed writing output file '" + path + "'");
}

neurogame::RunConfig resolve_config(const Options& opt) {
  neurogame::RunConfig cfg;
  if (!opt.config.empty()) cfg = neurogame::load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.mode.empty()) cfg.mode = neurogame::parse_estimator_mode(opt.mode);
  if (!opt.threads.empty()) {
    if (opt.threads == "auto") {
      cfg.threads = 0;
    } else {
      int n = 0;
      try {
        std::size_t used = 0;
        n = std::stoi(opt.threads, &used);
        if (used != opt.threads.size()) n = 0;
      } catch (const std::exception&) {
        n = 0;
      }
      if (n < 1) throw neurogame::InputError("--threads: expected a positive integer or 'auto'");
      cfg.threads = n;
    }
  }
  cfg.validate();
  return cfg;
}

neurogame::InputDocument require_input(const Options& opt) {
  if (opt.input.empty()) throw neurogame::InputError("--input is required for this subcommand");
  return neurogame::load_input(opt.input);
}

void warn_normalization(const neurogame::Json& report) {
  bool flagged = report.value("normalization_warning", false);
  if (report.contains("head_outputs")) {
    for (const auto& head : report["head_outputs"]) flagged |= head.value("normalization_warning", false);
  }
  if (flagged) {
    std::cerr << "warning: scores have mixed signs; L1 and signed-sum normalization disagree\n";
  }
}

int run(const std::string& command, const Options& opt) {
  using namespace neurogame;
  if (command == "demo") {
    write_text(opt.out, run_demo().text);
    return kOk;
  }
  const RunConfig cfg = resolve_config(opt);
  if (command == "bench") {
    BenchOptions bench;
    if (!opt.sizes.empty()) bench.sizes = opt.sizes;
    if (!opt.samples.empty()) bench.samples = opt.samples;
    for (int n : bench.sizes) {
      if (n < 1 || n > 64) throw InputError("--sizes: token counts must lie in [1, 64]");
    }
    for (std::size_t k : bench.samples) {
      if (k < 1) throw InputError("--samples: sample counts must be at least 1");
    }
    const BenchReport report = run_bench(cfg, bench);
    write_text(opt.out, report.csv());
    std::cerr << "bench: " << report.rows.size() << " rows in " << report.total_seconds
              << " s; operation counts " << (report.counts_match() ? "match" : "DO NOT match")
              << " 2Kn(n+1) evaluations and n^2 coupling operations per iteration\n";
    return report.counts_match() ? kOk : kInternalError;
  }

  const InputDocument doc = require_input(opt);
  std::string trace;
  Json report;
  if (command == "oracle") {
    report = run_oracle(doc, cfg, opt.trace.empty() ? nullptr : &trace);
  } else if (command == "estimate") {
    report = run_estimate(doc, cfg);
  } else {
    report = run_attend(doc, cfg, opt.trace.empty() ? nullptr : &trace);
  }
  warn_normalization(report);
  write_text(opt.out, dump_json(report));
  if (!opt.trace.empty()) write_text(opt.trace, trace);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game-theoretic attention: coalition values, spin fields and mean-field attention weights"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&opt](CLI::App* sub, bool with_input) {
    if (with_input) sub->add_option("--input", opt.input, "Input document (JSON)");
    sub->add_option("--config", opt.config, "Run configuration (JSON)");
    sub->add_option("--seed", opt.seed, "Master seed (unsigned 64-bit)");
    sub->add_option("--mode", opt.mode, "Estimator weighting")->check(CLI::IsMember({"gibbs", "classic"}));
    sub->add_option("--out", opt.out, "Output path (default: stdout)");
    sub->add_option("--threads", opt.threads,
                    std::string("Worker hint: N or auto (auto reads ") + neurogame::kThreadsEnvVar + ")");
  };

  CLI::App* demo = app.add_subcommand("demo", "Replay the three-token worked example");
  demo->add_option("--out", opt.out, "Output path (default: stdout)");
  CLI::App* oracle = app.add_subcommand("oracle", "Exact values by enumeration (small n)");
  add_common(oracle, true);
  oracle->add_option("--trace", opt.trace, "Mean-field convergence trace (CSV)");
  CLI::App* estimate = app.add_subcommand("estimate", "Monte Carlo Shapley, Banzhaf and interaction estimates");
  add_common(estimate, true);
  CLI::App* attend = app.add_subcommand("attend", "Full attention pipeline");
  add_common(attend, true);
  attend->add_option("--trace", opt.trace, "Mean-field convergence trace (CSV)");
  CLI::App* bench = app.add_subcommand("bench", "Operation-count and timing sweep (CSV)");
  add_common(bench, false);
  bench->add_option("--sizes", opt.sizes, "Token counts to sweep")->delimiter(',');
  bench->add_option("--samples", opt.samples, "Sample counts K to sweep")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const neurogame::LimitError& e) {
    std::cerr << "limit refused: " << e.what() << "\n";
    return kLimitRefusal;
  } catch (const neurogame::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
