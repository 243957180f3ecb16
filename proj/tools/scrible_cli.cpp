// scrible: experiments, sweeps, property checks and the lower-bound demo.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 verify failure,
// 3 any other runtime error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "scrible/harness/config.hpp"
#include "scrible/harness/experiment.hpp"
#include "scrible/harness/lowerbound.hpp"
#include "scrible/harness/plot.hpp"
#include "scrible/harness/verify.hpp"

namespace {

using namespace scrible;
using namespace scrible::harness;

constexpr int kExitConfig = 1;
constexpr int kExitVerify = 2;
constexpr int kExitRuntime = 3;

ExperimentConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                     const std::optional<std::string>& out_dir) {
  ExperimentConfig base;
  if (const char* env = std::getenv("SCRIBLE_OUT_DIR"); env && *env) base.out_dir = env;
  ExperimentConfig c = load_config(path, base);
  if (seed) c.master_seed = *seed;
  if (out_dir) c.out_dir = *out_dir;
  validate(c);
  return c;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << w << "\n";
}

void print_summary(const ExperimentResult& res) {
  for (const AlgorithmSummary& s : res.summaries) {
    std::cout << s.algorithm << ": mean regret " << fmt_double(s.mean) << ", median " << fmt_double(s.median)
              << ", max " << fmt_double(s.max) << " over " << s.final_regrets.size() << " reps (delta "
              << fmt_double(s.delta) << ", eta " << fmt_double(s.eta) << ")\n";
  }
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out_dir) {
  const ExperimentConfig c = load_with_overrides(path, seed, out_dir);
  ExperimentResult res;
  const RunArtifacts a = run_experiment(c, &res);
  print_warnings(res.resolved.warnings);
  print_summary(res);
  std::cout << "wrote " << a.trajectory_csv.string() << "\n"
            << "wrote " << a.summary_json.string() << "\n"
            << "wrote " << a.plot_svg.string() << "\n"
            << "wrote " << a.resolved_config.string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& path, const std::vector<double>& epsilons, const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& out_dir) {
  const ExperimentConfig c = load_with_overrides(path, seed, out_dir);
  std::vector<SweepPoint> points;
  const SweepArtifacts a = sweep(c, epsilons, &points);
  if (!points.empty()) print_warnings(points.front().result.resolved.warnings);
  for (const SweepPoint& p : points) {
    std::cout << "epsilon " << fmt_double(p.epsilon) << " (C = " << fmt_double(p.result.resolved.C) << ")\n";
    print_summary(p.result);
  }
  std::cout << "wrote " << a.table_csv.string() << "\n"
            << "wrote " << a.table_json.string() << "\n"
            << "wrote " << a.plot_svg.string() << "\n";
  return 0;
}

int cmd_verify(const std::vector<std::string>& suite) {
  const std::vector<CheckResult> results = verify(suite);
  bool all = true;
  for (const CheckResult& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  samples=" << r.samples
              << "  worst_margin=" << r.worst_margin << "  " << r.detail << "\n";
    all = all && r.passed;
  }
  return all ? 0 : kExitVerify;
}

int cmd_lowerbound(double epsilon, int T, int d, double D, const std::string& algorithm, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw ConfigError("--epsilon must be > 0");
  if (algorithm != kAlgorithm1 && algorithm != kBaseline) throw ConfigError("unknown algorithm '" + algorithm + "'");
  const Domain K = Domain::ball(d, D);
  const double delta = algorithm == kBaseline ? 0.0 : delta_policy(epsilon * T, T).delta;
  const LowerBoundReport r = lowerbound_demo(epsilon, make_learner_config(K, T, delta), seed);
  std::cout << "algorithm " << algorithm << ", epsilon " << fmt_double(epsilon) << ", T " << T << "\n"
            << "gap f(x_hat) - f(z) = " << fmt_double(r.gap) << "\n"
            << "budget C = epsilon T = " << fmt_double(r.C) << "\n"
            << "regret floor 2C = " << fmt_double(r.floor) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shrunk-domain SCRiBLe experiments for approximately linear bandit losses"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  auto* run = app.add_subcommand("run", "Run one experiment from a config file");
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override master_seed");
  run->add_option("--out-dir", out_dir, "Override out_dir (default: config, then $SCRIBLE_OUT_DIR, then ./out)");

  std::vector<double> epsilons;
  auto* sw = app.add_subcommand("sweep", "Run the experiment once per epsilon value");
  sw->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  sw->add_option("--epsilons", epsilons, "Comma-separated epsilon values")->required()->delimiter(',');
  sw->add_option("--seed", seed, "Override master_seed");
  sw->add_option("--out-dir", out_dir, "Override out_dir");

  std::vector<std::string> suite;
  auto* ver = app.add_subcommand("verify", "Run the property checks");
  ver->add_option("--suite", suite, "Comma-separated check names (default: all)")->delimiter(',');

  double epsilon = 0.0;
  int T = 1000, d = 5;
  double D = 5.0;
  std::string algorithm = kAlgorithm1;
  std::uint64_t lb_seed = 1;
  auto* lb = app.add_subcommand("lowerbound", "Black-box lower-bound demonstration");
  lb->add_option("--epsilon", epsilon, "Answer magnitude of the adversary")->required();
  lb->add_option("--T", T, "Number of queries")->required()->check(CLI::PositiveNumber);
  lb->add_option("--d", d, "Dimension")->check(CLI::PositiveNumber);
  lb->add_option("--D", D, "Ball radius")->check(CLI::Range(1.0, 1e12));
  lb->add_option("--algorithm", algorithm, "algorithm1 or scrible_baseline");
  lb->add_option("--seed", lb_seed, "Seed");

  std::string plot_from, plot_out;
  auto* plot = app.add_subcommand("plot", "Render the SVG from sweep or run artifacts");
  plot->add_option("--from", plot_from, "sweep.json, summary.json or a directory containing one")->required();
  plot->add_option("--out", plot_out, "Output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, seed, out_dir);
    if (*sw) return cmd_sweep(config_path, epsilons, seed, out_dir);
    if (*ver) return cmd_verify(suite);
    if (*lb) return cmd_lowerbound(epsilon, T, d, D, algorithm, lb_seed);
    if (*plot) {
      const auto written = emit_plot(plot_from, plot_out);
      std::cout << "wrote " << written.string() << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
