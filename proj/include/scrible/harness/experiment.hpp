#ifndef SCRIBLE_HARNESS_EXPERIMENT_HPP
#define SCRIBLE_HARNESS_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "scrible/adversary.hpp"
#include "scrible/harness/config.hpp"
#include "scrible/harness/plot.hpp"
#include "scrible/learner.hpp"
#include "scrible/regret.hpp"

namespace scrible::harness {

namespace fs = std::filesystem;

/// Config with every "auto" value decided.
struct ResolvedExperiment {
  ExperimentConfig config;
  Domain domain = Domain::ball(1, 1.0);
  double C = 0.0;
  DeltaChoice delta_choice{0.0, false, std::nullopt};
  /// D used in the bound formulas: ball radius, box diameter.
  double bound_D = 0.0;
  std::vector<std::string> warnings;
  std::string hash;
};

inline Domain make_domain(const ExperimentConfig& c) {
  if (c.domain == "ball") return Domain::ball(c.d, c.D);
  if (c.halfwidths.empty()) return Domain::cube(c.d, c.D);
  if (c.halfwidths.size() == 1) return Domain::cube(c.d, c.halfwidths.front());
  return Domain::box(Eigen::Map<const Vector>(c.halfwidths.data(), static_cast<Eigen::Index>(c.halfwidths.size())));
}

/// C = T (epsilon + |offset|) for a sinusoidal schedule with epsilon > 0, the
/// spike total for spikes, 0 otherwise.
inline double auto_budget(const ExperimentConfig& c) {
  if (c.perturbation == "sinusoidal")
    return c.epsilon > 0.0 ? c.T * std::abs(c.offset) + c.T * c.epsilon : 0.0;
  if (c.perturbation == "spikes") {
    double s = 0.0;
    for (const auto& [t, m] : c.spikes) s += std::abs(m);
    return s;
  }
  return 0.0;
}

inline ResolvedExperiment resolve(const ExperimentConfig& c) {
  validate(c);
  ResolvedExperiment r;
  r.config = c;
  r.domain = make_domain(c);
  r.C = c.C.value_or(auto_budget(c));
  if (auto w = check_regime(r.C, c.T, c.allow_regime_violation)) r.warnings.push_back(*w);
  if (c.delta) {
    r.delta_choice = {*c.delta, false, std::nullopt};
  } else {
    r.delta_choice = delta_policy(r.C, c.T);
    if (r.delta_choice.warning) r.warnings.push_back("warning: " + *r.delta_choice.warning);
  }
  r.bound_D = r.domain.is_ball() ? r.domain.radius() : r.domain.diameter();
  r.hash = config_hash(c);
  return r;
}

inline LearnerConfig learner_config_for(const ResolvedExperiment& r, const std::string& algorithm) {
  const double delta = algorithm == kBaseline ? 0.0 : r.delta_choice.delta;
  LearnerConfig cfg = std::holds_alternative<EtaPreset>(r.config.eta)
                          ? make_learner_config(r.domain, r.config.T, delta, std::get<EtaPreset>(r.config.eta))
                          : make_learner_config(r.domain, r.config.T, delta);
  if (const double* e = std::get_if<double>(&r.config.eta)) cfg.eta = *e;
  cfg.verify_lemma4 = r.config.verify_lemma4;
  cfg.validate();
  return cfg;
}

struct StepStats {
  int rounds = 0;
  /// Rounds with |x_{t+1} - x_t|_{x_t} < 4 d eta.
  int within = 0;
  /// Rounds over the bound with |f_t| <= 1.
  int violations = 0;
  /// Rounds over the bound with |f_t| > 1 (outside the guarantee; warnings).
  int excused = 0;
  double max_ratio = 0.0;
  /// Largest step / bound over rounds with |f_t| <= 1.
  double max_ratio_covered = 0.0;

  double fraction_within() const { return rounds ? static_cast<double>(within) / rounds : 1.0; }
  /// Fraction within the bound among rounds the guarantee covers.
  double fraction_within_covered() const {
    const int covered = rounds - excused;
    return covered ? static_cast<double>(covered - violations) / covered : 1.0;
  }
};

inline StepStats step_stats(const std::vector<RoundRecord>& records, double bound) {
  StepStats s;
  for (const RoundRecord& r : records) {
    ++s.rounds;
    s.max_ratio = std::max(s.max_ratio, r.step_local_norm / bound);
    if (std::abs(r.loss) <= 1.0) s.max_ratio_covered = std::max(s.max_ratio_covered, r.step_local_norm / bound);
    if (r.step_local_norm < bound) ++s.within;
    else if (std::abs(r.loss) <= 1.0) ++s.violations;
    else ++s.excused;
  }
  return s;
}

struct EpisodeResult {
  std::string algorithm;
  int rep = 0;
  double eta = 0.0;
  double delta = 0.0;
  std::vector<RoundRecord> records;
  RegretReport report;
  int budget_clips = 0;
  int cap_clips = 0;
  StepStats steps;
};

/// Paired streams: rep r uses fork(r) of the master stream; child 1 draws the
/// losses (and the perturbation direction), child 2 the learner's directions.
struct EpisodeStreams {
  RngStream losses;
  RngStream actions;
};

inline EpisodeStreams episode_streams(std::uint64_t master_seed, int rep) {
  const RngStream rep_stream = fork_stream(RngStream(master_seed), static_cast<std::uint64_t>(rep));
  return {fork_stream(rep_stream, 1), fork_stream(rep_stream, 2)};
}

inline PerturbationSchedule make_schedule(const ResolvedExperiment& r, RngStream& loss_rng) {
  const ExperimentConfig& c = r.config;
  PerturbationSchedule s;
  s.budget = r.C;
  s.sigma_cap = c.sigma_cap;
  if (c.perturbation == "sinusoidal") {
    Sinusoidal k;
    k.epsilon = c.epsilon;
    k.direction = sample_unit_sphere(loss_rng, c.d);
    k.offset = c.offset;
    k.boundary_threshold = c.boundary_threshold;
    s.kind = k;
  } else if (c.perturbation == "spikes") {
    s.kind = SpikeList{c.spikes};
  }
  return s;
}

inline EpisodeResult run_single_episode(const ResolvedExperiment& r, const std::string& algorithm, int rep) {
  const ExperimentConfig& c = r.config;
  EpisodeStreams streams = episode_streams(c.master_seed, rep);
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(streams.losses, c.T, c.d, c.G));
  LossOracle oracle(seq, make_schedule(r, streams.losses), r.domain);
  const LearnerConfig lc = learner_config_for(r, algorithm);

  EpisodeResult out;
  out.algorithm = algorithm;
  out.rep = rep;
  out.eta = lc.eta;
  out.delta = lc.delta;
  try {
    out.records = run_episode(lc, oracle, streams.actions);
  } catch (const Error& e) {
    throw Error(algorithm + " rep " + std::to_string(rep) + ": " + e.what());
  }
  out.report = compute_regret(out.records, *seq, linear_comparator(r.domain, theta_sum(*seq, c.T)));
  out.budget_clips = oracle.accountant().clip_count();
  out.cap_clips = oracle.cap_clip_count();
  out.steps = step_stats(out.records, 4.0 * c.d * lc.eta);
  return out;
}

struct AlgorithmSummary {
  std::string algorithm;
  double eta = 0.0;
  double delta = 0.0;
  std::vector<double> final_regrets;
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
  double max_budget_used = 0.0;
  int budget_clips = 0;
  int cap_clips = 0;
  StepStats steps;
  std::optional<double> expected_bound;
  std::optional<double> highprob_bound;
  std::vector<std::string> bound_errors;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct ExperimentResult {
  ResolvedExperiment resolved;
  /// Sorted by (algorithm, rep).
  std::vector<EpisodeResult> episodes;
  std::vector<AlgorithmSummary> summaries;

  const AlgorithmSummary& summary(const std::string& algorithm) const {
    for (const auto& s : summaries)
      if (s.algorithm == algorithm) return s;
    throw ConfigError("no results for algorithm '" + algorithm + "'");
  }
};

inline AlgorithmSummary summarize(const ResolvedExperiment& r, const std::string& algorithm,
                                  const std::vector<EpisodeResult>& episodes) {
  AlgorithmSummary s;
  s.algorithm = algorithm;
  for (const EpisodeResult& e : episodes) {
    if (e.algorithm != algorithm) continue;
    s.eta = e.eta;
    s.delta = e.delta;
    s.final_regrets.push_back(e.report.final_regret());
    s.max_budget_used = std::max(s.max_budget_used, e.report.budget_used);
    s.budget_clips += e.budget_clips;
    s.cap_clips += e.cap_clips;
    s.steps.rounds += e.steps.rounds;
    s.steps.within += e.steps.within;
    s.steps.violations += e.steps.violations;
    s.steps.excused += e.steps.excused;
    s.steps.max_ratio = std::max(s.steps.max_ratio, e.steps.max_ratio);
    s.steps.max_ratio_covered = std::max(s.steps.max_ratio_covered, e.steps.max_ratio_covered);
  }
  if (!s.final_regrets.empty()) {
    s.mean = std::accumulate(s.final_regrets.begin(), s.final_regrets.end(), 0.0) / s.final_regrets.size();
    s.median = median_of(s.final_regrets);
    s.max = *std::max_element(s.final_regrets.begin(), s.final_regrets.end());
  }
  BoundInputs in;
  in.d = r.config.d;
  in.T = r.config.T;
  in.nu = Barrier(r.domain).nu();
  in.delta = s.delta > 0.0 ? s.delta : eta_delta(0.0, r.config.T);
  in.C = r.C;
  in.G = r.config.G;
  in.D = r.bound_D;
  in.gamma = r.config.gamma;
  in.eta = s.eta;
  try {
    s.expected_bound = expected_bound(in);
  } catch (const ConfigError& e) {
    s.bound_errors.push_back(std::string("expected_bound: ") + e.what());
  }
  try {
    s.highprob_bound = highprob_bound(in);
  } catch (const ConfigError& e) {
    s.bound_errors.push_back(std::string("highprob_bound: ") + e.what());
  }
  return s;
}

/// Runs reps episodes per algorithm. Episodes are independent and run in order.
inline ExperimentResult run_experiment_in_memory(const ExperimentConfig& config) {
  ExperimentResult res;
  res.resolved = resolve(config);
  std::vector<std::string> algs = config.algorithms;
  std::sort(algs.begin(), algs.end());
  for (const auto& a : algs)
    for (int rep = 0; rep < config.reps; ++rep) res.episodes.push_back(run_single_episode(res.resolved, a, rep));
  for (const auto& a : algs) res.summaries.push_back(summarize(res.resolved, a, res.episodes));
  return res;
}

struct RunArtifacts {
  fs::path trajectory_csv;
  fs::path summary_json;
  fs::path plot_svg;
  fs::path resolved_config;
};

inline std::string provenance_line(const ResolvedExperiment& r) {
  return "# master_seed=" + std::to_string(r.config.master_seed) + " config_hash=" + r.hash;
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw Error("write to '" + path.string() + "' failed");
}

inline std::string trajectory_csv(const ExperimentResult& res) {
  std::string s = provenance_line(res.resolved) + "\n";
  s += "run_id,algorithm,rep,t,loss,cum_loss,regret,deviation_track,sigma,budget_used,step_local_norm\n";
  for (const EpisodeResult& e : res.episodes) {
    const std::string run_id = res.resolved.hash + "-" + e.algorithm + "-" + std::to_string(e.rep);
    double used = 0.0;
    for (std::size_t i = 0; i < e.records.size(); ++i) {
      const RoundRecord& r = e.records[i];
      used += std::abs(r.sigma);
      s += run_id + "," + e.algorithm + "," + std::to_string(e.rep) + "," + std::to_string(r.t) + "," +
           fmt_double(r.loss) + "," + fmt_double(e.report.cumulative_loss[i]) + "," + fmt_double(e.report.regret[i]) +
           "," + fmt_double(e.report.deviation_track[i]) + "," + fmt_double(r.sigma) + "," + fmt_double(used) + "," +
           fmt_double(r.step_local_norm) + "\n";
    }
  }
  return s;
}

inline nlohmann::ordered_json summary_json(const ExperimentResult& res) {
  using nlohmann::ordered_json;
  const ResolvedExperiment& r = res.resolved;
  ordered_json j;
  j["master_seed"] = r.config.master_seed;
  j["config_hash"] = r.hash;
  j["config"] = serialize_config(r.config, false);
  j["resolved"] = {{"C", r.C},
                   {"delta_algorithm1", r.delta_choice.delta},
                   {"delta_clamped", r.delta_choice.clamped},
                   {"nu", Barrier(r.domain).nu()},
                   {"bound_D", r.bound_D}};
  j["warnings"] = r.warnings;
  ordered_json algs = ordered_json::object();
  for (const AlgorithmSummary& s : res.summaries) {
    const RegretInterval iv = corrected_regret_interval(s.mean, r.C);
    ordered_json a;
    a["eta"] = s.eta;
    a["delta"] = s.delta;
    a["final_regret"] = s.final_regrets;
    a["mean_regret"] = s.mean;
    a["median_regret"] = s.median;
    a["max_regret"] = s.max;
    a["corrected_regret_interval"] = {{"lower", iv.lower}, {"upper", iv.upper}};
    a["budget_used_max"] = s.max_budget_used;
    a["budget_clip_count"] = s.budget_clips;
    a["sigma_cap_clip_count"] = s.cap_clips;
    a["step_bound"] = {{"bound", 4.0 * r.config.d * s.eta},
                       {"rounds", s.steps.rounds},
                       {"within", s.steps.within},
                       {"violations_small_loss", s.steps.violations},
                       {"over_bound_large_loss", s.steps.excused},
                       {"fraction_within", s.steps.fraction_within()},
                       {"fraction_within_covered", s.steps.fraction_within_covered()},
                       {"max_ratio", s.steps.max_ratio},
                       {"max_ratio_small_loss", s.steps.max_ratio_covered}};
    ordered_json bounds;
    bounds["expected"] = s.expected_bound ? ordered_json(*s.expected_bound) : ordered_json(nullptr);
    bounds["high_probability"] = s.highprob_bound ? ordered_json(*s.highprob_bound) : ordered_json(nullptr);
    bounds["gamma"] = r.config.gamma;
    bounds["errors"] = s.bound_errors;
    a["bounds"] = bounds;
    algs[s.algorithm] = a;
  }
  j["algorithms"] = algs;

  PlotData plot;
  plot.seed = r.config.master_seed;
  plot.config_hash = r.hash;
  for (const AlgorithmSummary& s : res.summaries) plot.series[s.algorithm].push_back({r.config.epsilon, s.mean});
  j["plot"] = plot_to_json(plot);
  return j;
}

inline RunArtifacts write_artifacts(const ExperimentResult& res, const fs::path& out_dir) {
  RunArtifacts a;
  a.trajectory_csv = out_dir / "trajectory.csv";
  a.summary_json = out_dir / "summary.json";
  a.plot_svg = out_dir / "plot.svg";
  a.resolved_config = out_dir / "config.cfg";
  write_text(a.trajectory_csv, trajectory_csv(res));
  const nlohmann::ordered_json summary = summary_json(res);
  write_text(a.summary_json, summary.dump(2) + "\n");
  write_text(a.plot_svg, render_svg(plot_from_json(summary.at("plot"))));
  write_text(a.resolved_config, provenance_line(res.resolved) + "\n" + serialize_config(res.resolved.config));
  return a;
}

inline RunArtifacts run_experiment(const ExperimentConfig& config, ExperimentResult* result = nullptr) {
  ExperimentResult res = run_experiment_in_memory(config);
  RunArtifacts a = write_artifacts(res, config.out_dir);
  if (result) *result = std::move(res);
  return a;
}

struct SweepPoint {
  double epsilon;
  ExperimentResult result;
  RunArtifacts artifacts;
};

struct SweepArtifacts {
  std::vector<RunArtifacts> runs;
  fs::path table_csv;
  fs::path table_json;
  fs::path plot_svg;
};

inline std::string epsilon_dir_name(double eps) { return "eps_" + fmt_double(eps); }

/// One experiment per epsilon with the same master seed, so algorithms and
/// epsilon values are compared on identical loss and direction streams.
inline SweepArtifacts sweep(const ExperimentConfig& base, const std::vector<double>& epsilons,
                            std::vector<SweepPoint>* points = nullptr) {
  if (epsilons.empty()) throw ConfigError("sweep: epsilon list is empty");
  validate(base);
  const std::string hash = config_hash(base);
  SweepArtifacts out;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  std::string csv = "# master_seed=" + std::to_string(base.master_seed) + " config_hash=" + hash + "\n";
  csv += "epsilon,algorithm,C,delta,mean_regret,median_regret,max_regret,reps\n";
  PlotData plot;
  plot.seed = base.master_seed;
  plot.config_hash = hash;
  for (double eps : epsilons) {
    ExperimentConfig c = base;
    c.epsilon = eps;
    c.out_dir = (fs::path(base.out_dir) / epsilon_dir_name(eps)).string();
    ExperimentResult res;
    out.runs.push_back(run_experiment(c, &res));
    for (const AlgorithmSummary& s : res.summaries) {
      csv += fmt_double(eps) + "," + s.algorithm + "," + fmt_double(res.resolved.C) + "," + fmt_double(s.delta) + "," +
             fmt_double(s.mean) + "," + fmt_double(s.median) + "," + fmt_double(s.max) + "," +
             std::to_string(s.final_regrets.size()) + "\n";
      table.push_back({{"epsilon", eps},
                       {"algorithm", s.algorithm},
                       {"C", res.resolved.C},
                       {"delta", s.delta},
                       {"mean_regret", s.mean},
                       {"median_regret", s.median},
                       {"max_regret", s.max}});
      plot.series[s.algorithm].push_back({eps, s.mean});
    }
    if (points) points->push_back({eps, std::move(res), out.runs.back()});
  }
  const fs::path dir(base.out_dir);
  out.table_csv = dir / "sweep.csv";
  out.table_json = dir / "sweep.json";
  out.plot_svg = dir / "sweep.svg";
  write_text(out.table_csv, csv);
  nlohmann::ordered_json j;
  j["master_seed"] = base.master_seed;
  j["config_hash"] = hash;
  j["epsilons"] = epsilons;
  j["table"] = table;
  j["plot"] = plot_to_json(plot);
  write_text(out.table_json, j.dump(2) + "\n");
  write_text(out.plot_svg, render_svg(plot));
  return out;
}

}  // namespace scrible::harness

#endif  // SCRIBLE_HARNESS_EXPERIMENT_HPP
