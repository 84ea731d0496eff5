#include "csmc/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>

#include "csmc/errors.hpp"
#include "csmc/mlmc.hpp"
#include "csmc/oracle/exact.hpp"
#include "csmc/report_io.hpp"
#include "csmc/stats.hpp"

namespace csmc {

namespace {

struct ObservationRecord {
  std::string source;  // "none" | "file" | "synth"
  std::string path;
  std::optional<std::uint64_t> seed;
  int level = 0;
  int count = 0;
  std::string hash;
};

struct BuiltExperiment {
  LevelModelFamily family;
  std::optional<oracle::FiniteModel> finite;
  std::string label;
  ObservationRecord obs;
};

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::vector<int> read_observation_file(const std::string& path, int needed,
                                       std::string& hash_out) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open observation file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  hash_out = hex64(fnv1a64_bytes(bytes.data(), bytes.size()));
  std::vector<int> ys;
  std::stringstream ss(bytes);
  long v = 0;
  while (ss >> v) {
    if (v != 0 && v != 1)
      throw Error("observation file must contain 0/1 values");
    ys.push_back(static_cast<int>(v));
  }
  if (static_cast<int>(ys.size()) < needed)
    throw Error("observation file has " + std::to_string(ys.size()) +
                " values, need " + std::to_string(needed));
  return ys;
}

std::string hash_observations(const std::vector<int>& ys) {
  std::string bytes;
  bytes.reserve(ys.size());
  for (int y : ys) bytes.push_back(y == 1 ? '1' : '0');
  return hex64(fnv1a64_bytes(bytes.data(), bytes.size()));
}

BuiltExperiment build_experiment(const RunConfig& cfg, int needed_obs,
                                 int obs_level) {
  BuiltExperiment built;
  if (cfg.model == "finite") {
    built.finite = oracle::load_finite_model_file(cfg.model_path);
    const auto fm = *built.finite;
    built.label =
        "finite:" + std::filesystem::path(cfg.model_path).stem().string();
    built.family.name = built.label;
    built.family.state_dim = 1;
    built.family.make = [fm](int) { return oracle::make_fk_model(fm); };
    built.obs.source = "none";
    return built;
  }

  std::vector<int> ys;
  built.obs.level = obs_level;
  built.obs.count = needed_obs;
  if (cfg.obs_source == "file") {
    built.obs.source = "file";
    built.obs.path = cfg.obs_path;
    ys = read_observation_file(cfg.obs_path, needed_obs, built.obs.hash);
  } else {
    built.obs.source = "synth";
    const std::uint64_t obs_seed =
        cfg.obs_seed ? *cfg.obs_seed
                     : RngStream(cfg.seed).substream("obs", 0).key();
    built.obs.seed = obs_seed;
    const double x_star =
        cfg.model == "ou" ? cfg.ou_x_star : cfg.diffusion_x_star;
    ys = synthesize_ou_observations(needed_obs, obs_level, x_star,
                                    {cfg.ou_a, cfg.ou_b}, RngStream(obs_seed));
    built.obs.hash = hash_observations(ys);
  }

  if (cfg.model == "ou") {
    built.label = "ou";
    built.family = make_ou_family(cfg.ou_x_star, {cfg.ou_a, cfg.ou_b}, ys);
  } else {
    built.label = "diffusion";
    LinearDiffusionParams p;
    p.dim = cfg.diffusion_dim;
    p.drift_scale = cfg.diffusion_drift_scale;
    p.noise = cfg.diffusion_noise;
    p.x_star = cfg.diffusion_x_star;
    built.family = make_linear_diffusion_family(p, {cfg.ou_a, cfg.ou_b}, ys);
  }
  return built;
}

TestFunction make_phi(const RunConfig& cfg) {
  if (cfg.phi == "identity") return phi_identity();
  if (cfg.phi == "clipped-abs") return phi_clipped_abs(cfg.phi_param);
  return phi_indicator_threshold(cfg.phi_param);
}

std::string resolve_out(const RunConfig& cfg, const CliOptions& opts) {
  return !opts.out_override.empty() ? opts.out_override : cfg.out;
}

std::string summary_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".summary.csv");
  return p.string();
}

void write_manifest(const std::string& out, const std::string& subcommand,
                    const RunConfig& cfg, const ObservationRecord& obs,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["tool"] = "csmc";
  j["subcommand"] = subcommand;
  j["seed"] = cfg.seed;
  j["model"] = cfg.model;
  j["scheme"] = std::string(to_string(cfg.scheme));
  j["observations"]["source"] = obs.source;
  if (obs.source == "file") j["observations"]["path"] = obs.path;
  if (obs.seed) j["observations"]["seed"] = *obs.seed;
  if (obs.source != "none") {
    j["observations"]["level"] = obs.level;
    j["observations"]["count"] = obs.count;
    j["observations"]["hash"] = obs.hash;
  }
  j["outputs"] = outputs;
  std::ofstream f(out + ".manifest.json");
  f << j.dump(2) << "\n";
}

// Writes to the path, or stdout when empty.
class CsvSink {
 public:
  explicit CsvSink(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);  // LF line endings everywhere
      if (!file_) throw Error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  bool to_file() const { return !path_.empty(); }

 private:
  std::string path_;
  std::ofstream file_;
};

int finish_with_failure_policy(double failure_rate, std::ostream& diag) {
  if (failure_rate > 0.05) {
    diag << "experiment failed: replicate failure rate "
         << format_double17(failure_rate) << " exceeds 5%\n";
    return 2;
  }
  return 0;
}

}  // namespace

int run_subcommand_run(const RunConfig& cfg, const CliOptions& opts,
                       std::ostream& diag) {
  const BuiltExperiment built =
      build_experiment(cfg, cfg.horizon + 1, cfg.level);
  const FeynmanKacModel model = built.family.make(cfg.level);
  const TestFunction phi = make_phi(cfg);

  RunOptions run_opts;
  run_opts.scheme = cfg.scheme;
  run_opts.horizon = cfg.horizon;
  run_opts.n_particles = static_cast<int>(cfg.particles);
  run_opts.max_rejection_iterations = cfg.max_rejection_iterations;

  ExperimentContext ctx{opts.threads, opts.timing};
  const ReplicateBatch batch =
      run_replicates(model, phi, run_opts, built.label, cfg.level,
                     cfg.replicates, RngStream(cfg.seed), ctx);

  const std::string out = resolve_out(cfg, opts);
  CsvSink sink(out);
  write_report_header(sink.stream());
  for (const auto& rep : batch.reports) {
    write_report_row(sink.stream(), rep);
    if (rep.failed)
      diag << "replicate " << rep.replicate_index << " (seed " << rep.seed
           << ") failed: " << rep.error << "\n";
  }
  if (sink.to_file()) write_manifest(out, "run", cfg, built.obs, {out});
  return finish_with_failure_policy(batch.failure_rate(), diag);
}

int run_subcommand_sweep(const RunConfig& cfg, const CliOptions& opts,
                         std::ostream& diag) {
  const bool by_level = !cfg.sweep_levels.empty();
  const bool by_horizon = !cfg.sweep_horizons.empty();
  if (by_level == by_horizon)
    throw ValidationError("sweep.levels",
                          "set exactly one of sweep.levels, sweep.horizons");
  if (by_level && cfg.model == "finite")
    throw ValidationError("sweep.levels",
                          "finite models have no discretization levels");

  const int max_horizon =
      by_level ? cfg.horizon
               : *std::max_element(cfg.sweep_horizons.begin(),
                                   cfg.sweep_horizons.end());
  const int obs_level =
      by_level ? *std::max_element(cfg.sweep_levels.begin(),
                                   cfg.sweep_levels.end())
               : cfg.level;
  const BuiltExperiment built =
      build_experiment(cfg, max_horizon + 1, obs_level);
  const TestFunction phi = make_phi(cfg);
  ExperimentContext ctx{opts.threads, opts.timing};

  const SweepResult sweep =
      by_level ? variance_level_sweep(built.family, cfg.scheme, phi,
                                      cfg.horizon, cfg.sweep_levels,
                                      static_cast<int>(cfg.particles),
                                      cfg.replicates, RngStream(cfg.seed), ctx)
               : time_uniformity_sweep(built.family, cfg.scheme, phi,
                                       cfg.level, cfg.sweep_horizons,
                                       static_cast<int>(cfg.particles),
                                       cfg.replicates, RngStream(cfg.seed),
                                       ctx);

  const std::string out = resolve_out(cfg, opts);
  CsvSink sink(out);
  write_report_header(sink.stream());
  for (const auto& rep : sweep.raw) {
    write_report_row(sink.stream(), rep);
    if (rep.failed)
      diag << "replicate " << rep.replicate_index << " (seed " << rep.seed
           << ") failed: " << rep.error << "\n";
  }
  if (sink.to_file()) {
    const std::string sum = summary_path(out);
    std::ofstream sfile(sum, std::ios::binary);
    write_sweep_summary(sfile, sweep, cfg.scheme, built.label,
                        by_level ? cfg.horizon : cfg.level, cfg.particles);
    write_manifest(out, "sweep", cfg, built.obs, {out, sum});
  } else {
    write_sweep_summary(sink.stream(), sweep, cfg.scheme, built.label,
                        by_level ? cfg.horizon : cfg.level, cfg.particles);
  }
  return finish_with_failure_policy(sweep.failure_rate(), diag);
}

int run_subcommand_mlmc(const RunConfig& cfg, const CliOptions& opts,
                        std::ostream& diag) {
  if (cfg.mlmc_epsilon == 0.0)
    throw ValidationError("mlmc.epsilon", "required for the mlmc subcommand");
  if (cfg.model == "finite")
    throw ValidationError("model", "mlmc needs a level-indexed model");
  const MlmcPlan plan =
      plan_allocation(cfg.mlmc_epsilon, cfg.mlmc_levels, cfg.mlmc_constant);
  const BuiltExperiment built =
      build_experiment(cfg, cfg.horizon + 1, plan.max_level);
  const TestFunction phi = make_phi(cfg);

  const MlmcResult result =
      mlmc_estimate(built.family, plan, cfg.scheme, phi, cfg.horizon,
                    RngStream(cfg.seed), opts.threads);

  const std::string out = resolve_out(cfg, opts);
  CsvSink sink(out);
  write_mlmc_csv(sink.stream(), result, plan, cfg.horizon);
  if (sink.to_file()) write_manifest(out, "mlmc", cfg, built.obs, {out});
  diag << "mlmc estimate " << format_double17(result.estimate) << " at cost "
       << format_double17(result.cost) << "\n";
  return 0;
}

int run_subcommand_clt_check(const RunConfig& cfg, const CliOptions& opts,
                             std::ostream& diag) {
  if (cfg.model != "finite")
    throw ValidationError(
        "model", "clt-check needs a finite model (exact oracle required)");
  if (cfg.replicates < 100)
    throw ValidationError("replicates", "clt-check needs R >= 100");

  const BuiltExperiment built = build_experiment(cfg, 0, 0);
  const oracle::FiniteModel& fm = *built.finite;
  const TestFunction phi = make_phi(cfg);
  const Eigen::VectorXd phi_vec = oracle::to_phi_vector(phi, fm.states);

  const double truth =
      oracle::exact_predictor(fm, cfg.horizon, Side::f).dot(phi_vec) -
      oracle::exact_predictor(fm, cfg.horizon, Side::c).dot(phi_vec);
  const oracle::CltVariance sigma =
      oracle::clt_variance(fm, cfg.horizon, phi_vec, cfg.scheme, phi.name);

  const FeynmanKacModel model = built.family.make(0);
  ExperimentContext ctx{opts.threads, opts.timing};
  const std::vector<int> horizons{cfg.horizon};
  const std::vector<double> truths{truth};
  const auto errors = collect_scaled_errors(
      model, phi, cfg.scheme, horizons, static_cast<int>(cfg.particles),
      cfg.replicates, truths, RngStream(cfg.seed), ctx);

  const CltCheckResult check = clt_check(errors[0]);
  const double crit = kolmogorov_critical(0.01, cfg.replicates);
  const bool var_ok = sigma.sigma_sq > 0.0 &&
                      std::fabs(check.sample_var / sigma.sigma_sq - 1.0) <= 0.15;
  const bool pass = !check.degenerate && check.ks_stat < crit && var_ok;

  const std::string out = resolve_out(cfg, opts);
  CsvSink sink(out);
  sink.stream() << "scheme,model,n,N,replicate,seed,scaled_error\n";
  const RngStream master(cfg.seed);
  for (int r = 0; r < cfg.replicates; ++r) {
    sink.stream() << to_string(cfg.scheme) << ',' << built.label << ','
                  << cfg.horizon << ',' << cfg.particles << ',' << r << ','
                  << master.substream("replicate", r).key() << ','
                  << format_double17(errors[0][r]) << "\n";
  }
  if (sink.to_file()) {
    const std::string sum = summary_path(out);
    std::ofstream sfile(sum, std::ios::binary);
    sfile << "scheme,model,n,N,R,sample_mean,sample_var,oracle_var,ks_stat,"
             "ks_critical_1pct,pass\n";
    sfile << to_string(cfg.scheme) << ',' << built.label << ',' << cfg.horizon
          << ',' << cfg.particles << ',' << cfg.replicates << ','
          << format_double17(check.sample_mean) << ','
          << format_double17(check.sample_var) << ','
          << format_double17(sigma.sigma_sq) << ','
          << format_double17(check.ks_stat) << ',' << format_double17(crit)
          << ',' << (pass ? 1 : 0) << "\n";
    write_manifest(out, "clt-check", cfg, built.obs, {out, sum});
  }
  diag << "clt-check: sample_var " << format_double17(check.sample_var)
       << " oracle_var " << format_double17(sigma.sigma_sq) << " ks "
       << format_double17(check.ks_stat) << " crit " << format_double17(crit)
       << (pass ? " PASS" : " FAIL") << "\n";
  return pass ? 0 : 2;
}

}  // namespace csmc
