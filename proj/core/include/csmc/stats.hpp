#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "csmc/filter.hpp"
#include "csmc/models.hpp"

namespace csmc {

struct ExperimentContext {
  int threads = 1;
  bool record_timing = false;  // off by default: CSV stays byte-stable
};

// One filter run summarized at its horizon.
struct ReplicateReport {
  SchemeId scheme = SchemeId::IR;
  std::string model_name;
  int level = 0;
  int horizon = 0;
  int n_particles = 0;
  int replicate_index = 0;
  std::uint64_t seed = 0;

  double pred_diff = 0.0;
  double filt_diff = 0.0;
  double mean_sq_dist = 0.0;
  double decouple_frac = 0.0;
  double ess_f = 0.0, ess_c = 0.0;
  double wall_ms = 0.0;

  RejectionStats rejection;  // MC only
  double coupled_index_fraction =
      std::numeric_limits<double>::quiet_NaN();  // MCR only

  bool failed = false;
  std::string error;
};

struct ReplicateBatch {
  std::vector<ReplicateReport> reports;
  std::vector<RunSeries> series;  // filled only when keep_series

  int failures() const;
  double failure_rate() const;
};

// R independent runs, replicate r on substream (master, "replicate", r).
// Reports land in replicate order regardless of worker scheduling; failures
// are recorded in-report, not thrown.
ReplicateBatch run_replicates(const FeynmanKacModel& model,
                              const TestFunction& phi, const RunOptions& opts,
                              const std::string& model_name, int level, int R,
                              const RngStream& master,
                              const ExperimentContext& ctx,
                              bool keep_series = false);

struct CltCheckResult {
  double sample_mean = 0.0;
  double sample_var = 0.0;
  double ks_stat = 0.0;
  bool degenerate = false;  // zero variance: KS against a point mass
};

// Moments of sqrt(N)-scaled errors and the KS distance to N(0, sample_var).
CltCheckResult clt_check(std::span<const double> scaled_errors);

// Asymptotic two-sided Kolmogorov critical value at level alpha.
double kolmogorov_critical(double alpha, int n);

// errors[h][r] = sqrt(N) * (pred_diff at horizons[h] - truth[h]).
// One run per replicate, read at every requested horizon.
std::vector<std::vector<double>> collect_scaled_errors(
    const FeynmanKacModel& model, const TestFunction& phi, SchemeId scheme,
    std::span<const int> horizons, int n_particles, int R,
    std::span<const double> truth_by_horizon, const RngStream& master,
    const ExperimentContext& ctx);

struct SweepPoint {
  double axis_value = 0.0;  // level or horizon
  double var_pred_diff = 0.0;
  double nvar = 0.0;  // N * var
  double mean_sq_dist = 0.0;
  double decouple_frac = 0.0;
  int failures = 0;
};

struct SweepResult {
  std::string axis;  // "level" | "horizon"
  std::vector<SweepPoint> points;
  int replicates = 0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double slope_se = std::numeric_limits<double>::quiet_NaN();
  double max_min_var_ratio = std::numeric_limits<double>::quiet_NaN();
  std::vector<ReplicateReport> raw;  // all replicate rows, grid-major

  double failure_rate() const;
};

// Var[pred_diff] * N per level, with the OLS slope of log(N Var) on
// log(Delta_l). Needs >= 4 levels.
SweepResult variance_level_sweep(const LevelModelFamily& family,
                                 SchemeId scheme, const TestFunction& phi,
                                 int horizon, std::span<const int> levels,
                                 int n_particles, int R,
                                 const RngStream& master,
                                 const ExperimentContext& ctx);

// Per-horizon variance / coupling diagnostics at a fixed level, from one run
// per replicate read at every horizon. Needs >= 3 horizons.
SweepResult time_uniformity_sweep(const LevelModelFamily& family,
                                  SchemeId scheme, const TestFunction& phi,
                                  int level, std::span<const int> horizons,
                                  int n_particles, int R,
                                  const RngStream& master,
                                  const ExperimentContext& ctx);

// Small shared numerics.
double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // unbiased, n-1

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace csmc
