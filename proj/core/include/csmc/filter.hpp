#pragma once

#include <vector>

#include "csmc/cloud.hpp"
#include "csmc/model.hpp"
#include "csmc/schemes.hpp"

namespace csmc {

struct RunOptions {
  SchemeId scheme = SchemeId::IR;
  int horizon = 1;
  int n_particles = 100;
  long max_rejection_iterations = 1'000'000;
  bool track_filt_diff = true;  // needs G_n at every time up to the horizon
};

// Per-time trajectory of the run diagnostics, index 0..horizon.
struct RunSeries {
  std::vector<double> pred_diff;
  std::vector<double> filt_diff;
  std::vector<double> mean_sq_dist;
  std::vector<double> decouple_frac;
};

struct RunResult {
  CoupledCloud final_cloud;
  RunSeries series;
  RejectionStats rejection;                  // MC: init + all steps
  double coupled_index_fraction_mean = 0.0;  // MCR: mean over steps
  double ess_f = 0.0, ess_c = 0.0;           // at the horizon, G_n weights
};

// One coupled filter run. All randomness comes from substreams of
// `run_stream`; the same (model, phi, opts, stream) is bit-reproducible.
// The MC scheme initializes from the maximal coupling of the initial laws,
// every other scheme from the model's coupled initial sampler.
RunResult run_coupled_filter(const FeynmanKacModel& model,
                             const TestFunction& phi, const RunOptions& opts,
                             const RngStream& run_stream);

struct BootstrapResult {
  std::vector<double> estimate_by_time;  // (1/N) sum phi(x_i), 0..horizon
  double ess = 0.0;
};

// Plain bootstrap particle filter (multinomial resampling) on the f-side of
// the model; the single-level comparator and the MLMC level-0 estimator.
BootstrapResult run_bootstrap_filter(const FeynmanKacModel& model,
                                     const TestFunction& phi, int horizon,
                                     int n_particles,
                                     const RngStream& run_stream);

}  // namespace csmc
