#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>

#include "csmc/cloud.hpp"
#include "csmc/model.hpp"
#include "csmc/resampling.hpp"

namespace csmc {

enum class SchemeId { IR, MCR, MC, W };

std::string_view to_string(SchemeId s);
std::optional<SchemeId> scheme_from_string(std::string_view token);

// Rejection-sampler bookkeeping for the maximal-coupling steps.
// loop_iterations counts stage-2 draws; "steps to acceptance" for one pair is
// 1 (the stage-1 draw) plus its share of loop_iterations.
struct RejectionStats {
  long pairs = 0;
  long accept_at_step1 = 0;
  long loop_iterations = 0;
  long max_iterations_cap = 0;

  double mean_steps_to_accept() const {
    return pairs > 0 ? 1.0 + static_cast<double>(loop_iterations) / pairs
                     : 0.0;
  }
  RejectionStats& operator+=(const RejectionStats& o);
};

struct StepOptions {
  long max_rejection_iterations = 1'000'000;
};

struct StepDiagnostics {
  RejectionStats rejection;  // MC only
  double coupled_index_fraction =
      std::numeric_limits<double>::quiet_NaN();  // MCR only
};

// Throws MissingDensity / DimensionUnsupported when the model cannot support
// the scheme; cheap, called once per run.
void validate_scheme_capabilities(const FeynmanKacModel& model, SchemeId s);

// One filter step of each coupled scheme, from a cloud at time n-1 to time n.
// Each particle pair draws from its own substream of `stream`, so output does
// not depend on iteration order, and a given (inputs, stream) is
// bit-reproducible. The stream itself is not advanced.

// Independent pair resampling: indices i ~ wf, j ~ wc independently, then one
// draw of the coupled kernel from (x^f_i, x^c_j).
CoupledCloud ircpf_step(const CoupledCloud& cloud, const FeynmanKacModel& model,
                        int n, const RngStream& stream);

// Maximally coupled resampling: per pair, indices from the maximal coupling
// of the two weight vectors; the residual branch realizes the mixed-pair
// kernel (f-coordinate of one ancestor pair, c-coordinate of another).
CoupledCloud mcrpf_step(const CoupledCloud& cloud, const FeynmanKacModel& model,
                        int n, const RngStream& stream,
                        double* coupled_index_fraction = nullptr);

// Generic O(N)-per-evaluation predictive mixture
//   x -> sum_i w_i * kernel_density(n, x_i, x).
double predictive_mixture_density(
    const MixtureView& mix,
    const std::function<double(int, ConstStateView, ConstStateView)>&
        kernel_density,
    int n, ConstStateView x);

// Reusable evaluator for the same mixture: uses the model's specialized hook
// when present, otherwise groups exactly-equal support points and falls back
// to the kernel-density sum. Throws MissingDensity when neither is possible.
MixtureDensityFn make_mixture_density(const FeynmanKacModel& model, int n,
                                      Side s, const MixtureView& mix);

// Maximal-coupling step: exact draw from the maximal coupling of the two
// predictive mixtures by the two-stage rejection sampler. Requires kernel
// density views.
std::pair<CoupledCloud, RejectionStats> mcpf_step(const CoupledCloud& cloud,
                                                  const FeynmanKacModel& model,
                                                  int n,
                                                  const RngStream& stream,
                                                  long max_iterations);

// Exact draw from the maximal coupling of the two initial laws (stage
// structure identical to mcpf_step); requires initial density views.
void sample_init_maximal_coupling(const FeynmanKacModel& model, StateView f,
                                  StateView c, RngStream& rng,
                                  long max_iterations, RejectionStats& stats);

// Wasserstein (common-uniform quantile) resampling; requires state_dim == 1.
CoupledCloud wcpf_step(const CoupledCloud& cloud, const FeynmanKacModel& model,
                       int n, const RngStream& stream);

std::pair<CoupledCloud, StepDiagnostics> scheme_step(
    SchemeId scheme, const CoupledCloud& cloud, const FeynmanKacModel& model,
    int n, const RngStream& stream, const StepOptions& opts = {});

}  // namespace csmc
