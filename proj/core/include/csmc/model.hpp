#pragma once

#include <functional>
#include <span>
#include <string>

#include "csmc/rng.hpp"

namespace csmc {

using ConstStateView = std::span<const double>;
using StateView = std::span<double>;

enum class Side { f, c };

// Bounded test function. The bound and Lipschitz constant are declared tags
// used by diagnostics, not enforced per evaluation.
struct TestFunction {
  std::function<double(ConstStateView)> fn;
  double bound = 1.0;
  double lipschitz = -1.0;  // < 0: undeclared
  std::string name = "phi";

  double operator()(ConstStateView x) const { return fn(x); }
};

// phi(x) = x[0]
TestFunction phi_identity(double declared_bound = 1e9);
// phi(x) = min(||x||_2, clip)
TestFunction phi_clipped_abs(double clip = 1.0);
// phi(x) = 1[x[0] >= threshold]
TestFunction phi_indicator_threshold(double threshold);

// Weighted empirical measure of one marginal, for predictive mixtures.
struct MixtureView {
  const double* points = nullptr;   // flat, n_points * dim
  const double* weights = nullptr;  // normalized, length n_points
  int n_points = 0;
  int dim = 1;

  ConstStateView point(int i) const {
    return {points + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
};

using MixtureDensityFn = std::function<double(ConstStateView x)>;

// A coupled Feynman-Kac model: potentials G_n, a fine and a coarse Markov
// kernel with a coupling of the two, and coupled initial laws.
//
// Density views are optional capabilities. Schemes that need them (the
// maximal-coupling filter needs kernel and initial densities, the Wasserstein
// filter needs state_dim == 1) validate up front and fail fast.
struct FeynmanKacModel {
  int state_dim = 1;
  double potential_bound = 1.0;  // declared sup_n ||G_n||

  std::function<double(int n, ConstStateView x)> potential;

  std::function<void(StateView out, RngStream&)> sample_init_f;
  std::function<void(StateView out, RngStream&)> sample_init_c;
  std::function<void(StateView f, StateView c, RngStream&)> sample_init_coupled;

  std::function<void(int n, ConstStateView x, StateView out, RngStream&)>
      sample_kernel_f;
  std::function<void(int n, ConstStateView x, StateView out, RngStream&)>
      sample_kernel_c;
  std::function<void(int n, ConstStateView xf, ConstStateView xc, StateView uf,
                     StateView uc, RngStream&)>
      sample_kernel_coupled;

  // Optional pointwise densities (empty when the model cannot provide them).
  std::function<double(int n, ConstStateView x, ConstStateView y)>
      density_kernel_f;
  std::function<double(int n, ConstStateView x, ConstStateView y)>
      density_kernel_c;
  std::function<double(ConstStateView x)> density_init_f;
  std::function<double(ConstStateView x)> density_init_c;

  // Optional specialized evaluator for the predictive mixture
  //   x -> sum_i w_i * density_kernel_s(n, x_i, x).
  // Must agree with the generic weighted sum; models provide it when they can
  // evaluate the sum much faster than one kernel-density call per component.
  std::function<MixtureDensityFn(int n, Side s, const MixtureView& mix)>
      make_mixture_density;

  bool has_kernel_densities() const {
    return static_cast<bool>(density_kernel_f) &&
           static_cast<bool>(density_kernel_c);
  }
  bool has_init_densities() const {
    return static_cast<bool>(density_init_f) &&
           static_cast<bool>(density_init_c);
  }

  const std::function<double(int, ConstStateView, ConstStateView)>&
  density_kernel(Side s) const {
    return s == Side::f ? density_kernel_f : density_kernel_c;
  }

  // Evaluates G_n and enforces the declared range [0, potential_bound].
  double potential_checked(int n, ConstStateView x) const;

  // Throws ValidationError if a required piece is missing or inconsistent.
  void validate() const;
};

}  // namespace csmc
