#pragma once

#include <functional>
#include <vector>

#include "csmc/model.hpp"
#include "csmc/rng.hpp"

namespace csmc {

// dZ_t = a(Z_t) dt + b(Z_t) dW_t. Callers are responsible for globally
// Lipschitz coefficients and uniform ellipticity; this is not machine-checked.
struct DiffusionSpec {
  int dim = 1;
  std::function<void(ConstStateView x, StateView out)> drift;  // a(x), dim
  std::function<void(ConstStateView x, StateView out)>
      diffusion;  // b(x), row-major dim x dim
  std::vector<double> start;  // x*
};

// Dyadic Euler level: step 2^-l, 2^l inner steps per unit interval.
struct LevelParams {
  int level = 0;
  double step = 1.0;
  long steps_per_unit = 1;

  static LevelParams at(int l);
};

// One unit-time transition draw from M^l(x, .): 2^l Euler inner steps,
// consuming exactly 2^l * dim Gaussian variates. Throws NonFiniteState if a
// coordinate leaves the finite range.
void euler_unit_step(ConstStateView x, const LevelParams& lp,
                     const DiffusionSpec& spec, StateView out, RngStream& rng);

// Synchronous fine/coarse coupling over one unit interval: the fine path
// (level l) generates 2^l increments; the coarse path (level l-1) consumes
// the sums of adjacent pairs. Both endpoints have the exact single-level
// marginal laws. Requires l >= 1.
void euler_coupled_unit_step(ConstStateView x_f, ConstStateView x_c, int level,
                             const DiffusionSpec& spec, StateView out_f,
                             StateView out_c, RngStream& rng);

// Unit-time transition of dZ = -(3/2) Z dt + dW under Euler level l is
// N(alpha_l x, beta_l) exactly; these are the closed forms.
struct OuParams {
  double alpha = 0.0;
  double beta = 1.0;
};

OuParams ou_transition_params(int level);
double ou_transition_density(double x, double y, int level);

struct ProbeResult {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of E[phi(X^l) - phi(X^{l-1})] at unit time under the
// synchronous coupling (matched randomness), with its standard error.
ProbeResult weak_error_probe(const DiffusionSpec& spec, int level,
                             const TestFunction& phi, int n_samples,
                             const RngStream& stream);

}  // namespace csmc
