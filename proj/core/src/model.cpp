#include "csmc/model.hpp"

#include <algorithm>
#include <cmath>

#include "csmc/errors.hpp"

namespace csmc {

TestFunction phi_identity(double declared_bound) {
  return {[](ConstStateView x) { return x[0]; }, declared_bound, 1.0,
          "identity"};
}

TestFunction phi_clipped_abs(double clip) {
  return {[clip](ConstStateView x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return std::min(std::sqrt(s), clip);
          },
          clip, 1.0, "clipped-abs"};
}

TestFunction phi_indicator_threshold(double threshold) {
  return {[threshold](ConstStateView x) {
            return x[0] >= threshold ? 1.0 : 0.0;
          },
          1.0, -1.0, "indicator-threshold"};
}

double FeynmanKacModel::potential_checked(int n, ConstStateView x) const {
  const double g = potential(n, x);
  if (!(g >= 0.0) || g > potential_bound * (1.0 + 1e-12)) {
    throw Error("potential value " + std::to_string(g) +
                " outside declared range [0, " +
                std::to_string(potential_bound) + "] at time " +
                std::to_string(n));
  }
  return g;
}

void FeynmanKacModel::validate() const {
  if (state_dim < 1) throw ValidationError("state_dim", "must be >= 1");
  if (!(potential_bound > 0.0) || !std::isfinite(potential_bound))
    throw ValidationError("potential_bound", "must be finite and positive");
  if (!potential) throw ValidationError("potential", "missing");
  if (!sample_init_f || !sample_init_c)
    throw ValidationError("init", "marginal initial samplers missing");
  if (!sample_init_coupled)
    throw ValidationError("init_coupled", "missing coupled initial sampler");
  if (!sample_kernel_f || !sample_kernel_c)
    throw ValidationError("kernel", "marginal kernel samplers missing");
  if (!sample_kernel_coupled)
    throw ValidationError("kernel_coupled", "missing coupled kernel sampler");
  if (static_cast<bool>(density_kernel_f) !=
      static_cast<bool>(density_kernel_c))
    throw ValidationError("density_kernel",
                          "provide both kernel densities or neither");
}

}  // namespace csmc
