#include "csmc/gauss_mixture.hpp"

#include <cmath>

namespace csmc {

double weighted_normal_mixture(const double* means, const double* weights,
                               int n, double x, double inv_two_beta,
                               double norm_const) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = x - means[i];
    acc += weights[i] * std::exp(-d * d * inv_two_beta);
  }
  return norm_const * acc;
}

}  // namespace csmc
