#pragma once

namespace csmc {

// norm_const * sum_i w[i] * exp(-(x - m[i])^2 * inv_two_beta)
//
// This is the inner loop of the maximal-coupling filter on Gaussian-kernel
// models; its translation unit is compiled with relaxed FP semantics so the
// exp vectorizes. Summation order is fixed by the build, so results stay
// bit-reproducible run to run.
double weighted_normal_mixture(const double* means, const double* weights,
                               int n, double x, double inv_two_beta,
                               double norm_const);

}  // namespace csmc
