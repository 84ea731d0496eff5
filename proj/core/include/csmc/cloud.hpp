#pragma once

#include <span>
#include <vector>

#include "csmc/model.hpp"

namespace csmc {

// N particle pairs (x^f_i, x^c_i) at a common time index, stored flat.
struct CoupledCloud {
  int dim = 1;
  int size = 0;
  int time_index = 0;
  std::vector<double> xs_f, xs_c;  // size * dim each

  static CoupledCloud with_size(int n, int dim);

  StateView f(int i) {
    return {xs_f.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  StateView c(int i) {
    return {xs_c.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  ConstStateView f(int i) const {
    return {xs_f.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  ConstStateView c(int i) const {
    return {xs_c.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
};

// Raw potential values on both marginals and their normalized forms.
struct WeightView {
  std::vector<double> raw_f, raw_c;
  std::vector<double> norm_f, norm_c;
};

// Neumaier-compensated sum; keeps normalization honest at N = 1e5.
double stable_sum(std::span<const double> xs);

// Proportional rescale to a probability vector.
// Throws AllZeroWeights when every entry is zero, InvalidDistribution on a
// negative entry. Entries below the linear-space underflow guard (max raw
// weight < 1e-300) are rescaled by the max before summing.
std::vector<double> normalize_weights(std::span<const double> raw);

// Effective sample size 1 / sum(w_i^2) of a normalized weight vector.
double effective_sample_size(std::span<const double> normalized);

// G_n evaluated on both marginals of the cloud, raw + normalized.
WeightView compute_weights(const FeynmanKacModel& model,
                           const CoupledCloud& cloud, int n);

// (1/N) sum_i [phi(x^f_i) - phi(x^c_i)]
double estimate_pred_difference(const CoupledCloud& cloud,
                                const TestFunction& phi);

// sum_i G_n(x^f_i) phi(x^f_i) / sum_i G_n(x^f_i)  -  (same for c)
double estimate_filt_difference(const CoupledCloud& cloud,
                                const FeynmanKacModel& model,
                                const TestFunction& phi, int n);

// (1/N) sum_i ||x^f_i - x^c_i||^2
double mean_sq_distance(const CoupledCloud& cloud);

// (1/N) sum_i 1[x^f_i != x^c_i], exact floating-point comparison.
double decoupled_fraction(const CoupledCloud& cloud);

}  // namespace csmc
