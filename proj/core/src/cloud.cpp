#include "csmc/cloud.hpp"

#include <cmath>

#include "csmc/errors.hpp"

namespace csmc {

CoupledCloud CoupledCloud::with_size(int n, int dim) {
  CoupledCloud cloud;
  cloud.dim = dim;
  cloud.size = n;
  cloud.xs_f.assign(static_cast<std::size_t>(n) * dim, 0.0);
  cloud.xs_c.assign(static_cast<std::size_t>(n) * dim, 0.0);
  return cloud;
}

double stable_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::vector<double> normalize_weights(std::span<const double> raw) {
  double max = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0))
      throw InvalidDistribution("negative or NaN weight");
    if (w > max) max = w;
  }
  if (max == 0.0) throw AllZeroWeights("normalize_weights");
  std::vector<double> out(raw.begin(), raw.end());
  if (max < 1e-300) {
    // Underflow guard: bring weights back to a safe scale first.
    for (double& w : out) w /= max;
  }
  const double total = stable_sum(out);
  for (double& w : out) w /= total;
  return out;
}

double effective_sample_size(std::span<const double> normalized) {
  double s2 = 0.0;
  for (double w : normalized) s2 += w * w;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

WeightView compute_weights(const FeynmanKacModel& model,
                           const CoupledCloud& cloud, int n) {
  WeightView w;
  w.raw_f.resize(cloud.size);
  w.raw_c.resize(cloud.size);
  for (int i = 0; i < cloud.size; ++i) {
    w.raw_f[i] = model.potential_checked(n, cloud.f(i));
    w.raw_c[i] = model.potential_checked(n, cloud.c(i));
  }
  w.norm_f = normalize_weights(w.raw_f);
  w.norm_c = normalize_weights(w.raw_c);
  return w;
}

double estimate_pred_difference(const CoupledCloud& cloud,
                                const TestFunction& phi) {
  double sum = 0.0;
  for (int i = 0; i < cloud.size; ++i) sum += phi(cloud.f(i)) - phi(cloud.c(i));
  return sum / cloud.size;
}

double estimate_filt_difference(const CoupledCloud& cloud,
                                const FeynmanKacModel& model,
                                const TestFunction& phi, int n) {
  double num_f = 0.0, den_f = 0.0, num_c = 0.0, den_c = 0.0;
  for (int i = 0; i < cloud.size; ++i) {
    const double gf = model.potential_checked(n, cloud.f(i));
    const double gc = model.potential_checked(n, cloud.c(i));
    num_f += gf * phi(cloud.f(i));
    den_f += gf;
    num_c += gc * phi(cloud.c(i));
    den_c += gc;
  }
  if (den_f <= 0.0) throw AllZeroWeights("estimate_filt_difference (f)");
  if (den_c <= 0.0) throw AllZeroWeights("estimate_filt_difference (c)");
  return num_f / den_f - num_c / den_c;
}

double mean_sq_distance(const CoupledCloud& cloud) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cloud.xs_f.size(); ++i) {
    const double d = cloud.xs_f[i] - cloud.xs_c[i];
    sum += d * d;
  }
  return sum / cloud.size;
}

double decoupled_fraction(const CoupledCloud& cloud) {
  int count = 0;
  for (int i = 0; i < cloud.size; ++i) {
    auto f = cloud.f(i), c = cloud.c(i);
    for (int d = 0; d < cloud.dim; ++d) {
      if (f[d] != c[d]) {
        ++count;
        break;
      }
    }
  }
  return static_cast<double>(count) / cloud.size;
}

}  // namespace csmc
