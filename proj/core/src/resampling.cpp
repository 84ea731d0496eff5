#include "csmc/resampling.hpp"

#include <algorithm>
#include <cmath>

#include "csmc/cloud.hpp"
#include "csmc/errors.hpp"

namespace csmc {

CategoricalSampler::CategoricalSampler(std::span<const double> weights) {
  cum_.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidDistribution("negative categorical weight");
    acc += w;
    cum_.push_back(acc);
  }
}

int CategoricalSampler::draw(RngStream& rng) const {
  if (empty()) throw InvalidDistribution("categorical sampler with zero mass");
  const double u = rng.uniform01() * cum_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  std::size_t idx = static_cast<std::size_t>(it - cum_.begin());
  // Never land on a zero-weight index (possible only if u == total).
  while (idx > 0 && cum_[idx] == cum_[idx - 1]) --idx;
  return static_cast<int>(idx);
}

namespace {

void check_probability_vector(std::span<const double> w, const char* name) {
  for (double v : w)
    if (!(v >= 0.0))
      throw InvalidDistribution(std::string(name) + ": negative entry");
  const double s = stable_sum(w);
  if (std::fabs(s - 1.0) > 1e-12)
    throw InvalidDistribution(std::string(name) + ": sums to " +
                              std::to_string(s));
}

std::vector<double> pointwise_min(std::span<const double> a,
                                  std::span<const double> b) {
  std::vector<double> m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = std::min(a[k], b[k]);
  return m;
}

std::vector<double> residual(std::span<const double> w,
                             std::span<const double> m) {
  std::vector<double> r(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) r[k] = w[k] - m[k];
  return r;
}

}  // namespace

CategoricalCoupler::CategoricalCoupler(std::span<const double> wf,
                                       std::span<const double> wc) {
  if (wf.size() != wc.size())
    throw InvalidDistribution("coupled categorical: length mismatch");
  check_probability_vector(wf, "wf");
  check_probability_vector(wc, "wc");
  const std::vector<double> m = pointwise_min(wf, wc);
  coupled_mass_ = stable_sum(m);
  min_ = CategoricalSampler(m);
  res_f_ = CategoricalSampler(residual(wf, m));
  res_c_ = CategoricalSampler(residual(wc, m));
}

IndexPair CategoricalCoupler::draw(RngStream& rng) const {
  IndexPair out;
  if (rng.uniform01() < coupled_mass_) {
    out.i = out.j = min_.draw(rng);
    out.coupled = true;
  } else {
    out.i = res_f_.draw(rng);
    out.j = res_c_.draw(rng);
    out.coupled = false;
  }
  return out;
}

IndexPair maximal_couple_categorical(std::span<const double> wf,
                                     std::span<const double> wc,
                                     RngStream& rng) {
  return CategoricalCoupler(wf, wc).draw(rng);
}

WeightedCdf::WeightedCdf(std::span<const double> points,
                         std::span<const double> weights) {
  if (points.size() != weights.size() || points.empty())
    throw InvalidDistribution("weighted CDF: size mismatch or empty");
  check_probability_vector(weights, "weights");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i] < points[i - 1])
      throw InvalidDistribution("weighted CDF: points not sorted");
  double acc = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double w = weights[i];
    // Merge the run of equal atoms.
    while (i + 1 < points.size() && points[i + 1] == points[i])
      w += weights[++i];
    if (w <= 0.0) continue;  // zero-weight atoms are not support points
    acc += w;
    atoms_.push_back(points[i]);
    cum_.push_back(acc);
  }
  if (atoms_.empty()) throw InvalidDistribution("weighted CDF: zero mass");
  cum_.back() = 1.0;  // pin the top against rounding
}

double WeightedCdf::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0))
    throw InvalidDistribution("quantile argument outside [0,1]");
  if (u <= 0.0) return atoms_.front();
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return atoms_[static_cast<std::size_t>(it - cum_.begin())];
}

double weighted_quantile(std::span<const double> points,
                         std::span<const double> weights, double u) {
  return WeightedCdf(points, weights).quantile(u);
}

}  // namespace csmc
