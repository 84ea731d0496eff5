#pragma once

#include <span>
#include <vector>

#include "csmc/rng.hpp"

namespace csmc {

// Categorical distribution over {0..N-1} sampled by inverting a precomputed
// prefix-sum table (one uniform per draw, binary search; no alias tables).
class CategoricalSampler {
 public:
  CategoricalSampler() = default;
  explicit CategoricalSampler(std::span<const double> weights);  // raw, >= 0

  int draw(RngStream& rng) const;
  double total() const { return cum_.empty() ? 0.0 : cum_.back(); }
  bool empty() const { return total() <= 0.0; }

 private:
  std::vector<double> cum_;
};

struct IndexPair {
  int i = 0;
  int j = 0;
  bool coupled = false;
};

// Maximal coupling of two categorical laws over a shared index set.
// P(i = j) = sum_k min(wf_k, wc_k); on the coupled branch the common index is
// drawn from min(wf, wc), otherwise i and j come independently from the two
// normalized residuals. A draw consumes 2 uniforms (coupled) or 3 (residual).
class CategoricalCoupler {
 public:
  CategoricalCoupler(std::span<const double> wf, std::span<const double> wc);

  IndexPair draw(RngStream& rng) const;
  double coupled_mass() const { return coupled_mass_; }

 private:
  double coupled_mass_ = 0.0;
  CategoricalSampler min_, res_f_, res_c_;
};

// One-shot form of the above. Both vectors must be probability vectors
// (length-matched, entries >= 0, sums within 1e-12 of 1), else
// InvalidDistribution.
IndexPair maximal_couple_categorical(std::span<const double> wf,
                                     std::span<const double> wc,
                                     RngStream& rng);

// Generalized inverse inf{x : F(x) >= u} of the right-continuous weighted
// empirical CDF over sorted 1-D atoms. Equal atoms are merged by summing
// weights before inversion; u = 0 maps to the smallest support point and
// u = 1 to the largest.
class WeightedCdf {
 public:
  // points must be sorted ascending (ties allowed); weights a probability
  // vector. Throws InvalidDistribution otherwise.
  WeightedCdf(std::span<const double> points, std::span<const double> weights);

  double quantile(double u) const;
  int support_size() const { return static_cast<int>(atoms_.size()); }

 private:
  std::vector<double> atoms_;  // strictly increasing, positive weight only
  std::vector<double> cum_;
};

double weighted_quantile(std::span<const double> points,
                         std::span<const double> weights, double u);

}  // namespace csmc
