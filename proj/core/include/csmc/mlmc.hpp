#pragma once

#include <optional>
#include <vector>

#include "csmc/filter.hpp"
#include "csmc/models.hpp"

namespace csmc {

// Level budget for one multilevel run. Accounted cost is Delta_l^-1 per
// particle per unit time: level l contributes N_l * 2^l * n cost units.
struct MlmcPlan {
  int max_level = 1;
  double epsilon = 0.1;
  std::vector<long> n_samples;  // N_0 .. N_L

  double accounted_cost(int horizon) const;
};

// L = ceil(log2(1/eps)) unless overridden; N_0 = ceil(eps^-2);
// N_l = ceil(c * eps^-2 * |log eps| * 2^-l). Throws InvalidAccuracy unless
// eps in (0,1).
MlmcPlan plan_allocation(double epsilon,
                         std::optional<int> level_override = std::nullopt,
                         double constant = 1.0);

struct MlmcResult {
  double estimate = 0.0;
  std::vector<double> level_terms;  // term 0 = level-0 estimate, then diffs
  double cost = 0.0;
};

// Telescoping estimate of eta_n^L(phi): a plain level-0 particle filter plus
// one coupled filter per level 1..L, every level on its own substream so the
// estimate does not depend on scheduling.
MlmcResult mlmc_estimate(const LevelModelFamily& family, const MlmcPlan& plan,
                         SchemeId scheme, const TestFunction& phi, int horizon,
                         const RngStream& stream, int threads = 1);

struct BaselineResult {
  double estimate = 0.0;
  double cost = 0.0;
};

// Plain bootstrap particle filter at one level; cost N * 2^level * n.
BaselineResult single_level_baseline(const FeynmanKacModel& model_at_level,
                                     int level, int n_particles,
                                     const TestFunction& phi, int horizon,
                                     const RngStream& stream);

}  // namespace csmc
