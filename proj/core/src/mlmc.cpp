#include "csmc/mlmc.hpp"

#include <cmath>

#include "csmc/errors.hpp"
#include "csmc/parallel.hpp"

namespace csmc {

double MlmcPlan::accounted_cost(int horizon) const {
  double cost = 0.0;
  for (std::size_t l = 0; l < n_samples.size(); ++l)
    cost += static_cast<double>(n_samples[l]) *
            static_cast<double>(1L << l) * horizon;
  return cost;
}

MlmcPlan plan_allocation(double epsilon, std::optional<int> level_override,
                         double constant) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidAccuracy("mlmc accuracy must lie in (0,1), got " +
                          std::to_string(epsilon));
  MlmcPlan plan;
  plan.epsilon = epsilon;
  plan.max_level = level_override
                       ? *level_override
                       : static_cast<int>(std::ceil(std::log2(1.0 / epsilon)));
  if (plan.max_level < 1) plan.max_level = 1;

  const double eps_sq_inv = 1.0 / (epsilon * epsilon);
  const double log_factor = std::fabs(std::log(epsilon));
  plan.n_samples.resize(plan.max_level + 1);
  plan.n_samples[0] = static_cast<long>(std::ceil(eps_sq_inv));
  for (int l = 1; l <= plan.max_level; ++l) {
    const double nl = constant * eps_sq_inv * log_factor *
                      std::pow(2.0, -static_cast<double>(l));
    plan.n_samples[l] = std::max(1L, static_cast<long>(std::ceil(nl)));
  }
  return plan;
}

MlmcResult mlmc_estimate(const LevelModelFamily& family, const MlmcPlan& plan,
                         SchemeId scheme, const TestFunction& phi, int horizon,
                         const RngStream& stream, int threads) {
  const int L = plan.max_level;
  MlmcResult result;
  result.level_terms.assign(L + 1, 0.0);
  std::vector<std::string> level_errors(L + 1);

  parallel_for(L + 1, threads, [&](int l) {
    const RngStream level_stream =
        stream.substream("level", static_cast<std::uint64_t>(l));
    try {
      if (l == 0) {
        const FeynmanKacModel model = family.make(0);
        const BootstrapResult pf = run_bootstrap_filter(
            model, phi, horizon, static_cast<int>(plan.n_samples[0]),
            level_stream);
        result.level_terms[0] = pf.estimate_by_time[horizon];
      } else {
        const FeynmanKacModel model = family.make(l);
        RunOptions opts;
        opts.scheme = scheme;
        opts.horizon = horizon;
        opts.n_particles = static_cast<int>(plan.n_samples[l]);
        opts.track_filt_diff = false;
        const RunResult run = run_coupled_filter(model, phi, opts, level_stream);
        result.level_terms[l] = run.series.pred_diff[horizon];
      }
    } catch (const Error& e) {
      level_errors[l] = e.what();
    }
  });
  for (int l = 0; l <= L; ++l)
    if (!level_errors[l].empty())
      throw Error("mlmc level " + std::to_string(l) + ": " + level_errors[l]);

  result.estimate = stable_sum(result.level_terms);
  result.cost = plan.accounted_cost(horizon);
  return result;
}

BaselineResult single_level_baseline(const FeynmanKacModel& model_at_level,
                                     int level, int n_particles,
                                     const TestFunction& phi, int horizon,
                                     const RngStream& stream) {
  const BootstrapResult pf =
      run_bootstrap_filter(model_at_level, phi, horizon, n_particles, stream);
  BaselineResult out;
  out.estimate = pf.estimate_by_time[horizon];
  out.cost = static_cast<double>(n_particles) *
             static_cast<double>(1L << level) * horizon;
  return out;
}

}  // namespace csmc
