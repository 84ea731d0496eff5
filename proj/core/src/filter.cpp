#include "csmc/filter.hpp"

#include "csmc/errors.hpp"

namespace csmc {

RunResult run_coupled_filter(const FeynmanKacModel& model,
                             const TestFunction& phi, const RunOptions& opts,
                             const RngStream& run_stream) {
  if (opts.horizon < 0) throw Error("horizon must be >= 0");
  if (opts.n_particles < 1) throw Error("need at least one particle");
  validate_scheme_capabilities(model, opts.scheme);

  RunResult result;
  CoupledCloud cloud = CoupledCloud::with_size(opts.n_particles, model.state_dim);
  cloud.time_index = 0;

  const RngStream init_stream = run_stream.substream("init", 0);
  for (int i = 0; i < opts.n_particles; ++i) {
    RngStream rng = init_stream.substream("pair", static_cast<std::uint64_t>(i));
    if (opts.scheme == SchemeId::MC) {
      sample_init_maximal_coupling(model, cloud.f(i), cloud.c(i), rng,
                                   opts.max_rejection_iterations,
                                   result.rejection);
    } else {
      model.sample_init_coupled(cloud.f(i), cloud.c(i), rng);
    }
  }

  auto record = [&](const CoupledCloud& c) {
    result.series.pred_diff.push_back(estimate_pred_difference(c, phi));
    result.series.filt_diff.push_back(
        opts.track_filt_diff
            ? estimate_filt_difference(c, model, phi, c.time_index)
            : 0.0);
    result.series.mean_sq_dist.push_back(mean_sq_distance(c));
    result.series.decouple_frac.push_back(decoupled_fraction(c));
  };
  record(cloud);

  double coupled_frac_sum = 0.0;
  StepOptions step_opts;
  step_opts.max_rejection_iterations = opts.max_rejection_iterations;
  for (int n = 1; n <= opts.horizon; ++n) {
    const RngStream step_stream =
        run_stream.substream("step", static_cast<std::uint64_t>(n));
    switch (opts.scheme) {
      case SchemeId::IR:
        cloud = ircpf_step(cloud, model, n, step_stream);
        break;
      case SchemeId::MCR: {
        double frac = 0.0;
        cloud = mcrpf_step(cloud, model, n, step_stream, &frac);
        coupled_frac_sum += frac;
        break;
      }
      case SchemeId::MC: {
        auto [next, stats] = mcpf_step(cloud, model, n, step_stream,
                                       opts.max_rejection_iterations);
        cloud = std::move(next);
        result.rejection += stats;
        break;
      }
      case SchemeId::W:
        cloud = wcpf_step(cloud, model, n, step_stream);
        break;
    }
    record(cloud);
  }
  if (opts.scheme == SchemeId::MCR && opts.horizon > 0)
    result.coupled_index_fraction_mean = coupled_frac_sum / opts.horizon;

  const WeightView w = compute_weights(model, cloud, opts.horizon);
  result.ess_f = effective_sample_size(w.norm_f);
  result.ess_c = effective_sample_size(w.norm_c);
  result.final_cloud = std::move(cloud);
  return result;
}

BootstrapResult run_bootstrap_filter(const FeynmanKacModel& model,
                                     const TestFunction& phi, int horizon,
                                     int n_particles,
                                     const RngStream& run_stream) {
  if (horizon < 0) throw Error("horizon must be >= 0");
  if (n_particles < 1) throw Error("need at least one particle");
  const int d = model.state_dim;
  std::vector<double> xs(static_cast<std::size_t>(n_particles) * d);
  std::vector<double> next(xs.size());
  auto at = [&](std::vector<double>& buf, int i) {
    return StateView{buf.data() + static_cast<std::size_t>(i) * d,
                     static_cast<std::size_t>(d)};
  };

  BootstrapResult result;
  const RngStream init_stream = run_stream.substream("init", 0);
  for (int i = 0; i < n_particles; ++i) {
    RngStream rng = init_stream.substream("pair", static_cast<std::uint64_t>(i));
    model.sample_init_f(at(xs, i), rng);
  }
  auto estimate = [&] {
    double s = 0.0;
    for (int i = 0; i < n_particles; ++i) s += phi(at(xs, i));
    return s / n_particles;
  };
  result.estimate_by_time.push_back(estimate());

  std::vector<double> raw(n_particles);
  std::vector<double> norm;
  for (int n = 1; n <= horizon; ++n) {
    for (int i = 0; i < n_particles; ++i)
      raw[i] = model.potential_checked(n - 1, at(xs, i));
    norm = normalize_weights(raw);
    const CategoricalSampler cat(norm);
    const RngStream step_stream =
        run_stream.substream("step", static_cast<std::uint64_t>(n));
    for (int i = 0; i < n_particles; ++i) {
      RngStream rng =
          step_stream.substream("pair", static_cast<std::uint64_t>(i));
      const int a = cat.draw(rng);
      model.sample_kernel_f(n, at(xs, a), at(next, i), rng);
    }
    xs.swap(next);
    result.estimate_by_time.push_back(estimate());
  }

  for (int i = 0; i < n_particles; ++i)
    raw[i] = model.potential_checked(horizon, at(xs, i));
  result.ess = effective_sample_size(normalize_weights(raw));
  return result;
}

}  // namespace csmc
