#include "csmc/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "csmc/errors.hpp"
#include "csmc/parallel.hpp"

namespace csmc {

int ReplicateBatch::failures() const {
  int n = 0;
  for (const auto& r : reports) n += r.failed ? 1 : 0;
  return n;
}

double ReplicateBatch::failure_rate() const {
  return reports.empty() ? 0.0
                         : static_cast<double>(failures()) / reports.size();
}

double SweepResult::failure_rate() const {
  if (raw.empty()) return 0.0;
  int n = 0;
  for (const auto& r : raw) n += r.failed ? 1 : 0;
  return static_cast<double>(n) / raw.size();
}

ReplicateBatch run_replicates(const FeynmanKacModel& model,
                              const TestFunction& phi, const RunOptions& opts,
                              const std::string& model_name, int level, int R,
                              const RngStream& master,
                              const ExperimentContext& ctx, bool keep_series) {
  if (R < 1) throw Error("run_replicates needs R >= 1");
  ReplicateBatch batch;
  batch.reports.resize(R);
  if (keep_series) batch.series.resize(R);

  parallel_for(R, ctx.threads, [&](int r) {
    const RngStream rep_stream =
        master.substream("replicate", static_cast<std::uint64_t>(r));
    ReplicateReport& rep = batch.reports[r];
    rep.scheme = opts.scheme;
    rep.model_name = model_name;
    rep.level = level;
    rep.horizon = opts.horizon;
    rep.n_particles = opts.n_particles;
    rep.replicate_index = r;
    rep.seed = rep_stream.key();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const RunResult run = run_coupled_filter(model, phi, opts, rep_stream);
      rep.pred_diff = run.series.pred_diff[opts.horizon];
      rep.filt_diff = run.series.filt_diff[opts.horizon];
      rep.mean_sq_dist = run.series.mean_sq_dist[opts.horizon];
      rep.decouple_frac = run.series.decouple_frac[opts.horizon];
      rep.ess_f = run.ess_f;
      rep.ess_c = run.ess_c;
      rep.rejection = run.rejection;
      rep.coupled_index_fraction = run.coupled_index_fraction_mean;
      if (keep_series) batch.series[r] = run.series;
    } catch (const Error& e) {
      rep.failed = true;
      rep.error = e.what();
    }
    if (ctx.record_timing) {
      rep.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
  });
  return batch;
}

double sample_mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : stable_sum(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

CltCheckResult clt_check(std::span<const double> scaled_errors) {
  CltCheckResult out;
  out.sample_mean = sample_mean(scaled_errors);
  out.sample_var = sample_variance(scaled_errors);
  if (!(out.sample_var > 0.0)) {
    out.degenerate = true;
    out.ks_stat = 1.0;
    return out;
  }
  std::vector<double> sorted(scaled_errors.begin(), scaled_errors.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(out.sample_var);
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i] / sd);
    d = std::max(d, std::fabs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  out.ks_stat = d;
  return out;
}

double kolmogorov_critical(double alpha, int n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n);
}

std::vector<std::vector<double>> collect_scaled_errors(
    const FeynmanKacModel& model, const TestFunction& phi, SchemeId scheme,
    std::span<const int> horizons, int n_particles, int R,
    std::span<const double> truth_by_horizon, const RngStream& master,
    const ExperimentContext& ctx) {
  if (horizons.empty() || truth_by_horizon.size() != horizons.size())
    throw Error("collect_scaled_errors: horizons/truth mismatch");
  RunOptions opts;
  opts.scheme = scheme;
  opts.horizon = *std::max_element(horizons.begin(), horizons.end());
  opts.n_particles = n_particles;
  opts.track_filt_diff = false;
  const ReplicateBatch batch = run_replicates(
      model, phi, opts, "clt", 0, R, master, ctx, /*keep_series=*/true);
  if (batch.failures() > 0)
    throw Error("clt error collection had failing replicates");

  const double scale = std::sqrt(static_cast<double>(n_particles));
  std::vector<std::vector<double>> errors(horizons.size());
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    errors[h].resize(R);
    for (int r = 0; r < R; ++r)
      errors[h][r] =
          scale * (batch.series[r].pred_diff[horizons[h]] - truth_by_horizon[h]);
  }
  return errors;
}

OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw Error("ols_fit needs >= 3 matched points");
  const double n = static_cast<double>(xs.size());
  const double mx = sample_mean(xs), my = sample_mean(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("ols_fit: degenerate abscissae");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += resid * resid;
  }
  fit.slope_se = xs.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  return fit;
}

namespace {

// Variance over the non-failed replicates of a per-replicate statistic.
std::vector<double> surviving(const ReplicateBatch& batch,
                              const std::vector<double>& values) {
  std::vector<double> xs;
  xs.reserve(values.size());
  for (std::size_t r = 0; r < values.size(); ++r)
    if (!batch.reports[r].failed) xs.push_back(values[r]);
  return xs;
}

}  // namespace

SweepResult variance_level_sweep(const LevelModelFamily& family,
                                 SchemeId scheme, const TestFunction& phi,
                                 int horizon, std::span<const int> levels,
                                 int n_particles, int R,
                                 const RngStream& master,
                                 const ExperimentContext& ctx) {
  if (levels.size() < 4)
    throw Error("variance_level_sweep needs >= 4 levels for the slope fit");
  SweepResult out;
  out.axis = "level";
  out.replicates = R;

  RunOptions opts;
  opts.scheme = scheme;
  opts.horizon = horizon;
  opts.n_particles = n_particles;
  opts.track_filt_diff = false;

  std::vector<double> log_dt, log_nvar;
  for (int level : levels) {
    const FeynmanKacModel model = family.make(level);
    const RngStream level_master =
        master.substream("sweep-level", static_cast<std::uint64_t>(level));
    const ReplicateBatch batch = run_replicates(
        model, phi, opts, family.name, level, R, level_master, ctx);

    std::vector<double> preds, msds, dfracs;
    for (const auto& rep : batch.reports) {
      if (rep.failed) continue;
      preds.push_back(rep.pred_diff);
      msds.push_back(rep.mean_sq_dist);
      dfracs.push_back(rep.decouple_frac);
    }
    SweepPoint pt;
    pt.axis_value = level;
    pt.var_pred_diff = sample_variance(preds);
    pt.nvar = pt.var_pred_diff * n_particles;
    pt.mean_sq_dist = sample_mean(msds);
    pt.decouple_frac = sample_mean(dfracs);
    pt.failures = batch.failures();
    out.points.push_back(pt);
    out.raw.insert(out.raw.end(), batch.reports.begin(), batch.reports.end());

    if (pt.var_pred_diff > 0.0) {
      log_dt.push_back(-static_cast<double>(level) * std::log(2.0));
      log_nvar.push_back(std::log(pt.nvar));
    }
  }
  if (log_dt.size() >= 3) {
    const OlsFit fit = ols_fit(log_dt, log_nvar);
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
  }
  return out;
}

SweepResult time_uniformity_sweep(const LevelModelFamily& family,
                                  SchemeId scheme, const TestFunction& phi,
                                  int level, std::span<const int> horizons,
                                  int n_particles, int R,
                                  const RngStream& master,
                                  const ExperimentContext& ctx) {
  if (horizons.size() < 3)
    throw Error("time_uniformity_sweep needs >= 3 horizons");
  const int max_horizon = *std::max_element(horizons.begin(), horizons.end());

  RunOptions opts;
  opts.scheme = scheme;
  opts.horizon = max_horizon;
  opts.n_particles = n_particles;
  opts.track_filt_diff = false;

  const FeynmanKacModel model = family.make(level);
  const ReplicateBatch batch =
      run_replicates(model, phi, opts, family.name, level, R,
                     master.substream("uniformity", 0), ctx, true);

  SweepResult out;
  out.axis = "horizon";
  out.replicates = R;
  out.raw = batch.reports;

  std::vector<double> log_n, log_var;
  double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
  for (int h : horizons) {
    std::vector<double> preds, msds, dfracs;
    for (int r = 0; r < R; ++r) {
      if (batch.reports[r].failed) continue;
      preds.push_back(batch.series[r].pred_diff[h]);
      msds.push_back(batch.series[r].mean_sq_dist[h]);
      dfracs.push_back(batch.series[r].decouple_frac[h]);
    }
    SweepPoint pt;
    pt.axis_value = h;
    pt.var_pred_diff = sample_variance(preds);
    pt.nvar = pt.var_pred_diff * n_particles;
    pt.mean_sq_dist = sample_mean(msds);
    pt.decouple_frac = sample_mean(dfracs);
    pt.failures = batch.failures();
    out.points.push_back(pt);
    if (pt.var_pred_diff > 0.0) {
      vmin = std::min(vmin, pt.var_pred_diff);
      vmax = std::max(vmax, pt.var_pred_diff);
      log_n.push_back(std::log(static_cast<double>(h)));
      log_var.push_back(std::log(pt.var_pred_diff));
    }
  }
  if (vmax > 0.0 && vmin < std::numeric_limits<double>::infinity())
    out.max_min_var_ratio = vmax / vmin;
  if (log_n.size() >= 4) {
    const OlsFit fit = ols_fit(log_n, log_var);
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
  }
  return out;
}

}  // namespace csmc
