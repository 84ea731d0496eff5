#include "csmc/diffusion.hpp"

#include <cmath>

#include "csmc/errors.hpp"

namespace csmc {

namespace {

void check_finite(ConstStateView x, int level) {
  for (double v : x)
    if (!std::isfinite(v))
      throw NonFiniteState("non-finite state in Euler step at level " +
                           std::to_string(level));
}

// x <- x + a(x) dt + b(x) * sqrt_dt * xi, with xi already scaled by sqrt_dt.
void euler_inner_step(const DiffusionSpec& spec, StateView x,
                      ConstStateView scaled_noise, double dt, StateView drift,
                      StateView bmat, StateView next) {
  const int d = spec.dim;
  spec.drift(x, drift);
  spec.diffusion(x, bmat);
  for (int r = 0; r < d; ++r) {
    double acc = x[r] + drift[r] * dt;
    const double* row = bmat.data() + static_cast<std::size_t>(r) * d;
    for (int k = 0; k < d; ++k) acc += row[k] * scaled_noise[k];
    next[r] = acc;
  }
  std::copy(next.begin(), next.end(), x.begin());
}

}  // namespace

LevelParams LevelParams::at(int l) {
  if (l < 0) throw Error("Euler level must be >= 0");
  LevelParams lp;
  lp.level = l;
  lp.steps_per_unit = 1L << l;
  lp.step = 1.0 / static_cast<double>(lp.steps_per_unit);
  return lp;
}

void euler_unit_step(ConstStateView x, const LevelParams& lp,
                     const DiffusionSpec& spec, StateView out, RngStream& rng) {
  const int d = spec.dim;
  const double sqrt_dt = std::sqrt(lp.step);
  std::vector<double> drift(d), bmat(static_cast<std::size_t>(d) * d), next(d),
      noise(d);
  std::copy(x.begin(), x.end(), out.begin());
  for (long s = 0; s < lp.steps_per_unit; ++s) {
    for (int k = 0; k < d; ++k) noise[k] = sqrt_dt * rng.normal();
    euler_inner_step(spec, out, noise, lp.step, drift, bmat, next);
    check_finite(out, lp.level);
  }
}

void euler_coupled_unit_step(ConstStateView x_f, ConstStateView x_c, int level,
                             const DiffusionSpec& spec, StateView out_f,
                             StateView out_c, RngStream& rng) {
  if (level < 1) throw Error("coupled Euler step needs level >= 1");
  const LevelParams fine = LevelParams::at(level);
  const double dt_f = fine.step, dt_c = 2.0 * fine.step;
  const double sqrt_dt_f = std::sqrt(dt_f);
  const int d = spec.dim;

  std::vector<double> drift(d), bmat(static_cast<std::size_t>(d) * d), next(d);
  std::vector<double> n0(d), n1(d), nsum(d);
  std::copy(x_f.begin(), x_f.end(), out_f.begin());
  std::copy(x_c.begin(), x_c.end(), out_c.begin());

  for (long s = 0; s < fine.steps_per_unit / 2; ++s) {
    for (int k = 0; k < d; ++k) n0[k] = sqrt_dt_f * rng.normal();
    for (int k = 0; k < d; ++k) n1[k] = sqrt_dt_f * rng.normal();
    euler_inner_step(spec, out_f, n0, dt_f, drift, bmat, next);
    euler_inner_step(spec, out_f, n1, dt_f, drift, bmat, next);
    // The coarse increment is the sum of the two fine Brownian increments.
    for (int k = 0; k < d; ++k) nsum[k] = n0[k] + n1[k];
    euler_inner_step(spec, out_c, nsum, dt_c, drift, bmat, next);
    check_finite(out_f, level);
    check_finite(out_c, level - 1);
  }
}

OuParams ou_transition_params(int level) {
  if (level < 0 || level > 20)
    throw Error("OU transition params defined for levels 0..20");
  const double dt = LevelParams::at(level).step;
  const double a1 = 1.0 - 1.5 * dt;
  // a1^(2^l) and (a1^2)^(2^l) by repeated squaring: exact dyadic exponents.
  double alpha = a1;
  double a2m = a1 * a1;
  for (int i = 0; i < level; ++i) {
    alpha *= alpha;
    a2m *= a2m;
  }
  OuParams p;
  p.alpha = alpha;
  p.beta = dt * (1.0 - a2m) / (1.0 - a1 * a1);
  return p;
}

double ou_transition_density(double x, double y, int level) {
  const OuParams p = ou_transition_params(level);
  const double z = y - p.alpha * x;
  return std::exp(-0.5 * z * z / p.beta) /
         std::sqrt(2.0 * M_PI * p.beta);
}

ProbeResult weak_error_probe(const DiffusionSpec& spec, int level,
                             const TestFunction& phi, int n_samples,
                             const RngStream& stream) {
  if (n_samples < 1000) throw Error("weak_error_probe needs N >= 1000");
  std::vector<double> xf(spec.dim), xc(spec.dim);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    RngStream rng = stream.substream("probe", static_cast<std::uint64_t>(i));
    euler_coupled_unit_step(spec.start, spec.start, level, spec, xf, xc, rng);
    const double d = phi(xf) - phi(xc);
    sum += d;
    sum_sq += d * d;
  }
  ProbeResult r;
  r.estimate = sum / n_samples;
  const double var =
      std::max(0.0, (sum_sq - sum * sum / n_samples) / (n_samples - 1));
  r.std_error = std::sqrt(var / n_samples);
  return r;
}

}  // namespace csmc
