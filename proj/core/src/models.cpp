#include "csmc/models.hpp"

#include <cmath>
#include <memory>

#include "csmc/errors.hpp"
#include "csmc/gauss_mixture.hpp"

namespace csmc {

namespace {

int observation_at(const std::vector<int>& ys, int n) {
  if (n < 0 || n >= static_cast<int>(ys.size()))
    throw Error("potential asked for observation " + std::to_string(n) +
                " but only " + std::to_string(ys.size()) + " are available");
  return ys[static_cast<std::size_t>(n)];
}

double logistic_potential(double x, int y, const OuObservationParams& obs) {
  const double g = ou_emission_prob(x, obs);
  return y == 1 ? g : 1.0 - g;
}

// Synchronous coupled Euler for dZ = -(3/2) Z dt + dW at levels (l, l-1),
// specialized so the per-pair hot path has no indirection.
void ou_coupled_kernel(int fine_level, double xf, double xc, double& uf,
                       double& uc, RngStream& rng) {
  const double dt = 1.0 / static_cast<double>(1L << fine_level);
  const double sdt = std::sqrt(dt);
  const double af = 1.0 - 1.5 * dt;
  const double ac = 1.0 - 3.0 * dt;  // coarse step is 2*dt
  double f = xf, c = xc;
  for (long s = 0; s < (1L << (fine_level - 1)); ++s) {
    const double n0 = rng.normal();
    const double n1 = rng.normal();
    f = af * f + sdt * n0;
    f = af * f + sdt * n1;
    c = ac * c + sdt * (n0 + n1);
  }
  uf = f;
  uc = c;
}

}  // namespace

double ou_emission_prob(double x, const OuObservationParams& obs) {
  const double sig = 1.0 / (1.0 + std::exp(-x));
  return obs.a + (obs.b - obs.a) * sig;
}

std::vector<int> synthesize_ou_observations(int count, int level,
                                            double x_star,
                                            const OuObservationParams& obs,
                                            RngStream rng) {
  const OuParams p = ou_transition_params(level);
  std::vector<int> ys(count);
  double x = p.alpha * x_star + std::sqrt(p.beta) * rng.normal();
  for (int k = 0; k < count; ++k) {
    ys[k] = rng.uniform01() < ou_emission_prob(x, obs) ? 1 : 0;
    x = p.alpha * x + std::sqrt(p.beta) * rng.normal();
  }
  return ys;
}

FeynmanKacModel make_ou_coupled_model(int fine_level, double x_star,
                                      const OuObservationParams& obs,
                                      std::vector<int> observations) {
  if (fine_level < 0) throw Error("fine level must be >= 0");
  const int lf = fine_level;
  const int lc = fine_level >= 1 ? fine_level - 1 : 0;
  const OuParams pf = ou_transition_params(lf);
  const OuParams pc = ou_transition_params(lc);
  const double sd_f = std::sqrt(pf.beta), sd_c = std::sqrt(pc.beta);
  auto ys = std::make_shared<const std::vector<int>>(std::move(observations));

  FeynmanKacModel m;
  m.state_dim = 1;
  m.potential_bound = std::max(obs.b, 1.0 - obs.a);
  m.potential = [obs, ys](int n, ConstStateView x) {
    return logistic_potential(x[0], observation_at(*ys, n), obs);
  };

  m.sample_init_f = [pf, sd_f, x_star](StateView out, RngStream& rng) {
    out[0] = pf.alpha * x_star + sd_f * rng.normal();
  };
  m.sample_init_c = [pc, sd_c, x_star](StateView out, RngStream& rng) {
    out[0] = pc.alpha * x_star + sd_c * rng.normal();
  };
  m.sample_init_coupled = [lf, pf, sd_f, x_star](StateView f, StateView c,
                                                 RngStream& rng) {
    if (lf >= 1) {
      ou_coupled_kernel(lf, x_star, x_star, f[0], c[0], rng);
    } else {
      f[0] = pf.alpha * x_star + sd_f * rng.normal();
      c[0] = f[0];
    }
  };

  m.sample_kernel_f = [pf, sd_f](int, ConstStateView x, StateView out,
                                 RngStream& rng) {
    out[0] = pf.alpha * x[0] + sd_f * rng.normal();
  };
  m.sample_kernel_c = [pc, sd_c](int, ConstStateView x, StateView out,
                                 RngStream& rng) {
    out[0] = pc.alpha * x[0] + sd_c * rng.normal();
  };
  m.sample_kernel_coupled = [lf, pf, sd_f](int, ConstStateView xf,
                                           ConstStateView xc, StateView uf,
                                           StateView uc, RngStream& rng) {
    if (lf >= 1) {
      ou_coupled_kernel(lf, xf[0], xc[0], uf[0], uc[0], rng);
    } else {
      const double z = rng.normal();
      uf[0] = pf.alpha * xf[0] + sd_f * z;
      uc[0] = pf.alpha * xc[0] + sd_f * z;
    }
  };

  m.density_kernel_f = [lf](int, ConstStateView x, ConstStateView y) {
    return ou_transition_density(x[0], y[0], lf);
  };
  m.density_kernel_c = [lc](int, ConstStateView x, ConstStateView y) {
    return ou_transition_density(x[0], y[0], lc);
  };
  // Initial laws are the unit-time transitions from x*.
  m.density_init_f = [lf, x_star](ConstStateView x) {
    return ou_transition_density(x_star, x[0], lf);
  };
  m.density_init_c = [lc, x_star](ConstStateView x) {
    return ou_transition_density(x_star, x[0], lc);
  };

  // Predictive mixtures are Gaussian-kernel mixtures with a shared variance:
  // precompute the means once, then one vectorized pass per evaluation.
  m.make_mixture_density = [pf, pc](int, Side s,
                                    const MixtureView& mix) -> MixtureDensityFn {
    const OuParams p = (s == Side::f) ? pf : pc;
    std::vector<double> means(mix.n_points), weights(mix.n_points);
    for (int i = 0; i < mix.n_points; ++i) {
      means[i] = p.alpha * mix.points[i];
      weights[i] = mix.weights[i];
    }
    const double inv_two_beta = 0.5 / p.beta;
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * p.beta);
    return [means = std::move(means), weights = std::move(weights),
            inv_two_beta, norm](ConstStateView x) {
      return weighted_normal_mixture(means.data(), weights.data(),
                                     static_cast<int>(means.size()), x[0],
                                     inv_two_beta, norm);
    };
  };
  return m;
}

LevelModelFamily make_ou_family(double x_star, const OuObservationParams& obs,
                                std::vector<int> observations) {
  LevelModelFamily fam;
  fam.name = "ou";
  fam.state_dim = 1;
  fam.make = [x_star, obs, ys = std::move(observations)](int fine_level) {
    return make_ou_coupled_model(fine_level, x_star, obs, ys);
  };
  return fam;
}

FeynmanKacModel make_linear_diffusion_model(int fine_level,
                                            const LinearDiffusionParams& p,
                                            const OuObservationParams& obs,
                                            std::vector<int> observations) {
  if (fine_level < 0) throw Error("fine level must be >= 0");
  auto spec = std::make_shared<DiffusionSpec>();
  spec->dim = p.dim;
  spec->start.assign(p.dim, p.x_star);
  const double scale = p.drift_scale, noise = p.noise;
  spec->drift = [scale](ConstStateView x, StateView out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
  };
  const int d = p.dim;
  spec->diffusion = [noise, d](ConstStateView, StateView out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i) * d + i] = noise;
  };

  const int lf = fine_level;
  const int lc = fine_level >= 1 ? fine_level - 1 : 0;
  auto ys = std::make_shared<const std::vector<int>>(std::move(observations));

  FeynmanKacModel m;
  m.state_dim = p.dim;
  m.potential_bound = std::max(obs.b, 1.0 - obs.a);
  m.potential = [obs, ys](int n, ConstStateView x) {
    return logistic_potential(x[0], observation_at(*ys, n), obs);
  };
  m.sample_init_f = [spec, lf](StateView out, RngStream& rng) {
    euler_unit_step(spec->start, LevelParams::at(lf), *spec, out, rng);
  };
  m.sample_init_c = [spec, lc](StateView out, RngStream& rng) {
    euler_unit_step(spec->start, LevelParams::at(lc), *spec, out, rng);
  };
  m.sample_init_coupled = [spec, lf](StateView f, StateView c,
                                     RngStream& rng) {
    if (lf >= 1) {
      euler_coupled_unit_step(spec->start, spec->start, lf, *spec, f, c, rng);
    } else {
      euler_unit_step(spec->start, LevelParams::at(0), *spec, f, rng);
      std::copy(f.begin(), f.end(), c.begin());
    }
  };
  m.sample_kernel_f = [spec, lf](int, ConstStateView x, StateView out,
                                 RngStream& rng) {
    euler_unit_step(x, LevelParams::at(lf), *spec, out, rng);
  };
  m.sample_kernel_c = [spec, lc](int, ConstStateView x, StateView out,
                                 RngStream& rng) {
    euler_unit_step(x, LevelParams::at(lc), *spec, out, rng);
  };
  m.sample_kernel_coupled = [spec, lf](int, ConstStateView xf,
                                       ConstStateView xc, StateView uf,
                                       StateView uc, RngStream& rng) {
    if (lf >= 1) {
      euler_coupled_unit_step(xf, xc, lf, *spec, uf, uc, rng);
    } else {
      // Same level both sides: drive both with one increment sequence.
      RngStream copy = rng;
      euler_unit_step(xf, LevelParams::at(0), *spec, uf, copy);
      euler_unit_step(xc, LevelParams::at(0), *spec, uc, rng);
    }
  };
  return m;
}

LevelModelFamily make_linear_diffusion_family(const LinearDiffusionParams& p,
                                              const OuObservationParams& obs,
                                              std::vector<int> observations) {
  LevelModelFamily fam;
  fam.name = "diffusion";
  fam.state_dim = p.dim;
  fam.make = [p, obs, ys = std::move(observations)](int fine_level) {
    return make_linear_diffusion_model(fine_level, p, obs, ys);
  };
  return fam;
}

}  // namespace csmc
