#include "csmc/schemes.hpp"

#include <algorithm>
#include <numeric>

#include "csmc/errors.hpp"

namespace csmc {

std::string_view to_string(SchemeId s) {
  switch (s) {
    case SchemeId::IR:
      return "IR";
    case SchemeId::MCR:
      return "MCR";
    case SchemeId::MC:
      return "MC";
    case SchemeId::W:
      return "W";
  }
  return "?";
}

std::optional<SchemeId> scheme_from_string(std::string_view token) {
  if (token == "IR") return SchemeId::IR;
  if (token == "MCR") return SchemeId::MCR;
  if (token == "MC") return SchemeId::MC;
  if (token == "W") return SchemeId::W;
  return std::nullopt;
}

RejectionStats& RejectionStats::operator+=(const RejectionStats& o) {
  pairs += o.pairs;
  accept_at_step1 += o.accept_at_step1;
  loop_iterations += o.loop_iterations;
  max_iterations_cap = std::max(max_iterations_cap, o.max_iterations_cap);
  return *this;
}

void validate_scheme_capabilities(const FeynmanKacModel& model, SchemeId s) {
  if (s == SchemeId::MC) {
    if (!model.has_kernel_densities() && !model.make_mixture_density)
      throw MissingDensity("MC scheme requires kernel density views");
    if (!model.has_init_densities())
      throw MissingDensity(
          "MC scheme requires initial density views (maximally coupled "
          "initialization)");
  }
  if (s == SchemeId::W && model.state_dim != 1)
    throw DimensionUnsupported("W scheme requires state_dim == 1, got " +
                               std::to_string(model.state_dim));
}

namespace {

void check_step_preconditions(const CoupledCloud& cloud, int n) {
  if (n < 1) throw Error("filter step needs n >= 1");
  if (cloud.size < 1) throw Error("filter step on an empty cloud");
  if (cloud.time_index != n - 1)
    throw Error("cloud at time " + std::to_string(cloud.time_index) +
                " cannot step to time " + std::to_string(n));
}

void assign(StateView dst, ConstStateView src) {
  std::copy(src.begin(), src.end(), dst.begin());
}

}  // namespace

CoupledCloud ircpf_step(const CoupledCloud& cloud, const FeynmanKacModel& model,
                        int n, const RngStream& stream) {
  check_step_preconditions(cloud, n);
  const WeightView w = compute_weights(model, cloud, n - 1);
  const CategoricalSampler cat_f(w.norm_f), cat_c(w.norm_c);

  CoupledCloud out = CoupledCloud::with_size(cloud.size, cloud.dim);
  out.time_index = n;
  for (int i = 0; i < cloud.size; ++i) {
    RngStream rng = stream.substream("pair", static_cast<std::uint64_t>(i));
    const int ai = cat_f.draw(rng);
    const int aj = cat_c.draw(rng);
    model.sample_kernel_coupled(n, cloud.f(ai), cloud.c(aj), out.f(i), out.c(i),
                                rng);
  }
  return out;
}

CoupledCloud mcrpf_step(const CoupledCloud& cloud, const FeynmanKacModel& model,
                        int n, const RngStream& stream,
                        double* coupled_index_fraction) {
  check_step_preconditions(cloud, n);
  const WeightView w = compute_weights(model, cloud, n - 1);
  const CategoricalCoupler coupler(w.norm_f, w.norm_c);

  CoupledCloud out = CoupledCloud::with_size(cloud.size, cloud.dim);
  out.time_index = n;
  long coupled = 0;
  for (int i = 0; i < cloud.size; ++i) {
    RngStream rng = stream.substream("pair", static_cast<std::uint64_t>(i));
    const IndexPair idx = coupler.draw(rng);
    coupled += idx.coupled ? 1 : 0;
    model.sample_kernel_coupled(n, cloud.f(idx.i), cloud.c(idx.j), out.f(i),
                                out.c(i), rng);
  }
  if (coupled_index_fraction)
    *coupled_index_fraction = static_cast<double>(coupled) / cloud.size;
  return out;
}

double predictive_mixture_density(
    const MixtureView& mix,
    const std::function<double(int, ConstStateView, ConstStateView)>&
        kernel_density,
    int n, ConstStateView x) {
  if (!kernel_density)
    throw MissingDensity("predictive mixture needs a kernel density view");
  double acc = 0.0;
  for (int i = 0; i < mix.n_points; ++i)
    acc += mix.weights[i] * kernel_density(n, mix.point(i), x);
  return acc;
}

MixtureDensityFn make_mixture_density(const FeynmanKacModel& model, int n,
                                      Side s, const MixtureView& mix) {
  if (model.make_mixture_density) return model.make_mixture_density(n, s, mix);
  const auto& kd = model.density_kernel(s);
  if (!kd) throw MissingDensity("model has no kernel density view");

  // Group exactly-equal support points so repeated atoms (finite-state
  // models, point-mass clouds) cost one density call per distinct atom.
  const int dim = mix.dim;
  std::vector<int> order(mix.n_points);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::lexicographical_compare(
        mix.points + static_cast<std::size_t>(a) * dim,
        mix.points + static_cast<std::size_t>(a + 1) * dim,
        mix.points + static_cast<std::size_t>(b) * dim,
        mix.points + static_cast<std::size_t>(b + 1) * dim);
  });
  std::vector<double> pts, wts;
  pts.reserve(static_cast<std::size_t>(mix.n_points) * dim);
  for (int k = 0; k < mix.n_points;) {
    const double* p = mix.points + static_cast<std::size_t>(order[k]) * dim;
    double wsum = 0.0;
    int m = k;
    for (; m < mix.n_points; ++m) {
      const double* q = mix.points + static_cast<std::size_t>(order[m]) * dim;
      if (!std::equal(p, p + dim, q)) break;
      wsum += mix.weights[order[m]];
    }
    pts.insert(pts.end(), p, p + dim);
    wts.push_back(wsum);
    k = m;
  }
  return [kd, n, dim, pts = std::move(pts),
          wts = std::move(wts)](ConstStateView x) {
    double acc = 0.0;
    for (std::size_t u = 0; u < wts.size(); ++u)
      acc += wts[u] *
             kd(n, ConstStateView{pts.data() + u * dim,
                                  static_cast<std::size_t>(dim)}, x);
    return acc;
  };
}

std::pair<CoupledCloud, RejectionStats> mcpf_step(const CoupledCloud& cloud,
                                                  const FeynmanKacModel& model,
                                                  int n,
                                                  const RngStream& stream,
                                                  long max_iterations) {
  check_step_preconditions(cloud, n);
  if (max_iterations < 1) throw Error("mcpf_step needs max_iterations >= 1");
  const WeightView w = compute_weights(model, cloud, n - 1);
  const int dim = cloud.dim;
  const MixtureView mix_f{cloud.xs_f.data(), w.norm_f.data(), cloud.size, dim};
  const MixtureView mix_c{cloud.xs_c.data(), w.norm_c.data(), cloud.size, dim};
  const MixtureDensityFn dens_f = make_mixture_density(model, n, Side::f, mix_f);
  const MixtureDensityFn dens_c = make_mixture_density(model, n, Side::c, mix_c);
  const CategoricalSampler cat_f(w.norm_f), cat_c(w.norm_c);

  CoupledCloud out = CoupledCloud::with_size(cloud.size, dim);
  out.time_index = n;
  RejectionStats stats;
  stats.pairs = cloud.size;
  stats.max_iterations_cap = max_iterations;

  std::vector<double> xf(dim), xc(dim);
  for (int i = 0; i < cloud.size; ++i) {
    RngStream rng = stream.substream("pair", static_cast<std::uint64_t>(i));
    // Stage 1: propose from the f-mixture, accept as a common value.
    const int af = cat_f.draw(rng);
    model.sample_kernel_f(n, cloud.f(af), xf, rng);
    const double ff = dens_f(xf);
    const double fc = dens_c(xf);
    if (rng.uniform01() * ff < fc) {
      assign(out.f(i), xf);
      assign(out.c(i), xf);
      ++stats.accept_at_step1;
      continue;
    }
    // Stage 2: propose from the c-mixture until it lands in the residual.
    long iter = 0;
    bool accepted = false;
    while (iter < max_iterations) {
      ++iter;
      const int ac = cat_c.draw(rng);
      model.sample_kernel_c(n, cloud.c(ac), xc, rng);
      const double fcy = dens_c(xc);
      const double ffy = dens_f(xc);
      if (rng.uniform01() * fcy > ffy) {
        assign(out.f(i), xf);
        assign(out.c(i), xc);
        accepted = true;
        break;
      }
    }
    stats.loop_iterations += iter;
    if (!accepted) throw RejectionBudgetExceeded(max_iterations);
  }
  return {std::move(out), stats};
}

void sample_init_maximal_coupling(const FeynmanKacModel& model, StateView f,
                                  StateView c, RngStream& rng,
                                  long max_iterations, RejectionStats& stats) {
  if (!model.has_init_densities())
    throw MissingDensity("maximally coupled initialization needs init densities");
  ++stats.pairs;
  stats.max_iterations_cap = std::max(stats.max_iterations_cap, max_iterations);
  model.sample_init_f(f, rng);
  const double pf = model.density_init_f(f);
  const double pc = model.density_init_c(f);
  if (rng.uniform01() * pf < pc) {
    assign(c, f);
    ++stats.accept_at_step1;
    return;
  }
  long iter = 0;
  while (iter < max_iterations) {
    ++iter;
    model.sample_init_c(c, rng);
    const double qc = model.density_init_c(c);
    const double qf = model.density_init_f(c);
    if (rng.uniform01() * qc > qf) {
      stats.loop_iterations += iter;
      return;
    }
  }
  stats.loop_iterations += iter;
  throw RejectionBudgetExceeded(max_iterations);
}

CoupledCloud wcpf_step(const CoupledCloud& cloud, const FeynmanKacModel& model,
                       int n, const RngStream& stream) {
  check_step_preconditions(cloud, n);
  if (cloud.dim != 1 || model.state_dim != 1)
    throw DimensionUnsupported("W scheme requires state_dim == 1");
  const WeightView w = compute_weights(model, cloud, n - 1);

  // One sort per marginal per step, then O(log N) per inversion.
  auto sorted_cdf = [&](const std::vector<double>& xs,
                        const std::vector<double>& wn) {
    std::vector<int> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return xs[a] < xs[b]; });
    std::vector<double> pts(xs.size()), wts(xs.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      pts[k] = xs[order[k]];
      wts[k] = wn[order[k]];
    }
    return WeightedCdf(pts, wts);
  };
  const WeightedCdf cdf_f = sorted_cdf(cloud.xs_f, w.norm_f);
  const WeightedCdf cdf_c = sorted_cdf(cloud.xs_c, w.norm_c);

  CoupledCloud out = CoupledCloud::with_size(cloud.size, 1);
  out.time_index = n;
  for (int i = 0; i < cloud.size; ++i) {
    RngStream rng = stream.substream("pair", static_cast<std::uint64_t>(i));
    const double u = rng.uniform01();
    const double af = cdf_f.quantile(u);
    const double ac = cdf_c.quantile(u);
    model.sample_kernel_coupled(n, ConstStateView{&af, 1},
                                ConstStateView{&ac, 1}, out.f(i), out.c(i),
                                rng);
  }
  return out;
}

std::pair<CoupledCloud, StepDiagnostics> scheme_step(
    SchemeId scheme, const CoupledCloud& cloud, const FeynmanKacModel& model,
    int n, const RngStream& stream, const StepOptions& opts) {
  validate_scheme_capabilities(model, scheme);
  StepDiagnostics diag;
  switch (scheme) {
    case SchemeId::IR:
      return {ircpf_step(cloud, model, n, stream), diag};
    case SchemeId::MCR: {
      CoupledCloud out =
          mcrpf_step(cloud, model, n, stream, &diag.coupled_index_fraction);
      return {std::move(out), diag};
    }
    case SchemeId::MC: {
      auto [out, stats] =
          mcpf_step(cloud, model, n, stream, opts.max_rejection_iterations);
      diag.rejection = stats;
      return {std::move(out), diag};
    }
    case SchemeId::W:
      return {wcpf_step(cloud, model, n, stream), diag};
  }
  throw Error("unknown scheme");
}

}  // namespace csmc
