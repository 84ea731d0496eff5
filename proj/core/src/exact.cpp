#include "csmc/oracle/exact.hpp"

#include <cmath>

#include "csmc/errors.hpp"

namespace csmc::oracle {

namespace {

Eigen::VectorXd weighted_normalized(const Eigen::VectorXd& law,
                                    const Eigen::VectorXd& g, int time) {
  const Eigen::VectorXd w = law.cwiseProduct(g);
  const double total = w.sum();
  if (!(total > 0.0)) throw ZeroMass(time);
  return w / total;
}

// out[u,v] = sum_{x,y} C(x,y) T(x,y,u,v)
Eigen::MatrixXd push_through(const Eigen::MatrixXd& coupling,
                             const CoupledTensor& t) {
  const int K = t.k;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, K);
  for (int x = 0; x < K; ++x)
    for (int y = 0; y < K; ++y) {
      const double mass = coupling(x, y);
      if (mass == 0.0) continue;
      for (int u = 0; u < K; ++u)
        for (int v = 0; v < K; ++v) out(u, v) += mass * t(x, y, u, v);
    }
  return out;
}

}  // namespace

Eigen::VectorXd exact_predictor(const FiniteModel& model, int n, Side s) {
  if (n < 0) throw Error("predictor time must be >= 0");
  Eigen::VectorXd eta = (s == Side::f) ? model.init_f : model.init_c;
  for (int t = 1; t <= n; ++t) {
    const Eigen::VectorXd w = weighted_normalized(eta, model.potential(t - 1), t - 1);
    eta = (w.transpose() * model.transition(t, s)).transpose();
    const double total = eta.sum();
    if (!(total > 0.0)) throw ZeroMass(t);
    eta /= total;
  }
  return eta;
}

Eigen::VectorXd exact_filter(const FiniteModel& model, int n, Side s) {
  return weighted_normalized(exact_predictor(model, n, s), model.potential(n),
                             n);
}

CouplingMatrix exact_coupled_ir(const FiniteModel& model, int n) {
  CouplingMatrix out;
  out.time_index = n;
  if (n == 0) {
    out.m = model.init_coupled;
    return out;
  }
  const Eigen::VectorXd rf = exact_filter(model, n - 1, Side::f);
  const Eigen::VectorXd rc = exact_filter(model, n - 1, Side::c);
  out.m = push_through(rf * rc.transpose(), model.transition_coupled(n));
  return out;
}

CouplingMatrix exact_coupled_mcr(const FiniteModel& model, int n) {
  const int K = model.k();
  Eigen::MatrixXd mu = model.init_coupled;
  for (int t = 1; t <= n; ++t) {
    const Eigen::VectorXd& g = model.potential(t - 1);
    // a = mu(G (x) 1), b = mu(1 (x) G)
    double a = 0.0, b = 0.0;
    for (int x = 0; x < K; ++x)
      for (int y = 0; y < K; ++y) {
        a += mu(x, y) * g(x);
        b += mu(x, y) * g(y);
      }
    if (!(a > 0.0) || !(b > 0.0)) throw ZeroMass(t - 1);

    // Coupled part: mass mu(x,y) * min(F_f(x), F_c(y)) through the coupled
    // kernel; residual marginals w1 (f-coordinates) and w2 (c-coordinates)
    // through the mixed-pair kernel.
    Eigen::MatrixXd coupled_flow = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd w1 = Eigen::VectorXd::Zero(K), w2 = Eigen::VectorXd::Zero(K);
    double coupled_mass = 0.0;
    for (int x = 0; x < K; ++x)
      for (int y = 0; y < K; ++y) {
        const double ff = g(x) / a, fc = g(y) / b;
        const double mn = std::min(ff, fc);
        coupled_flow(x, y) = mu(x, y) * mn;
        coupled_mass += mu(x, y) * mn;
        w1(x) += mu(x, y) * (ff - mn);
        w2(y) += mu(x, y) * (fc - mn);
      }
    const CoupledTensor& t_n = model.transition_coupled(t);
    Eigen::MatrixXd next = push_through(coupled_flow, t_n);
    const double residual = 1.0 - coupled_mass;
    if (residual > 1e-14) {
      next += push_through(w1 * w2.transpose() / residual, t_n);
    }
    mu = next / next.sum();
  }
  CouplingMatrix out;
  out.time_index = n;
  out.m = std::move(mu);
  return out;
}

CouplingMatrix exact_coupled_mc(const FiniteModel& model, int n) {
  CouplingMatrix out;
  out.time_index = n;
  if (n == 0) {
    out.m = maximal_coupling_matrix(model.init_f, model.init_c);
    return out;
  }
  out.m = maximal_coupling_matrix(exact_predictor(model, n, Side::f),
                                  exact_predictor(model, n, Side::c));
  return out;
}

CouplingMatrix exact_coupled_w(const FiniteModel& model, int n) {
  CouplingMatrix out;
  out.time_index = n;
  if (n == 0) {
    out.m = model.init_coupled;
    return out;
  }
  const Eigen::VectorXd bar_f = exact_filter(model, n - 1, Side::f);
  const Eigen::VectorXd bar_c = exact_filter(model, n - 1, Side::c);
  out.m = push_through(comonotone_coupling_matrix(bar_f, bar_c),
                       model.transition_coupled(n));
  return out;
}

CouplingMatrix exact_coupled(const FiniteModel& model, int n, SchemeId scheme) {
  switch (scheme) {
    case SchemeId::IR:
      return exact_coupled_ir(model, n);
    case SchemeId::MCR:
      return exact_coupled_mcr(model, n);
    case SchemeId::MC:
      return exact_coupled_mc(model, n);
    case SchemeId::W:
      return exact_coupled_w(model, n);
  }
  throw Error("unknown scheme");
}

Eigen::MatrixXd q_operator(const FiniteModel& model, int p, int n, Side s) {
  if (p < 0 || p > n) throw Error("q_operator needs 0 <= p <= n");
  const int K = model.k();
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(K, K);
  for (int t = p; t < n; ++t)
    q = q * model.potential(t).asDiagonal() * model.transition(t + 1, s);
  return q;
}

Eigen::VectorXd d_function(const FiniteModel& model, int p, int n,
                           const Eigen::VectorXd& phi, Side s) {
  const Eigen::VectorXd eta_n = exact_predictor(model, n, s);
  const double centered = eta_n.dot(phi);
  if (p == n) return phi.array() - centered;
  const Eigen::MatrixXd q = q_operator(model, p, n, s);
  const Eigen::VectorXd eta_p = exact_predictor(model, p, s);
  const double denom = eta_p.dot(q * Eigen::VectorXd::Ones(model.k()));
  if (!(denom > 0.0)) throw ZeroMass(p);
  return q * (phi.array() - centered).matrix() / denom;
}

HandS h_and_s(const FiniteModel& model, int p, int n,
              const Eigen::VectorXd& phi) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(model.k());
  const Eigen::MatrixXd qf = q_operator(model, p, n, Side::f);
  const Eigen::MatrixXd qc = q_operator(model, p, n, Side::c);
  const Eigen::VectorXd qf1 = qf * ones, qc1 = qc * ones;
  if (qf1.minCoeff() <= 0.0 || qc1.minCoeff() <= 0.0) throw ZeroMass(p);
  const double zf = exact_predictor(model, p, Side::f).dot(qf1);
  const double zc = exact_predictor(model, p, Side::c).dot(qc1);
  if (!(zf > 0.0) || !(zc > 0.0)) throw ZeroMass(p);
  HandS out;
  out.h_f = qf1 / zf;
  out.h_c = qc1 / zc;
  out.s_fc = (qf * phi).cwiseQuotient(qf1) - (qc * phi).cwiseQuotient(qc1);
  return out;
}

CltVariance clt_variance(const FiniteModel& model, int n,
                         const Eigen::VectorXd& phi, SchemeId scheme,
                         const std::string& phi_name) {
  const int K = model.k();
  double sigma_sq = 0.0;
  for (int p = 0; p <= n; ++p) {
    const Eigen::VectorXd d_f = d_function(model, p, n, phi, Side::f);
    const Eigen::VectorXd d_c = d_function(model, p, n, phi, Side::c);
    const CouplingMatrix eta = exact_coupled(model, p, scheme);
    for (int x = 0; x < K; ++x)
      for (int y = 0; y < K; ++y) {
        const double gap = d_f(x) - d_c(y);
        sigma_sq += eta.m(x, y) * gap * gap;
      }
  }
  CltVariance out;
  out.sigma_sq = sigma_sq;
  out.scheme = scheme;
  out.time_index = n;
  out.phi_name = phi_name;
  return out;
}

Eigen::VectorXd to_phi_vector(const TestFunction& phi,
                              const std::vector<double>& states) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = phi(ConstStateView{&states[i], 1});
  return v;
}

}  // namespace csmc::oracle
