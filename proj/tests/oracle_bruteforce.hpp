#pragma once

// Test-only reimplementation of the asymptotic-variance recursion with plain
// loops and no shared oracle code; used to cross-check clt_variance.

#include <vector>

#include "csmc/oracle/finite_model.hpp"

namespace bruteforce {

using Vec = std::vector<double>;

inline Vec predictor(const csmc::oracle::FiniteModel& m, int n, bool fine) {
  const int k = m.k();
  Vec eta(k);
  for (int i = 0; i < k; ++i)
    eta[i] = fine ? m.init_f(i) : m.init_c(i);
  for (int t = 1; t <= n; ++t) {
    Vec next(k, 0.0);
    const auto& g = m.potential(t - 1);
    const auto& tr = m.transition(t, fine ? csmc::Side::f : csmc::Side::c);
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y) next[y] += eta[x] * g(x) * tr(x, y);
    double total = 0.0;
    for (double v : next) total += v;
    for (double& v : next) v /= total;
    eta = next;
  }
  return eta;
}

// Q_{p,n}(phi) by backward substitution, one multiply per time step.
inline Vec q_apply(const csmc::oracle::FiniteModel& m, int p, int n,
                   const Vec& phi, bool fine) {
  const int k = m.k();
  Vec cur = phi;
  for (int t = n - 1; t >= p; --t) {
    Vec next(k, 0.0);
    const auto& g = m.potential(t);
    const auto& tr = m.transition(t + 1, fine ? csmc::Side::f : csmc::Side::c);
    for (int x = 0; x < k; ++x) {
      double acc = 0.0;
      for (int y = 0; y < k; ++y) acc += tr(x, y) * cur[y];
      next[x] = g(x) * acc;
    }
    cur = next;
  }
  return cur;
}

inline Vec d_fn(const csmc::oracle::FiniteModel& m, int p, int n,
                const Vec& phi, bool fine) {
  const int k = m.k();
  const Vec eta_n = predictor(m, n, fine);
  double center = 0.0;
  for (int i = 0; i < k; ++i) center += eta_n[i] * phi[i];
  Vec shifted(k);
  for (int i = 0; i < k; ++i) shifted[i] = phi[i] - center;
  if (p == n) return shifted;
  const Vec num = q_apply(m, p, n, shifted, fine);
  const Vec q1 = q_apply(m, p, n, Vec(k, 1.0), fine);
  const Vec eta_p = predictor(m, p, fine);
  double den = 0.0;
  for (int i = 0; i < k; ++i) den += eta_p[i] * q1[i];
  Vec out(k);
  for (int i = 0; i < k; ++i) out[i] = num[i] / den;
  return out;
}

// Maximal coupling of the two predictors, written independently.
inline std::vector<Vec> mc_coupling(const csmc::oracle::FiniteModel& m, int n) {
  const int k = m.k();
  Vec p = n == 0 ? Vec(k) : predictor(m, n, true);
  Vec q = n == 0 ? Vec(k) : predictor(m, n, false);
  if (n == 0)
    for (int i = 0; i < k; ++i) {
      p[i] = m.init_f(i);
      q[i] = m.init_c(i);
    }
  Vec mn(k);
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    mn[i] = p[i] < q[i] ? p[i] : q[i];
    s += mn[i];
  }
  std::vector<Vec> c(k, Vec(k, 0.0));
  for (int i = 0; i < k; ++i) c[i][i] = mn[i];
  if (s < 1.0 - 1e-15)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        c[i][j] += (p[i] - mn[i]) * (q[j] - mn[j]) / (1.0 - s);
  return c;
}

inline double mc_variance(const csmc::oracle::FiniteModel& m, int n,
                          const Vec& phi) {
  const int k = m.k();
  double sigma_sq = 0.0;
  for (int p = 0; p <= n; ++p) {
    const Vec df = d_fn(m, p, n, phi, true);
    const Vec dc = d_fn(m, p, n, phi, false);
    const auto eta = mc_coupling(m, p);
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y) {
        const double gap = df[x] - dc[y];
        sigma_sq += eta[x][y] * gap * gap;
      }
  }
  return sigma_sq;
}

}  // namespace bruteforce
