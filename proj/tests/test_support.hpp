#pragma once

// Shared fixtures and small statistical helpers for the test suites.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "csmc/cloud.hpp"
#include "csmc/oracle/exact.hpp"
#include "csmc/oracle/finite_model.hpp"
#include "csmc/rng.hpp"

namespace test_support {

// Fixed 3-state model used for the CLT reproduction experiments: distinct but
// close f/c chains, an asymmetric potential, row-wise maximal coupled kernel.
inline csmc::oracle::FiniteModel three_state_model() {
  using namespace csmc::oracle;
  FiniteModel m;
  m.states = {-1.0, 0.0, 1.5};
  m.init_f = Eigen::Vector3d(0.5, 0.3, 0.2);
  m.init_c = Eigen::Vector3d(0.45, 0.35, 0.2);
  m.init_coupled = maximal_coupling_matrix(m.init_f, m.init_c);
  Eigen::Vector3d g(0.9, 0.6, 0.4);
  m.pot = {g};
  Eigen::Matrix3d tf, tc;
  tf << 0.60, 0.30, 0.10,  //
      0.25, 0.50, 0.25,    //
      0.10, 0.30, 0.60;
  tc << 0.55, 0.35, 0.10,  //
      0.30, 0.45, 0.25,    //
      0.12, 0.28, 0.60;
  m.trans_f = {tf};
  m.trans_c = {tc};
  m.trans_coupled = {make_row_coupling(tf, tc, RowCoupling::maximal)};
  m.validate();
  return m;
}

// 2-state model with an asymmetric potential: the MCR limiting coupling is
// visibly different from the maximal coupling of the predictors. The coupled
// kernel mixes the maximal and product row couplings: with pure row-maximal
// kernels on two states the MCR limit coincides with the maximal coupling.
inline csmc::oracle::FiniteModel two_state_asym_model() {
  using namespace csmc::oracle;
  FiniteModel m;
  m.states = {0.0, 1.0};
  m.init_f = Eigen::Vector2d(0.5, 0.5);
  m.init_c = Eigen::Vector2d(0.5, 0.5);
  m.init_coupled = maximal_coupling_matrix(m.init_f, m.init_c);
  m.pot = {Eigen::Vector2d(1.0, 0.3)};
  Eigen::Matrix2d tf, tc;
  tf << 0.70, 0.30,  //
      0.40, 0.60;
  tc << 0.60, 0.40,  //
      0.30, 0.70;
  m.trans_f = {tf};
  m.trans_c = {tc};
  CoupledTensor mixed = make_row_coupling(tf, tc, RowCoupling::maximal);
  const CoupledTensor prod = make_row_coupling(tf, tc, RowCoupling::product);
  for (std::size_t i = 0; i < mixed.p.size(); ++i)
    mixed.p[i] = 0.5 * mixed.p[i] + 0.5 * prod.p[i];
  m.trans_coupled = {mixed};
  m.validate();
  return m;
}

// Slow-mixing 3-state chain with near-identical f/c kernels, a near-flat
// potential and a *product* coupled kernel: maximally coupled resampling
// alone cannot hold the pairs together, so the MCR coupling decorrelates
// steadily through n = 200 while the maximal coupling stays at the (small)
// TV of the two predictors. Exact MCR off-diagonal mass at n = 25/50/100/200:
// 0.080 / 0.110 / 0.128 / 0.132; maximal coupling ~ 0.032.
inline csmc::oracle::FiniteModel sticky_decorrelation_model() {
  using namespace csmc::oracle;
  FiniteModel m;
  m.states = {-1.0, 0.0, 1.0};
  m.init_f = Eigen::Vector3d(1.0, 0.0, 0.0);
  m.init_c = Eigen::Vector3d(1.0, 0.0, 0.0);
  m.init_coupled = maximal_coupling_matrix(m.init_f, m.init_c);
  m.pot = {Eigen::Vector3d(1.0, 0.97, 0.94)};
  const double stay = 0.998, eps = 0.001, leak = 1.0 - stay;
  Eigen::Matrix3d tf, tc;
  tf << stay, 0.8 * leak, 0.2 * leak,  //
      0.4 * leak, stay, 0.6 * leak,    //
      0.2 * leak, 0.8 * leak, stay;
  tc << stay - eps, 0.8 * leak + eps, 0.2 * leak,  //
      0.4 * leak, stay, 0.6 * leak,                //
      0.2 * leak, 0.8 * leak + eps, stay - eps;
  m.trans_f = {tf};
  m.trans_c = {tc};
  m.trans_coupled = {make_row_coupling(tf, tc, RowCoupling::product)};
  m.validate();
  return m;
}

inline Eigen::VectorXd random_prob_vector(int k, csmc::RngStream& rng) {
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = 0.15 / k - std::log(rng.uniform01());
  return v / v.sum();
}

// Random well-conditioned model: entries bounded away from zero, positive
// potentials, coupled pieces built from one of the marginal-preserving
// constructions.
inline csmc::oracle::FiniteModel random_finite_model(
    int k, csmc::RngStream& rng,
    csmc::oracle::RowCoupling kind = csmc::oracle::RowCoupling::maximal,
    int time_blocks = 1) {
  using namespace csmc::oracle;
  FiniteModel m;
  m.states.resize(k);
  double x = -1.0;
  for (int i = 0; i < k; ++i) {
    x += 0.3 + rng.uniform01();
    m.states[i] = x;
  }
  auto random_row = [&] {
    Eigen::VectorXd v = random_prob_vector(k, rng);
    v = (v.array() + 0.25 / k).matrix();
    return Eigen::VectorXd(v / v.sum());
  };
  m.init_f = random_row();
  m.init_c = random_row();
  m.init_coupled = maximal_coupling_matrix(m.init_f, m.init_c);
  for (int b = 0; b < time_blocks; ++b) {
    Eigen::VectorXd g(k);
    for (int i = 0; i < k; ++i) g(i) = 0.2 + rng.uniform01();
    m.pot.push_back(g);
    Eigen::MatrixXd tf(k, k), tc(k, k);
    for (int r = 0; r < k; ++r) {
      tf.row(r) = random_row().transpose();
      tc.row(r) = random_row().transpose();
    }
    m.trans_f.push_back(tf);
    m.trans_c.push_back(tc);
    m.trans_coupled.push_back(make_row_coupling(tf, tc, kind));
  }
  m.validate(1e-9);
  return m;
}

// Empirical distribution of a cloud over the product grid of atoms.
inline Eigen::MatrixXd empirical_pair_grid(const csmc::CoupledCloud& cloud,
                                           const std::vector<double>& states) {
  const int k = static_cast<int>(states.size());
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(k, k);
  auto idx = [&](double v) {
    auto it = std::lower_bound(states.begin(), states.end(), v);
    return static_cast<int>(it - states.begin());
  };
  for (int i = 0; i < cloud.size; ++i)
    grid(idx(cloud.f(i)[0]), idx(cloud.c(i)[0])) += 1.0;
  return grid / cloud.size;
}

inline double tv_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs((i + 1.0) / n - f));
    d = std::max(d, std::fabs(f - i / n));
  }
  return d;
}

}  // namespace test_support
