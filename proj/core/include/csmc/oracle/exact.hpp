#pragma once

#include <string>

#include "csmc/oracle/finite_model.hpp"
#include "csmc/schemes.hpp"

namespace csmc::oracle {

// A coupling of the two predictors at one time: rows marginalize to eta_n^f,
// columns to eta_n^c.
struct CouplingMatrix {
  Eigen::MatrixXd m;
  int time_index = 0;

  Eigen::VectorXd row_marginal() const { return m.rowwise().sum(); }
  Eigen::VectorXd col_marginal() const { return m.colwise().sum().transpose(); }
  double diag_mass() const { return m.diagonal().sum(); }
  double offdiag_mass() const { return m.sum() - diag_mass(); }
};

// eta_n^s: the exact predictor recursion. Throws ZeroMass with the offending
// time index when the potential annihilates the current law.
Eigen::VectorXd exact_predictor(const FiniteModel& model, int n, Side s);

// G_n-weighted predictor (the filter law at time n).
Eigen::VectorXd exact_filter(const FiniteModel& model, int n, Side s);

// Exact limiting couplings of the four schemes.
// IR:  product of the two weighted laws pushed through the coupled kernel.
// MCR: the recursive mass-splitting operator (coupled part through the
//      coupled kernel, residual product through the mixed-pair kernel).
// MC:  maximal coupling of the two predictors (time 0: of the initial laws).
// W:   comonotone coupling of the two weighted laws pushed through the
//      coupled kernel.
CouplingMatrix exact_coupled_ir(const FiniteModel& model, int n);
CouplingMatrix exact_coupled_mcr(const FiniteModel& model, int n);
CouplingMatrix exact_coupled_mc(const FiniteModel& model, int n);
CouplingMatrix exact_coupled_w(const FiniteModel& model, int n);
CouplingMatrix exact_coupled(const FiniteModel& model, int n, SchemeId scheme);

// Q_{p,n}^s as a matrix: product over q in [p, n) of diag(G_q) M_{q+1}^s;
// the identity at p == n.
Eigen::MatrixXd q_operator(const FiniteModel& model, int p, int n, Side s);

// D_{p,n}^s(phi) = Q_{p,n}^s(phi - eta_n^s(phi)) / eta_p^s(Q_{p,n}^s(1)).
Eigen::VectorXd d_function(const FiniteModel& model, int p, int n,
                           const Eigen::VectorXd& phi, Side s);

struct HandS {
  Eigen::VectorXd h_f, h_c;  // Q_{p,n}^s(1) / eta_p^s(Q_{p,n}^s(1))
  Eigen::VectorXd s_fc;      // Q^f(phi)/Q^f(1) - Q^c(phi)/Q^c(1), pointwise
};

HandS h_and_s(const FiniteModel& model, int p, int n,
              const Eigen::VectorXd& phi);

struct CltVariance {
  double sigma_sq = 0.0;
  SchemeId scheme = SchemeId::IR;
  int time_index = 0;
  std::string phi_name;
};

// sigma_n^{2,s}(phi) = sum_{p=0}^n eta_check_p^s((D^f phi (x) 1 - 1 (x) D^c phi)^2)
// with eta_check_p^s from the matching exact coupling recursion.
CltVariance clt_variance(const FiniteModel& model, int n,
                         const Eigen::VectorXd& phi, SchemeId scheme,
                         const std::string& phi_name = "phi");

Eigen::VectorXd to_phi_vector(const TestFunction& phi,
                              const std::vector<double>& states);

}  // namespace csmc::oracle
