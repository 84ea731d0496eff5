#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "csmc/model.hpp"

namespace csmc::oracle {

// Dense coupled transition kernel on K atoms: probability of landing on the
// pair (u, v) from the pair (x, y).
struct CoupledTensor {
  int k = 0;
  std::vector<double> p;  // ((x*k + y)*k + u)*k + v

  static CoupledTensor zeros(int k);

  double operator()(int x, int y, int u, int v) const {
    return p[static_cast<std::size_t>(((x * k + y) * k + u)) * k + v];
  }
  double& at(int x, int y, int u, int v) {
    return p[static_cast<std::size_t>(((x * k + y) * k + u)) * k + v];
  }
};

// Finite-state specialization with full transition matrices/tensors, the
// ground truth for the particle schemes. Time-indexed pieces are stored as
// blocks; time t beyond the last block reuses the last one, so homogeneous
// models store a single block.
struct FiniteModel {
  static constexpr int kMaxStates = 64;

  std::vector<double> states;  // strictly increasing atom values
  Eigen::VectorXd init_f, init_c;
  Eigen::MatrixXd init_coupled;  // row = f atom, col = c atom
  std::vector<Eigen::VectorXd> pot;
  std::vector<Eigen::MatrixXd> trans_f, trans_c;  // row-stochastic
  std::vector<CoupledTensor> trans_coupled;

  int k() const { return static_cast<int>(states.size()); }

  // G_n, n >= 0.
  const Eigen::VectorXd& potential(int n) const;
  // M_n, n >= 1.
  const Eigen::MatrixXd& transition(int n, Side s) const;
  const CoupledTensor& transition_coupled(int n) const;

  // Checks stochasticity, marginal consistency of the coupled pieces, and
  // the atom ordering. Throws InvalidDistribution with a description.
  void validate(double tol = 1e-12) const;
};

// Couplings of two probability vectors with prescribed marginals.
Eigen::MatrixXd product_coupling_matrix(const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& q);
// Diagonal mass min(p, q); residual spread as a product. Off-diagonal mass
// equals the total-variation distance.
Eigen::MatrixXd maximal_coupling_matrix(const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& q);
// Quantile (comonotone) coupling by merging the two CDF breakpoint sequences.
Eigen::MatrixXd comonotone_coupling_matrix(const Eigen::VectorXd& p,
                                           const Eigen::VectorXd& q);

// Row-pair constructions of a coupled kernel from two marginal kernels.
enum class RowCoupling { product, maximal, comonotone };
CoupledTensor make_row_coupling(const Eigen::MatrixXd& f,
                                const Eigen::MatrixXd& c, RowCoupling kind);

// Plain-text round trip (documented grid layout; '#' starts a comment).
FiniteModel load_finite_model(std::istream& in);
FiniteModel load_finite_model_file(const std::string& path);
void save_finite_model(const FiniteModel& model, std::ostream& out);

// Particle-facing adapter: states are the atom values, kernels sample the
// matrix rows, densities are the pmfs (w.r.t. counting measure).
FeynmanKacModel make_fk_model(const FiniteModel& model);

}  // namespace csmc::oracle
