#include "csmc/oracle/finite_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "csmc/errors.hpp"

namespace csmc::oracle {

CoupledTensor CoupledTensor::zeros(int k) {
  CoupledTensor t;
  t.k = k;
  t.p.assign(static_cast<std::size_t>(k) * k * k * k, 0.0);
  return t;
}

namespace {

const Eigen::VectorXd& clamped(const std::vector<Eigen::VectorXd>& blocks,
                               int t) {
  return blocks[std::min<std::size_t>(t, blocks.size() - 1)];
}
const Eigen::MatrixXd& clamped(const std::vector<Eigen::MatrixXd>& blocks,
                               int t) {
  return blocks[std::min<std::size_t>(t, blocks.size() - 1)];
}
const CoupledTensor& clamped(const std::vector<CoupledTensor>& blocks, int t) {
  return blocks[std::min<std::size_t>(t, blocks.size() - 1)];
}

}  // namespace

const Eigen::VectorXd& FiniteModel::potential(int n) const {
  if (n < 0 || pot.empty()) throw Error("potential index out of range");
  return clamped(pot, n);
}

const Eigen::MatrixXd& FiniteModel::transition(int n, Side s) const {
  if (n < 1) throw Error("transition index must be >= 1");
  return clamped(s == Side::f ? trans_f : trans_c, n - 1);
}

const CoupledTensor& FiniteModel::transition_coupled(int n) const {
  if (n < 1) throw Error("transition index must be >= 1");
  return clamped(trans_coupled, n - 1);
}

void FiniteModel::validate(double tol) const {
  const int K = k();
  if (K < 1 || K > kMaxStates)
    throw InvalidDistribution("finite model needs 1..64 states");
  for (int i = 1; i < K; ++i)
    if (!(states[i] > states[i - 1]))
      throw InvalidDistribution("atoms must be strictly increasing");

  auto check_prob = [&](const Eigen::VectorXd& v, const std::string& name) {
    if (v.size() != K) throw InvalidDistribution(name + ": wrong length");
    if (v.minCoeff() < 0.0) throw InvalidDistribution(name + ": negative entry");
    if (std::fabs(v.sum() - 1.0) > tol)
      throw InvalidDistribution(name + ": does not sum to 1");
  };
  check_prob(init_f, "init_f");
  check_prob(init_c, "init_c");

  if (init_coupled.rows() != K || init_coupled.cols() != K)
    throw InvalidDistribution("init_coupled: wrong shape");
  if ((init_coupled.rowwise().sum() - init_f).cwiseAbs().maxCoeff() > tol)
    throw InvalidDistribution("init_coupled: f-marginal mismatch");
  if ((init_coupled.colwise().sum().transpose() - init_c)
          .cwiseAbs()
          .maxCoeff() > tol)
    throw InvalidDistribution("init_coupled: c-marginal mismatch");

  if (pot.empty() || trans_f.empty() || trans_c.empty() ||
      trans_coupled.empty())
    throw InvalidDistribution("missing time blocks");
  for (const auto& g : pot) {
    if (g.size() != K) throw InvalidDistribution("potential: wrong length");
    if (g.minCoeff() < 0.0)
      throw InvalidDistribution("potential: negative entry");
  }
  auto check_stochastic = [&](const Eigen::MatrixXd& m,
                              const std::string& name) {
    if (m.rows() != K || m.cols() != K)
      throw InvalidDistribution(name + ": wrong shape");
    if (m.minCoeff() < 0.0) throw InvalidDistribution(name + ": negative entry");
    for (int r = 0; r < K; ++r)
      if (std::fabs(m.row(r).sum() - 1.0) > tol)
        throw InvalidDistribution(name + ": row " + std::to_string(r) +
                                  " does not sum to 1");
  };
  for (const auto& m : trans_f) check_stochastic(m, "trans_f");
  for (const auto& m : trans_c) check_stochastic(m, "trans_c");

  if (trans_coupled.size() != trans_f.size() ||
      trans_f.size() != trans_c.size())
    throw InvalidDistribution("coupled/marginal block count mismatch");
  for (std::size_t b = 0; b < trans_coupled.size(); ++b) {
    const CoupledTensor& t = trans_coupled[b];
    if (t.k != K) throw InvalidDistribution("trans_coupled: wrong shape");
    for (int x = 0; x < K; ++x)
      for (int y = 0; y < K; ++y) {
        for (int u = 0; u < K; ++u) {
          double row_u = 0.0, col_u = 0.0;
          for (int v = 0; v < K; ++v) {
            const double w = t(x, y, u, v);
            if (w < 0.0)
              throw InvalidDistribution("trans_coupled: negative entry");
            row_u += w;
            col_u += t(x, y, v, u);
          }
          if (std::fabs(row_u - trans_f[b](x, u)) > tol)
            throw InvalidDistribution("trans_coupled: f-marginal mismatch");
          if (std::fabs(col_u - trans_c[b](y, u)) > tol)
            throw InvalidDistribution("trans_coupled: c-marginal mismatch");
        }
      }
  }
}

Eigen::MatrixXd product_coupling_matrix(const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& q) {
  return p * q.transpose();
}

Eigen::MatrixXd maximal_coupling_matrix(const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& q) {
  const int K = static_cast<int>(p.size());
  const Eigen::VectorXd mn = p.cwiseMin(q);
  const double s = mn.sum();
  Eigen::MatrixXd out = mn.asDiagonal();
  if (s < 1.0 - 1e-15) {
    out += (p - mn) * (q - mn).transpose() / (1.0 - s);
  }
  (void)K;
  return out;
}

Eigen::MatrixXd comonotone_coupling_matrix(const Eigen::VectorXd& p,
                                           const Eigen::VectorXd& q) {
  const int K = static_cast<int>(p.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, K);
  int i = 0, j = 0;
  double pi = p(0), qj = q(0);
  while (i < K && j < K) {
    const double m = std::min(pi, qj);
    if (m > 0.0) out(i, j) += m;
    pi -= m;
    qj -= m;
    // min() equals one of the two exactly, so that side hits 0.0 exactly.
    if (pi == 0.0) {
      ++i;
      if (i < K) pi = p(i);
    }
    if (qj == 0.0) {
      ++j;
      if (j < K) qj = q(j);
    }
  }
  return out;
}

CoupledTensor make_row_coupling(const Eigen::MatrixXd& f,
                                const Eigen::MatrixXd& c, RowCoupling kind) {
  const int K = static_cast<int>(f.rows());
  CoupledTensor t = CoupledTensor::zeros(K);
  for (int x = 0; x < K; ++x)
    for (int y = 0; y < K; ++y) {
      Eigen::MatrixXd rows;
      const Eigen::VectorXd pf = f.row(x).transpose();
      const Eigen::VectorXd pc = c.row(y).transpose();
      switch (kind) {
        case RowCoupling::product:
          rows = product_coupling_matrix(pf, pc);
          break;
        case RowCoupling::maximal:
          rows = maximal_coupling_matrix(pf, pc);
          break;
        case RowCoupling::comonotone:
          rows = comonotone_coupling_matrix(pf, pc);
          break;
      }
      for (int u = 0; u < K; ++u)
        for (int v = 0; v < K; ++v) t.at(x, y, u, v) = rows(u, v);
    }
  return t;
}

namespace {

// Whitespace tokenizer with '#' comments and line tracking for ParseError.
class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  std::string next() {
    std::string tok;
    while (true) {
      const int ch = in_.get();
      if (ch == EOF) {
        if (tok.empty()) throw ParseError(line_, "unexpected end of input");
        return tok;
      }
      if (ch == '#' || std::isspace(ch)) {
        if (!tok.empty()) {
          in_.unget();  // keep the line count right for the caller
          return tok;
        }
        if (ch == '#') {
          while (in_.good() && in_.peek() != '\n' && in_.peek() != EOF)
            in_.get();
        } else if (ch == '\n') {
          ++line_;
        }
        continue;
      }
      tok.push_back(static_cast<char>(ch));
    }
  }

  double next_double() {
    const std::string tok = next();
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(line_, "expected a number, got '" + tok + "'");
    }
  }

  long next_long() {
    const std::string tok = next();
    try {
      std::size_t pos = 0;
      const long v = std::stol(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(line_, "expected an integer, got '" + tok + "'");
    }
  }

  void expect(const std::string& kw) {
    const std::string tok = next();
    if (tok != kw)
      throw ParseError(line_, "expected '" + kw + "', got '" + tok + "'");
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 1;
};

}  // namespace

FiniteModel load_finite_model(std::istream& in) {
  Tokenizer tok(in);
  tok.expect("csmc-finite-model");
  tok.expect("v1");
  tok.expect("states");
  const long K = tok.next_long();
  if (K < 1 || K > FiniteModel::kMaxStates)
    throw ParseError(tok.line(), "state count out of range 1..64");

  FiniteModel m;
  m.states.resize(K);
  for (auto& s : m.states) s = tok.next_double();

  auto read_vector = [&] {
    Eigen::VectorXd v(K);
    for (long i = 0; i < K; ++i) v(i) = tok.next_double();
    return v;
  };
  auto read_matrix = [&] {
    Eigen::MatrixXd v(K, K);
    for (long r = 0; r < K; ++r)
      for (long c = 0; c < K; ++c) v(r, c) = tok.next_double();
    return v;
  };

  tok.expect("init_f");
  m.init_f = read_vector();
  tok.expect("init_c");
  m.init_c = read_vector();
  tok.expect("init_coupled");
  m.init_coupled = read_matrix();

  tok.expect("potentials");
  long blocks = tok.next_long();
  for (long b = 0; b < blocks; ++b) m.pot.push_back(read_vector());

  tok.expect("trans_f");
  blocks = tok.next_long();
  for (long b = 0; b < blocks; ++b) m.trans_f.push_back(read_matrix());
  tok.expect("trans_c");
  blocks = tok.next_long();
  for (long b = 0; b < blocks; ++b) m.trans_c.push_back(read_matrix());

  tok.expect("trans_coupled");
  blocks = tok.next_long();
  for (long b = 0; b < blocks; ++b) {
    CoupledTensor t = CoupledTensor::zeros(static_cast<int>(K));
    for (long x = 0; x < K; ++x)
      for (long y = 0; y < K; ++y)
        for (long u = 0; u < K; ++u)
          for (long v = 0; v < K; ++v)
            t.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(u),
                 static_cast<int>(v)) = tok.next_double();
    m.trans_coupled.push_back(std::move(t));
  }
  m.validate();
  return m;
}

FiniteModel load_finite_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open finite model file: " + path);
  return load_finite_model(in);
}

void save_finite_model(const FiniteModel& m, std::ostream& out) {
  const int K = m.k();
  out.precision(17);
  out << "csmc-finite-model v1\n";
  out << "states " << K << "\n";
  for (int i = 0; i < K; ++i) out << m.states[i] << (i + 1 < K ? ' ' : '\n');

  auto put_vector = [&](const Eigen::VectorXd& v) {
    for (int i = 0; i < K; ++i) out << v(i) << (i + 1 < K ? ' ' : '\n');
  };
  auto put_matrix = [&](const Eigen::MatrixXd& v) {
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c) out << v(r, c) << (c + 1 < K ? ' ' : '\n');
  };
  out << "init_f\n";
  put_vector(m.init_f);
  out << "init_c\n";
  put_vector(m.init_c);
  out << "init_coupled\n";
  put_matrix(m.init_coupled);

  out << "potentials " << m.pot.size() << "\n";
  for (const auto& g : m.pot) put_vector(g);
  out << "trans_f " << m.trans_f.size() << "\n";
  for (const auto& t : m.trans_f) put_matrix(t);
  out << "trans_c " << m.trans_c.size() << "\n";
  for (const auto& t : m.trans_c) put_matrix(t);
  out << "trans_coupled " << m.trans_coupled.size() << "\n";
  for (const auto& t : m.trans_coupled) {
    for (int x = 0; x < K; ++x)
      for (int y = 0; y < K; ++y)
        for (int u = 0; u < K; ++u)
          for (int v = 0; v < K; ++v)
            out << t(x, y, u, v) << (v + 1 < K ? ' ' : '\n');
  }
}

namespace {

int atom_index(const std::vector<double>& states, double value) {
  auto it = std::lower_bound(states.begin(), states.end(), value);
  if (it == states.end() || *it != value)
    throw Error("state value is not an atom of the finite model");
  return static_cast<int>(it - states.begin());
}

// One uniform, linear scan; K is small by construction.
int draw_row(const double* w, int K, double total, RngStream& rng) {
  double u = rng.uniform01() * total;
  for (int i = 0; i < K; ++i) {
    u -= w[i];
    if (u < 0.0) return i;
  }
  return K - 1;
}

}  // namespace

FeynmanKacModel make_fk_model(const FiniteModel& model) {
  model.validate(1e-9);
  auto fm = std::make_shared<const FiniteModel>(model);
  const int K = fm->k();

  double bound = 0.0;
  for (const auto& g : fm->pot) bound = std::max(bound, g.maxCoeff());

  FeynmanKacModel m;
  m.state_dim = 1;
  m.potential_bound = bound > 0.0 ? bound : 1.0;
  m.potential = [fm](int n, ConstStateView x) {
    return fm->potential(n)(atom_index(fm->states, x[0]));
  };

  auto draw_init = [fm, K](const Eigen::VectorXd& law, StateView out,
                           RngStream& rng) {
    out[0] = fm->states[draw_row(law.data(), K, law.sum(), rng)];
  };
  m.sample_init_f = [fm, K, draw_init](StateView out, RngStream& rng) {
    draw_init(fm->init_f, out, rng);
  };
  m.sample_init_c = [fm, K, draw_init](StateView out, RngStream& rng) {
    draw_init(fm->init_c, out, rng);
  };
  m.sample_init_coupled = [fm, K](StateView f, StateView c, RngStream& rng) {
    double u = rng.uniform01() * fm->init_coupled.sum();
    for (int x = 0; x < K; ++x)
      for (int y = 0; y < K; ++y) {
        u -= fm->init_coupled(x, y);
        if (u < 0.0) {
          f[0] = fm->states[x];
          c[0] = fm->states[y];
          return;
        }
      }
    f[0] = fm->states[K - 1];
    c[0] = fm->states[K - 1];
  };

  auto make_kernel = [fm, K](Side s) {
    return [fm, K, s](int n, ConstStateView x, StateView out, RngStream& rng) {
      const Eigen::MatrixXd& t = fm->transition(n, s);
      const int row = atom_index(fm->states, x[0]);
      Eigen::VectorXd r = t.row(row).transpose();
      out[0] = fm->states[draw_row(r.data(), K, r.sum(), rng)];
    };
  };
  m.sample_kernel_f = make_kernel(Side::f);
  m.sample_kernel_c = make_kernel(Side::c);
  m.sample_kernel_coupled = [fm, K](int n, ConstStateView xf, ConstStateView xc,
                                    StateView uf, StateView uc,
                                    RngStream& rng) {
    const CoupledTensor& t = fm->transition_coupled(n);
    const int x = atom_index(fm->states, xf[0]);
    const int y = atom_index(fm->states, xc[0]);
    double u = rng.uniform01();
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        u -= t(x, y, a, b);
        if (u < 0.0) {
          uf[0] = fm->states[a];
          uc[0] = fm->states[b];
          return;
        }
      }
    uf[0] = fm->states[K - 1];
    uc[0] = fm->states[K - 1];
  };

  m.density_kernel_f = [fm](int n, ConstStateView x, ConstStateView y) {
    return fm->transition(n, Side::f)(atom_index(fm->states, x[0]),
                                      atom_index(fm->states, y[0]));
  };
  m.density_kernel_c = [fm](int n, ConstStateView x, ConstStateView y) {
    return fm->transition(n, Side::c)(atom_index(fm->states, x[0]),
                                      atom_index(fm->states, y[0]));
  };
  m.density_init_f = [fm](ConstStateView x) {
    return fm->init_f(atom_index(fm->states, x[0]));
  };
  m.density_init_c = [fm](ConstStateView x) {
    return fm->init_c(atom_index(fm->states, x[0]));
  };
  return m;
}

}  // namespace csmc::oracle
