#include "maglap/spectral.hpp"

#include "maglap/lobpcg.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace maglap {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrixC, Eigen::Lower, Eigen::AMDOrdering<int>>;

// (Q - sigma D)^{-1}: supernodal Cholesky while the shifted form is definite, LDL^T otherwise.
class ShiftedInverse {
 public:
  ShiftedInverse(const SparseMatrixC& q, Eigen::VectorXd d, double sigma) : q_(q), d_(std::move(d)) {
    llt_.analyzePattern(q_);
    set_shift(sigma);
  }
  void set_shift(double sigma) {
    SparseMatrixC a = q_;
    for (Eigen::Index i = 0; i < d_.size(); ++i) a.coeffRef(i, i) -= sigma * d_[i];
    llt_.factorize(a);
    use_llt_ = llt_.info() == Eigen::Success;
    if (use_llt_) return;
    if (!ldlt_) {
      ldlt_ = std::make_unique<Ldlt>();
      ldlt_->analyzePattern(q_);
    }
    ldlt_->factorize(a);
    if (ldlt_->info() != Eigen::Success) throw SolverError("shifted factorization failed", {});
  }
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& b) const {
    if (use_llt_) return llt_.solve(b);
    return ldlt_->solve(b);
  }

 private:
  const SparseMatrixC& q_;
  Eigen::VectorXd d_;
  Eigen::CholmodSupernodalLLT<SparseMatrixC> llt_;
  std::unique_ptr<Ldlt> ldlt_;
  bool use_llt_ = false;
};

// Shift used to make Q + s D positive definite without spoiling it as a preconditioner.
double preconditioner_shift(const SparseMatrixC& q, const Eigen::VectorXd& d) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] > 0) r = std::max(r, q.coeff(i, i).real() / d[i]);
  return 1e-8 * std::max(r, 1e-300);
}

SpectralResult finish(const FormSet& fs, const LobpcgResult& lr, const Eigen::VectorXcd& dof_vec, const char* what) {
  SpectralResult out;
  out.lambda = lr.lambda;
  out.psi = fs.to_nodes(dof_vec);
  out.residual = lr.residual;
  out.iterations = lr.iterations;
  out.h = fs.grid->h();
  out.n_dofs = static_cast<std::size_t>(fs.dofs());
  if (!lr.converged) {
    std::ostringstream os;
    os << what << ": no convergence after " << lr.iterations << " iterations (best residual " << lr.residual
       << ", lambda " << lr.lambda << ")";
    throw SolverError(os.str(), out);
  }
  return out;
}

LobpcgOptions to_lobpcg(const SolverOptions& o) { return {o.block, o.tol, o.max_iter, o.seed}; }

// Volume problem Q x = lambda D x with D diagonal on all dofs.
LobpcgResult volume_problem(const FormSet& fs, const Eigen::VectorXd& d, const SolverOptions& opt) {
  Eigen::VectorXd dd = d;
  // Keep the preconditioner definite even where the weight vanishes.
  dd += 1e-6 * d.maxCoeff() * Eigen::VectorXd::Ones(d.size()).cwiseProduct((d.array() == 0).cast<double>().matrix());
  ShiftedInverse t(fs.q, dd, -preconditioner_shift(fs.q, dd));
  const SparseMatrixC& q = fs.q;
  BlockOperator a = [&q](const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) { out = q * in; };
  BlockOperator pc = [&t](const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) { out = t.solve(in); };
  return lobpcg(fs.dofs(), a, d, pc, to_lobpcg(opt), [&t](double sigma) { t.set_shift(sigma); });
}

struct SchurSplit {
  std::vector<int> gamma, interior;
  SparseMatrixC qgg, qgi, qii;
};

SchurSplit split(const FormSet& fs, const Eigen::VectorXd& d) {
  SchurSplit sp;
  std::vector<int> pos(static_cast<std::size_t>(fs.dofs()));
  for (Eigen::Index i = 0; i < fs.dofs(); ++i) {
    auto& list = d[i] > 0 ? sp.gamma : sp.interior;
    pos[static_cast<std::size_t>(i)] = static_cast<int>(list.size());
    list.push_back(static_cast<int>(i));
  }
  const auto ng = static_cast<Eigen::Index>(sp.gamma.size()), ni = static_cast<Eigen::Index>(sp.interior.size());
  std::vector<Eigen::Triplet<std::complex<double>>> tgg, tgi, tii;
  for (int k = 0; k < fs.q.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(fs.q, k); it; ++it) {
      const bool rg = d[it.row()] > 0, cg = d[it.col()] > 0;
      const int r = pos[static_cast<std::size_t>(it.row())], c = pos[static_cast<std::size_t>(it.col())];
      if (rg && cg)
        tgg.emplace_back(r, c, it.value());
      else if (rg)
        tgi.emplace_back(r, c, it.value());
      else if (!cg)
        tii.emplace_back(r, c, it.value());
    }
  sp.qgg.resize(ng, ng);
  sp.qgg.setFromTriplets(tgg.begin(), tgg.end());
  sp.qgi.resize(ng, ni);
  sp.qgi.setFromTriplets(tgi.begin(), tgi.end());
  sp.qii.resize(ni, ni);
  sp.qii.setFromTriplets(tii.begin(), tii.end());
  return sp;
}

struct SchurOutcome {
  LobpcgResult lr;
  Eigen::VectorXcd full;  // harmonic extension on all dofs
};

// Q x = lambda D x with D supported on a subset of dofs: eliminate the rest.
SchurOutcome boundary_problem(const FormSet& fs, const Eigen::VectorXd& d, const SolverOptions& opt) {
  if (!(d.maxCoeff() > 0)) throw SolverError("dtn_ground_state: empty boundary", {});
  const SchurSplit sp = split(fs, d);
  const auto ng = static_cast<Eigen::Index>(sp.gamma.size());
  Eigen::VectorXd dg(ng);
  for (Eigen::Index i = 0; i < ng; ++i) dg[i] = d[sp.gamma[static_cast<std::size_t>(i)]];

  std::unique_ptr<ShiftedInverse> qii;
  if (!sp.interior.empty()) qii = std::make_unique<ShiftedInverse>(sp.qii, Eigen::VectorXd::Zero(sp.qii.rows()), 0.0);
  // [Q + sD]^{-1} restricted to Gamma is the inverse of the shifted Schur complement.
  ShiftedInverse full(fs.q, d, -preconditioner_shift(fs.q, d));
  const SparseMatrixC qig = sp.qgi.adjoint();

  BlockOperator a = [&](const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
    out = sp.qgg * in;
    if (qii) out -= sp.qgi * qii->solve(Eigen::MatrixXcd(qig * in));
  };
  BlockOperator pc = [&](const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(fs.dofs(), in.cols());
    for (Eigen::Index i = 0; i < ng; ++i) big.row(sp.gamma[static_cast<std::size_t>(i)]) = in.row(i);
    const Eigen::MatrixXcd sol = full.solve(big);
    out.resize(ng, in.cols());
    for (Eigen::Index i = 0; i < ng; ++i) out.row(i) = sol.row(sp.gamma[static_cast<std::size_t>(i)]);
  };
  SchurOutcome so;
  so.lr = lobpcg(ng, a, dg, pc, to_lobpcg(opt), [&full](double sigma) { full.set_shift(sigma); });
  so.full = Eigen::VectorXcd::Zero(fs.dofs());
  if (so.lr.x.size() == ng) {
    for (Eigen::Index i = 0; i < ng; ++i) so.full[sp.gamma[static_cast<std::size_t>(i)]] = so.lr.x[i];
    if (qii) {
      const Eigen::VectorXcd xi = -qii->solve(Eigen::VectorXcd(qig * so.lr.x));
      for (Eigen::Index i = 0; i < xi.size(); ++i) so.full[sp.interior[static_cast<std::size_t>(i)]] = xi[i];
    }
  }
  return so;
}

}  // namespace

SpectralResult ground_state(const FormSet& fs, const SolverOptions& opt) {
  if (fs.bc == BoundaryCondition::dtn) throw SolverError("ground_state: dtn forms need dtn_ground_state", {});
  const LobpcgResult lr = volume_problem(fs, fs.m, opt);
  return finish(fs, lr, lr.x, "ground_state");
}

SpectralResult dtn_ground_state(const FormSet& fs, const SolverOptions& opt) {
  if (fs.bc != BoundaryCondition::dtn) throw SolverError("dtn_ground_state: form was not assembled with dtn", {});
  const SchurOutcome so = boundary_problem(fs, fs.m_bnd, opt);
  return finish(fs, so.lr, so.full, "dtn_ground_state");
}

double lower_bound_ratio(const FormSet& fs, const Eigen::VectorXd& weight, const SolverOptions& opt) {
  if (weight.size() != static_cast<Eigen::Index>(fs.node_dof.size()))
    throw SolverError("lower_bound_ratio: one weight per grid node expected", {});
  if ((weight.array() < 0).any() || !(weight.maxCoeff() > 0))
    throw SolverError("lower_bound_ratio: weight must be non-negative and not identically zero", {});
  const Eigen::VectorXd w = fs.restrict_to_dofs(weight);
  if (fs.bc == BoundaryCondition::dtn) {
    const SchurOutcome so = boundary_problem(fs, w.cwiseProduct(fs.m_bnd), opt);
    return finish(fs, so.lr, so.full, "lower_bound_ratio").lambda;
  }
  const LobpcgResult lr = volume_problem(fs, w.cwiseProduct(fs.m), opt);
  return finish(fs, lr, lr.x, "lower_bound_ratio").lambda;
}

}  // namespace maglap
