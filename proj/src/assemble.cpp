#include "maglap/assemble.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace maglap {

BoundaryCondition parse_boundary_condition(std::string_view tag) {
  if (tag == "dirichlet") return BoundaryCondition::dirichlet;
  if (tag == "neumann") return BoundaryCondition::neumann;
  if (tag == "mixed") return BoundaryCondition::mixed;
  if (tag == "dtn") return BoundaryCondition::dtn;
  throw DiscretizeError("unknown boundary condition '" + std::string(tag) + "'");
}

std::string to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::dirichlet: return "dirichlet";
    case BoundaryCondition::neumann: return "neumann";
    case BoundaryCondition::mixed: return "mixed";
    case BoundaryCondition::dtn: return "dtn";
  }
  return "?";
}

Eigen::VectorXcd FormSet::to_nodes(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(node_dof.size()));
  for (std::size_t i = 0; i < dof_node.size(); ++i) out[dof_node[i]] = x[static_cast<Eigen::Index>(i)];
  return out;
}

Eigen::VectorXd FormSet::restrict_to_dofs(const Eigen::VectorXd& per_node) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(dof_node.size()));
  for (std::size_t i = 0; i < dof_node.size(); ++i) out[static_cast<Eigen::Index>(i)] = per_node[dof_node[i]];
  return out;
}

double FormSet::energy(const Eigen::VectorXcd& psi) const { return psi.dot(q * psi).real(); }

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch on [-1, 1], mapped to [0, 1].
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    nodes[static_cast<std::size_t>(k)] = 0.5 * (es.eigenvalues()[k] + 1.0);
    const double v0 = es.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = v0 * v0;  // 2 v0^2 on [-1,1], halved
  }
}

namespace {

struct PhaseRule {
  std::vector<double> t, w;
  explicit PhaseRule(int degree) { gauss_legendre(std::max(1, degree / 2 + 1), t, w); }

  double operator()(const PolyVectorField& a, const Point& u, const Point& v, double beta) const {
    const Point dx = v - u;
    double s = 0.0;
    Point x(u.size());
    for (std::size_t q = 0; q < t.size(); ++q) {
      x = u + t[q] * dx;
      double dot = 0.0;
      for (Eigen::Index k = 0; k < dx.size(); ++k)
        if (dx[k] != 0.0) dot += a[static_cast<std::size_t>(k)](x) * dx[k];
      s += w[q] * dot;
    }
    return beta * s;
  }
};

}  // namespace

double link_phase(const PolyVectorField& a, const Point& u, const Point& v, double beta) {
  return PhaseRule(std::max(0, a.degree()))(a, u, v, beta);
}

FormSet assemble(std::shared_ptr<const Grid> grid, const PolyVectorField& a, double beta, BoundaryCondition bc) {
  if (!grid) throw DiscretizeError("assemble: null grid");
  if (a.dim() != grid->dim()) throw DiscretizeError("assemble: potential and grid dimensions differ");
  if (!(beta >= 0)) throw DiscretizeError("assemble: beta must be non-negative");
  const Grid& g = *grid;
  const int n = static_cast<int>(g.size());

  FormSet fs;
  fs.bc = bc;
  fs.beta = beta;
  fs.grid = grid;
  fs.node_dof.assign(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    const NodeFlag f = g.flag(v);
    bool active = true;
    switch (bc) {
      case BoundaryCondition::dirichlet: active = f == NodeFlag::interior; break;
      case BoundaryCondition::neumann: active = true; break;
      case BoundaryCondition::mixed:
      case BoundaryCondition::dtn: active = f != NodeFlag::artificial_boundary; break;
    }
    if (active) {
      fs.node_dof[static_cast<std::size_t>(v)] = static_cast<int>(fs.dof_node.size());
      fs.dof_node.push_back(v);
    }
  }
  const auto nd = static_cast<Eigen::Index>(fs.dof_node.size());
  if (nd == 0) throw DiscretizeError("assemble: no active nodes");

  const PhaseRule rule(std::max(0, a.degree()));
  std::vector<Eigen::Triplet<std::complex<double>>> trip;
  trip.reserve(g.edges().size() * 4);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(nd);
  const bool zero_field = beta == 0.0 || a.degree() < 0;
  for (const auto& e : g.edges()) {
    const int du = fs.node_dof[static_cast<std::size_t>(e.u)], dv = fs.node_dof[static_cast<std::size_t>(e.v)];
    if (du < 0 && dv < 0) continue;
    if (du >= 0) diag[du] += e.weight;
    if (dv >= 0) diag[dv] += e.weight;
    if (du < 0 || dv < 0) continue;
    const double theta = zero_field ? 0.0 : rule(a, g.position(e.u), g.position(e.v), beta);
    // |psi_v - e^{-i theta} psi_u|^2 w
    const std::complex<double> link = std::polar(e.weight, -theta);
    trip.emplace_back(dv, du, -link);
    trip.emplace_back(du, dv, -std::conj(link));
  }
  for (Eigen::Index i = 0; i < nd; ++i) trip.emplace_back(i, i, diag[i]);
  fs.q.resize(nd, nd);
  fs.q.setFromTriplets(trip.begin(), trip.end());
  fs.q.makeCompressed();

  fs.m = fs.restrict_to_dofs(g.mass());
  fs.m_bnd = bc == BoundaryCondition::dtn ? fs.restrict_to_dofs(g.boundary_mass()) : Eigen::VectorXd::Zero(nd);

  // Hermitian and diagonally dominant (hence positive semidefinite) by construction; checked anyway.
  const SparseMatrixC diff = fs.q - SparseMatrixC(fs.q.adjoint());
  double qmax = 0.0, dmax = 0.0;
  for (int k = 0; k < fs.q.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(fs.q, k); it; ++it) qmax = std::max(qmax, std::abs(it.value()));
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  if (dmax > 1e-13 * qmax) throw DiscretizeError("assemble: form is not Hermitian");
  Eigen::VectorXd offsum = Eigen::VectorXd::Zero(nd);
  for (int k = 0; k < fs.q.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(fs.q, k); it; ++it)
      if (it.row() != it.col()) offsum[it.row()] += std::abs(it.value());
  for (Eigen::Index i = 0; i < nd; ++i)
    if (diag[i] < offsum[i] * (1.0 - 1e-12)) throw DiscretizeError("assemble: form is not diagonally dominant");
  return fs;
}

FormSet assemble(const Grid& grid, const PolyVectorField& a, double beta, BoundaryCondition bc) {
  return assemble(std::make_shared<const Grid>(grid), a, beta, bc);
}

}  // namespace maglap
