#pragma once

#include "maglap/grid.hpp"
#include "maglap/polynomial.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace maglap {

enum class BoundaryCondition { dirichlet, neumann, mixed, dtn };

BoundaryCondition parse_boundary_condition(std::string_view tag);
std::string to_string(BoundaryCondition bc);

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

/// Discrete quadratic form and masses on the active (non-eliminated) nodes.
struct FormSet {
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  double beta = 0.0;
  std::shared_ptr<const Grid> grid;
  SparseMatrixC q;
  Eigen::VectorXd m;
  Eigen::VectorXd m_bnd;
  std::vector<int> dof_node;  // active dof -> grid node
  std::vector<int> node_dof;  // grid node -> dof or -1

  Eigen::Index dofs() const { return q.rows(); }
  /// Extends a dof vector to all grid nodes with zeros on eliminated nodes.
  Eigen::VectorXcd to_nodes(const Eigen::VectorXcd& x) const;
  /// Restricts per-node values to active dofs.
  Eigen::VectorXd restrict_to_dofs(const Eigen::VectorXd& per_node) const;
  /// psi^* Q psi for a vector on active dofs.
  double energy(const Eigen::VectorXcd& psi) const;
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// beta times the line integral of A along the straight segment from u to v, exact for polynomial A.
double link_phase(const PolyVectorField& a, const Point& u, const Point& v, double beta);

FormSet assemble(std::shared_ptr<const Grid> grid, const PolyVectorField& a, double beta, BoundaryCondition bc);
FormSet assemble(const Grid& grid, const PolyVectorField& a, double beta, BoundaryCondition bc);

}  // namespace maglap
