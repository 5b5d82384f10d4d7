#pragma once

#include "maglap/assemble.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>

namespace maglap {

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 300;
  int block = 2;
  std::uint64_t seed = 0x5eed;
};

struct SpectralResult {
  double lambda = 0.0;
  Eigen::VectorXcd psi;  // on grid nodes, zero on eliminated nodes
  double residual = 0.0;
  int iterations = 0;
  double h = 0.0;
  double R = 0.0;  // truncation size when known
  std::size_t n_dofs = 0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SpectralResult best) : std::runtime_error(what), best_(std::move(best)) {}
  const SpectralResult& best() const { return best_; }

 private:
  SpectralResult best_;
};

/// Smallest eigenvalue of Q psi = lambda M psi (dirichlet, neumann or mixed forms).
SpectralResult ground_state(const FormSet& fs, const SolverOptions& opt = {});

/// Smallest eigenvalue of Q psi = lambda M_bnd psi, posed on the boundary Schur complement.
SpectralResult dtn_ground_state(const FormSet& fs, const SolverOptions& opt = {});

/// Best constant c with psi^* Q psi >= c sum_v weight_v mass_v |psi_v|^2; the mass is M for
/// volume forms and M_bnd for dtn forms. `weight` is given per grid node.
double lower_bound_ratio(const FormSet& fs, const Eigen::VectorXd& weight, const SolverOptions& opt = {});

}  // namespace maglap
