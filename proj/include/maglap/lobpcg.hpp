#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace maglap {

/// Applies a linear operator to each column of `in`.
using BlockOperator = std::function<void(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out)>;

struct LobpcgOptions {
  int block = 2;
  double tol = 1e-8;
  int max_iter = 300;
  std::uint64_t seed = 0x5eed;
};

struct LobpcgResult {
  double lambda = 0.0;
  Eigen::VectorXcd x;  // B-normalized
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Called with a new shift sigma; the preconditioner should become (A - sigma B)^{-1}.
using ShiftCallback = std::function<void(double sigma)>;

/// Smallest eigenpair of the Hermitian pencil A x = lambda B x with B diagonal and
/// non-negative. The residual is |Ax - lambda Bx| / |x| (Euclidean); converged when it drops
/// below tol. Returns the best iterate when max_iter is reached.
/// With `reshift`, the shift is moved below the current Ritz value by twice the residual
/// each time the residual drops tenfold (both in the B^{-1} norm), which resolves dense spectra just above lambda_1.
LobpcgResult lobpcg(Eigen::Index n, const BlockOperator& a, const Eigen::VectorXd& b_diag, const BlockOperator& precond,
                    const LobpcgOptions& opt = {}, const ShiftCallback& reshift = {});

}  // namespace maglap
