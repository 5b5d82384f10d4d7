#include "maglap/lobpcg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace maglap {

namespace {

using Mat = Eigen::MatrixXcd;

// Columns of s spanning its range in the B inner product, B-orthonormal; near-dependent
// directions are dropped.
Mat b_orthonormal_basis(const Mat& s, const Eigen::VectorXd& b) {
  if (s.cols() == 0) return s;
  Mat sn = s;
  for (Eigen::Index j = 0; j < sn.cols(); ++j) {
    const double nrm = std::sqrt((b.array() * sn.col(j).array().abs2()).sum());
    if (nrm > 0) sn.col(j) /= nrm;
  }
  const Mat g = sn.adjoint() * (b.asDiagonal() * sn);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    if (es.eigenvalues()[j] > 1e-12 * top) keep.push_back(j);
  Mat out(s.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const Eigen::Index j = keep[i];
    out.col(static_cast<Eigen::Index>(i)) = sn * es.eigenvectors().col(j) / std::sqrt(es.eigenvalues()[j]);
  }
  // One re-orthonormalization pass cleans up the Gram-matrix rounding.
  if (out.cols() > 0) {
    const Mat g2 = out.adjoint() * (b.asDiagonal() * out);
    Eigen::LLT<Mat> llt(g2);
    if (llt.info() == Eigen::Success) out = llt.matrixU().solve<Eigen::OnTheRight>(out);
  }
  return out;
}

Mat b_project_out(const Mat& y, const Mat& x, const Eigen::VectorXd& b) {
  return y - x * (x.adjoint() * (b.asDiagonal() * y));
}

}  // namespace

LobpcgResult lobpcg(Eigen::Index n, const BlockOperator& a, const Eigen::VectorXd& b_diag, const BlockOperator& precond,
                    const LobpcgOptions& opt, const ShiftCallback& reshift) {
  const Eigen::Index k = std::clamp<Eigen::Index>(opt.block, 1, std::min<Eigen::Index>(4, n));
  const double bmax = b_diag.maxCoeff();
  const Eigen::VectorXd b_inv = b_diag.cwiseMax(1e-14 * bmax).cwiseInverse();

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  Mat x(n, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = {nd(rng), nd(rng)};
  x = b_orthonormal_basis(x, b_diag);

  Mat ax;
  a(x, ax);
  // Initial Rayleigh-Ritz on X.
  {
    const Mat h = x.adjoint() * ax;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
    x = x * es.eigenvectors();
    ax = ax * es.eigenvectors();
  }
  Eigen::VectorXd lam(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) lam[j] = x.col(j).dot(ax.col(j)).real();

  Mat p(n, 0);
  double shift = -std::numeric_limits<double>::infinity();
  double shift_res = std::numeric_limits<double>::infinity();
  LobpcgResult best;
  best.residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= opt.max_iter; ++it) {
    const Mat r = ax - b_diag.asDiagonal() * x * lam.asDiagonal();
    // Eigenvalue bound (B^{-1} norm) steers the shift; the plain residual gates convergence.
    const double res_b = std::sqrt((b_inv.array() * r.col(0).array().abs2()).sum());
    const double res0 = r.col(0).norm() / x.col(0).norm();
    if (res0 < best.residual) {
      best.residual = res0;
      best.lambda = lam[0];
      best.x = x.col(0);
      best.iterations = it;
    }
    if (res0 <= opt.tol) {
      best.converged = true;
      best.residual = res0;
      best.lambda = lam[0];
      best.x = x.col(0);
      best.iterations = it;
      return best;
    }
    if (it == opt.max_iter) break;
    if (reshift && it >= 2 && res_b < 0.1 * shift_res && res_b < 0.5 * std::abs(lam[0])) {
      const double sigma = lam[0] - 2.0 * res_b;
      if (sigma > shift) {
        shift = sigma;
        reshift(sigma);
      }
      shift_res = res_b;
    }

    Mat w;
    precond(r, w);
    Mat s(n, w.cols() + p.cols());
    s << w, p;
    Mat y = b_orthonormal_basis(b_project_out(s, x, b_diag), b_diag);
    y = b_orthonormal_basis(b_project_out(y, x, b_diag), b_diag);
    if (y.cols() == 0) break;
    Mat ay;
    a(y, ay);

    const Eigen::Index m = x.cols() + y.cols();
    Mat z(n, m), az(n, m);
    z << x, y;
    az << ax, ay;
    Mat ha = z.adjoint() * az;
    ha = 0.5 * (ha + ha.adjoint()).eval();
    Mat hb = z.adjoint() * (b_diag.asDiagonal() * z);
    hb = 0.5 * (hb + hb.adjoint()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(ha, hb);
    if (ges.info() != Eigen::Success) break;
    const Mat c = ges.eigenvectors().leftCols(k);
    lam = ges.eigenvalues().head(k);

    const Mat cy = c.bottomRows(y.cols());
    p = y * cy;
    x = z * c;
    ax = az * c;
  }
  best.converged = false;
  return best;
}

}  // namespace maglap
