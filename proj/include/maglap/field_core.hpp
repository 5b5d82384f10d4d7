#pragma once

#include "maglap/polynomial.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace maglap {

/// Raised when a pointwise field quantity is not defined for the given input.
class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VanishingOrder {
  enum class Status { finite, exceeds_cap, zero_field };
  Status status = Status::finite;
  int kappa = 0;

  bool finite() const { return status == Status::finite; }
  std::string describe() const;
};

constexpr double kDefaultVanishingTol = 1e-8;

/// Smallest derivative order at which B is nonzero at x, measured relative to the
/// largest derivative norm up to kappa_max.
VanishingOrder vanishing_order(const PolyMatrixField& b, const Point& x, double tol = kDefaultVanishingTol,
                               int kappa_max = -1);

/// Frobenius-norm sum over all multi-indices: sum |d^alpha B(x)|^{1/(|alpha|+2)}.
double m_tilde(const PolyMatrixField& b, const Point& x);

struct MExactOptions {
  int samples_per_axis = 33;
  double rel_tol = 1e-9;
};

/// max of |B| over the closed cube of side length r centered at x.
double cube_max_norm(const FieldNormEvaluator& ev, const Point& x, double r, int samples_per_axis = 33);

/// 1/r* with r* the largest cube side such that r^2 * max_{Q(x,r)} |B| <= 1.
double m_exact(const PolyMatrixField& b, const Point& x, const MExactOptions& opt = {});
double m_exact(const FieldNormEvaluator& ev, const Point& x, double initial_guess, const MExactOptions& opt = {});

/// Orthonormal basis (columns) of the subspace of translations leaving P invariant.
Eigen::MatrixXd invariant_subspace(const PolyMatrixField& p);

/// Rows grad d^alpha B_jl(y) for |alpha| = kappa-1, j < l.
Eigen::MatrixXd transverse_gradients(const PolyMatrixField& b, const Point& y, int kappa);

/// Nondegeneracy of B transverse to its invariant subspace at y.
double sigma(const PolyMatrixField& b, const Point& y);

/// Length of the projection of the unit vector n onto span(v_basis).
double tau(const Eigen::MatrixXd& v_basis, const Eigen::VectorXd& n);

struct ModelData {
  Point y;
  int kappa = 0;
  PolyMatrixField p;
  PolyVectorField a_model;
  Eigen::MatrixXd v_basis;
  /// Zero when kappa == 0 (undefined there).
  double sigma = 0.0;
  /// Factor already applied to p and a_model; 1 for an unnormalized model.
  double normalization = 1.0;
};

/// Leading Taylor polynomial P_y of B(. + y) and the homogeneous potential whose curl it is.
ModelData taylor_model(const PolyMatrixField& b, const Point& y, double tol = kDefaultVanishingTol);

/// Homogeneous potential of degree kappa+1 with curl equal to the homogeneous field p.
PolyVectorField radial_gauge_potential(const PolyMatrixField& p);

/// sum over |alpha|=kappa of the norm of the matrix coefficient b_alpha; the norm is the
/// Euclidean norm of the independent entries (j < l).
double coefficient_mass(const PolyMatrixField& p, int kappa);

/// Rescales so that the coefficient mass equals one.
ModelData normalize_model(const ModelData& md);

/// Maps a whole-space ground energy of the normalized model back to the original one.
double unnormalize_energy(double lambda_normalized, double normalization, int kappa);

}  // namespace maglap
