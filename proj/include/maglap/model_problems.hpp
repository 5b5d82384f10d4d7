#pragma once

#include "maglap/assemble.hpp"
#include "maglap/field_core.hpp"
#include "maglap/geometry.hpp"
#include "maglap/spectral.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace maglap {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid spacing for a truncation of size R: either R / value or 1 / value.
struct SpacingRule {
  enum class Kind { per_radius, per_unit };
  Kind kind = Kind::per_radius;
  double value = 128.0;

  double h(double R) const { return kind == Kind::per_radius ? R / value : 1.0 / value; }
};

enum class ModelSetting { whole_space, half_space };

struct ModelProblemSpec {
  PolyVectorField a_hom;
  ModelSetting setting = ModelSetting::whole_space;
  Eigen::VectorXd normal;  // outward normal of the half-space {<x, n> < 0}
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  std::vector<double> r_list{4.0, 6.0, 8.0};
  SpacingRule h_rule;
  SolverOptions solver;
};

struct TruncationPoint {
  double R = 0.0;
  double h = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  std::size_t n_dofs = 0;
};

struct ModelEstimate {
  double lambda_inf = 0.0;
  double error_bar = 0.0;
  double decay_coefficient = 0.0;  // C in lambda(R) = lambda_inf + C / R^2
  bool fast_decay = false;  // truncation error fell faster than R^-2; lambda_inf is the last value
  std::vector<TruncationPoint> points;
};

/// Degree kappa + 1 of a homogeneous potential; throws unless all components are homogeneous.
int homogeneous_order(const PolyVectorField& a);

/// Dirichlet problems on the boxes [-R, R]^d, extrapolated by a least-squares fit in 1/R^2.
ModelEstimate lambda_whole_space(const ModelProblemSpec& spec);
/// Rotates n to -e_d, solves on [-R, R]^{d-1} x (0, R) with Dirichlet side and top faces.
ModelEstimate lambda_half_space(const ModelProblemSpec& spec);
ModelEstimate solve_model(const ModelProblemSpec& spec);

/// Potential in rotated coordinates y = Q x: A~(y) = Q A(Q^T y).
PolyVectorField rotate_potential(const PolyVectorField& a, const Eigen::MatrixXd& q);

/// Half the sum of the singular values of a constant antisymmetric matrix.
double tr_plus(const Eigen::MatrixXd& b);

struct MontgomeryResult {
  double energy = 0.0;
  double xi = 0.0;  // minimizing Fourier parameter
};

/// Ground energy of the planar model B_12 = b x_1 via the 1D family -d^2/dt^2 + (b t^2/2 - xi)^2.
MontgomeryResult montgomery_reduced(double b);

struct ThetaEvaluation {
  Point y;
  std::string branch;  // "interior" or "boundary"
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  int kappa = 0;
  double value = 0.0;  // model energy for the original (unnormalized) field
  ModelEstimate estimate;  // of the normalized model
};

struct ThetaCoefficients {
  double theta_d = 0.0;
  double theta_n = 0.0;
  double theta_dn = 0.0;
  bool has_d = false, has_n = false, has_dn = false;
  Point argmin_d, argmin_n, argmin_dn;
  std::string branch_d, branch_n, branch_dn;
  std::vector<ThetaEvaluation> evaluations;
};

struct ThetaOptions {
  std::vector<double> r_list{4.0, 6.0, 8.0};
  SpacingRule h_rule;
  SolverOptions solver;
  std::size_t max_points = 8;  // per Gamma set, evenly subsampled
  bool dirichlet = true;
  bool neumann = true;
  bool dtn = true;
};

ThetaCoefficients theta_coefficients(const PolyMatrixField& b, const DomainSpec& domain, const GammaReport& gamma,
                                     const ThetaOptions& opt = {});

/// CSV with columns y, branch, bc, R, h, lambda, residual, lambda_extrapolated, error_bar.
void write_model_csv(std::ostream& os, const std::vector<ThetaEvaluation>& evals);

}  // namespace maglap
