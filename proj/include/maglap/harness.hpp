#pragma once

#include "maglap/assemble.hpp"
#include "maglap/geometry.hpp"
#include "maglap/model_problems.hpp"
#include "maglap/spectral.hpp"

#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace maglap {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// h(beta) = beta^{-1/(kappa+2)} / nodes_per_length, snapped so that the longest side of the
/// bounding box is an even number of intervals in [min_nodes - 1, max_nodes - 1].
struct GridRule {
  double nodes_per_length = 12.0;
  int min_nodes = 33;
  int max_nodes = 513;

  double spacing(const DomainSpec& domain, double beta, int kappa) const;
};

struct SweepPlan {
  PolyMatrixField field;
  DomainSpec domain = make_rectangle(Point::Constant(2, 0.5), Eigen::VectorXd::Ones(2));
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  std::vector<double> beta_list{50, 100, 200, 400, 800};
  GridRule grid;
  SolverOptions solver;
  /// Scale exponent kappa in the grid rule; kappa* for volume problems, kappa_0 for dtn.
  int kappa = 0;
  /// Also solve at 2h for every beta (self-convergence and Richardson).
  bool coarse_pass = true;
  std::size_t threads = 1;

  /// curl A = field in the radial gauge.
  PolyVectorField potential() const;
  void validate() const;
};

struct SweepRecord {
  double beta = 0.0;
  double lambda = 0.0;
  double h = 0.0;
  std::size_t n_nodes = 0;
  int iterations = 0;
  double residual = 0.0;
  /// Coarse solve at 2h; NaN when the coarse pass is off.
  double lambda_coarse = std::numeric_limits<double>::quiet_NaN();

  /// (4 lambda_h - lambda_2h) / 3, or lambda without a coarse pass.
  double lambda_extrapolated() const;
  /// |lambda_h - lambda_2h| / lambda_h, or NaN.
  double h_change() const;
};

std::vector<SweepRecord> run_sweep(const SweepPlan& plan);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);

struct FitResult {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double prefactor = 0.0;
  double prefactor_stderr = 0.0;
  std::vector<double> residuals;    // log-space, per point
  std::vector<double> consecutive;  // p_k from neighbouring pairs
};

FitResult fit_power_law(const std::vector<double>& beta, const std::vector<double>& lambda);
FitResult fit_power_law(const std::vector<SweepRecord>& records);

/// Rayleigh quotient of psi e^{i beta theta} with psi a radial bump of radius r about y and
/// theta(x) = -int_0^1 A(y + t(x - y)) . (x - y) dt.
double quasimode_upper_bound(const FormSet& fs, const PolyVectorField& a, const Point& y, double r);

struct QuasimodeOptions {
  GridRule grid;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  double tol = kDefaultVanishingTol;
};

/// Radius beta^{-1/(kappa(y)+2)}; interior points need the ball inside the domain,
/// boundary points must lie on the boundary.
double quasimode_upper_bound(const PolyMatrixField& field, const DomainSpec& domain, const Point& y, double beta,
                             const QuasimodeOptions& opt = {});

double target_exponent(BoundaryCondition bc, int kappa);

struct LeadingOrderReport {
  FitResult fit;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string message;
};

/// kappa is kappa* for volume problems and kappa_0 for dtn.
LeadingOrderReport verify_leading_order(const SweepPlan& plan, const std::vector<SweepRecord>& records, int kappa,
                                        double tolerance = -1.0);
LeadingOrderReport verify_leading_order(const SweepPlan& plan, const std::vector<SweepRecord>& records,
                                        const GammaReport& gamma, double tolerance = -1.0);

struct FirstTermReport {
  double theta_hat = 0.0;  // lambda at the largest beta, Richardson in h, over beta^p
  double theta = 0.0;
  double exponent = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// (lambda - theta beta^p) beta^{-q}, diagnostic only.
  double remainder_exponent = 0.0;
  std::vector<double> remainder_ratio;
  std::string message;
};

FirstTermReport verify_first_term(const SweepPlan& plan, const std::vector<SweepRecord>& records,
                                  const ThetaCoefficients& theta, int kappa, double tolerance = -1.0);

void write_fit_csv(std::ostream& os, const LeadingOrderReport& report, double target_prefactor, bool pass);

/// m(x, beta B)^2 at every grid node.
Eigen::VectorXd m_weights(const Grid& grid, const PolyMatrixField& field, double beta, const MExactOptions& opt = {});

/// Solves A_hom on a box of side L at spacing h, and beta A_hom on the box scaled by
/// s = beta^{-1/(kappa+2)} at spacing s h. Returns {beta^{2/(kappa+2)} lambda_1, lambda_beta}.
std::pair<double, double> scaling_pair(const PolyVectorField& a_hom, double side, double h, double beta,
                                       BoundaryCondition bc = BoundaryCondition::dirichlet,
                                       const SolverOptions& opt = {});

}  // namespace maglap
