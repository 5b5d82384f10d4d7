#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maglap {

using Point = Eigen::VectorXd;

/// Exponent vector of a monomial x^alpha; its length is the ambient dimension.
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : exponents(dim, 0) {}
  MultiIndex(std::initializer_list<int> e) : exponents(e) {}
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}

  std::size_t dim() const { return exponents.size(); }
  int order() const;
  int operator[](std::size_t k) const { return exponents[k]; }
  int& operator[](std::size_t k) { return exponents[k]; }
  /// alpha! = prod_k alpha_k!
  double factorial() const;

  auto operator<=>(const MultiIndex&) const = default;
};

/// All multi-indices of dimension dim with |alpha| == order, in lexicographic order.
std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int order);

/// Real multivariate polynomial stored sparsely; exact zeros are never stored.
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, double>;

  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {}
  Polynomial(std::size_t dim, Terms terms);

  static Polynomial constant(std::size_t dim, double c);
  /// The coordinate function x_k.
  static Polynomial coordinate(std::size_t dim, std::size_t k);
  static Polynomial monomial(const MultiIndex& alpha, double coeff);

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Degree of the highest-order term; -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous(int degree) const;
  double coefficient(const MultiIndex& alpha) const;

  void add_term(const MultiIndex& alpha, double coeff);

  double operator()(std::span<const double> x) const;
  double operator()(const Point& x) const {
    return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  Polynomial derivative(std::size_t k) const;
  Polynomial derivative(const MultiIndex& alpha) const;
  /// Value of d^alpha p at x.
  double derivative_at(const MultiIndex& alpha, const Point& x) const;

  /// p(x + shift), expanded exactly.
  Polynomial translated(const Point& shift) const;
  /// p(M x) for a square matrix M, expanded exactly.
  Polynomial composed_linear(const Eigen::MatrixXd& m) const;
  /// Terms of total degree exactly `order`.
  Polynomial homogeneous_part(int order) const;
  /// Drops terms with |coeff| <= tol * (largest |coeff|).
  Polynomial pruned(double rel_tol) const;
  double max_abs_coefficient() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const { return *this * -1.0; }

  bool operator==(const Polynomial& rhs) const = default;

  std::string to_string() const;

 private:
  std::size_t dim_ = 0;
  Terms terms_;
};

Polynomial pow(const Polynomial& p, int n);

/// Vector potential A: R^d -> R^d with polynomial components.
class PolyVectorField {
 public:
  PolyVectorField() = default;
  explicit PolyVectorField(std::vector<Polynomial> components);
  static PolyVectorField zero(std::size_t dim);

  std::size_t dim() const { return components_.size(); }
  const Polynomial& operator[](std::size_t k) const { return components_[k]; }
  Polynomial& operator[](std::size_t k) { return components_[k]; }
  const std::vector<Polynomial>& components() const { return components_; }
  int degree() const;

  Eigen::VectorXd operator()(const Point& x) const;

  PolyVectorField& operator+=(const PolyVectorField& rhs);
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator*(double s, PolyVectorField a);

  bool operator==(const PolyVectorField& rhs) const = default;

 private:
  std::vector<Polynomial> components_;
};

PolyVectorField gradient(const Polynomial& p);

/// Antisymmetric matrix of polynomials, the field B = curl A.
class PolyMatrixField {
 public:
  PolyMatrixField() = default;
  explicit PolyMatrixField(std::size_t dim);
  /// Builds B from its upper-triangular entries B_jk (j < k); lower ones are negated copies.
  static PolyMatrixField from_upper(std::size_t dim,
                                    const std::map<std::pair<std::size_t, std::size_t>, Polynomial>& upper);
  /// 2D convenience: B_12 = b.
  static PolyMatrixField planar(const Polynomial& b12);

  std::size_t dim() const { return dim_; }
  const Polynomial& operator()(std::size_t j, std::size_t k) const { return entries_[j * dim_ + k]; }
  /// Sets B_jk and B_kj = -B_jk together.
  void set(std::size_t j, std::size_t k, const Polynomial& p);

  bool is_zero() const;
  bool is_antisymmetric() const;
  int degree() const;

  Eigen::MatrixXd operator()(const Point& x) const;
  Eigen::MatrixXd derivative_at(const MultiIndex& alpha, const Point& x) const;
  PolyMatrixField translated(const Point& shift) const;
  PolyMatrixField homogeneous_part(int order) const;
  PolyMatrixField operator*(double s) const;

  bool operator==(const PolyMatrixField& rhs) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Polynomial> entries_;
};

/// B_jk = d_j A_k - d_k A_j by exact term-wise differentiation.
PolyMatrixField curl(const PolyVectorField& a);

/// Compiled form for fast repeated evaluation of |B(x)|_F.
class FieldNormEvaluator {
 public:
  explicit FieldNormEvaluator(const PolyMatrixField& b, double scale = 1.0);
  std::size_t dim() const { return dim_; }
  double norm(std::span<const double> x) const;
  double norm(const Point& x) const {
    return norm(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

 private:
  struct Entry {
    std::vector<int> exps;  // term-major, dim_ per term
    std::vector<double> coeffs;
  };
  std::size_t dim_ = 0;
  int max_exp_ = 0;
  std::vector<Entry> upper_;
};

}  // namespace maglap
