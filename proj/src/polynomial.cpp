#include "maglap/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace maglap {

int MultiIndex::order() const {
  int s = 0;
  for (int e : exponents) s += e;
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : exponents)
    for (int i = 2; i <= e; ++i) f *= i;
  return f;
}

std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int order) {
  std::vector<MultiIndex> out;
  if (dim == 0) return out;
  MultiIndex cur(dim);
  // Enumerate compositions of `order` into dim non-negative parts.
  auto rec = [&](auto&& self, std::size_t k, int remaining) -> void {
    if (k + 1 == dim) {
      cur[k] = remaining;
      out.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[k] = e;
      self(self, k + 1, remaining - e);
    }
  };
  rec(rec, 0, order);
  std::sort(out.begin(), out.end());
  return out;
}

Polynomial::Polynomial(std::size_t dim, Terms terms) : dim_(dim) {
  for (auto& [alpha, c] : terms) add_term(alpha, c);
}

Polynomial Polynomial::constant(std::size_t dim, double c) {
  Polynomial p(dim);
  p.add_term(MultiIndex(dim), c);
  return p;
}

Polynomial Polynomial::coordinate(std::size_t dim, std::size_t k) {
  MultiIndex a(dim);
  a[k] = 1;
  return monomial(a, 1.0);
}

Polynomial Polynomial::monomial(const MultiIndex& alpha, double coeff) {
  Polynomial p(alpha.dim());
  p.add_term(alpha, coeff);
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.order());
  return d;
}

bool Polynomial::is_homogeneous(int degree) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [degree](const auto& t) { return t.first.order() == degree; });
}

double Polynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& alpha, double coeff) {
  if (alpha.dim() != dim_) throw std::invalid_argument("monomial dimension mismatch");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& [alpha, c] : terms_) {
    double v = c;
    for (std::size_t k = 0; k < dim_; ++k)
      for (int e = 0; e < alpha[k]; ++e) v *= x[k];
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::derivative(std::size_t k) const {
  Polynomial out(dim_);
  for (const auto& [alpha, c] : terms_) {
    if (alpha[k] == 0) continue;
    MultiIndex beta = alpha;
    beta[k] -= 1;
    out.add_term(beta, c * alpha[k]);
  }
  return out;
}

Polynomial Polynomial::derivative(const MultiIndex& alpha) const {
  Polynomial out = *this;
  for (std::size_t k = 0; k < alpha.dim(); ++k)
    for (int e = 0; e < alpha[k]; ++e) out = out.derivative(k);
  return out;
}

double Polynomial::derivative_at(const MultiIndex& alpha, const Point& x) const {
  return derivative(alpha)(x);
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Polynomial Polynomial::translated(const Point& shift) const {
  Polynomial out(dim_);
  for (const auto& [alpha, c] : terms_) {
    // prod_k (x_k + s_k)^{a_k} = prod_k sum_{j<=a_k} C(a_k, j) s_k^{a_k-j} x_k^j
    Polynomial acc = Polynomial::constant(dim_, c);
    for (std::size_t k = 0; k < dim_; ++k) {
      if (alpha[k] == 0) continue;
      Polynomial f(dim_);
      for (int j = 0; j <= alpha[k]; ++j) {
        MultiIndex m(dim_);
        m[k] = j;
        f.add_term(m, binomial(alpha[k], j) * std::pow(shift[static_cast<Eigen::Index>(k)], alpha[k] - j));
      }
      acc = acc * f;
    }
    out += acc;
  }
  return out;
}

Polynomial Polynomial::composed_linear(const Eigen::MatrixXd& m) const {
  std::vector<Polynomial> rows;
  for (std::size_t k = 0; k < dim_; ++k) {
    Polynomial row(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      MultiIndex e(dim_);
      e[j] = 1;
      row.add_term(e, m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
    }
    rows.push_back(std::move(row));
  }
  Polynomial out(dim_);
  for (const auto& [alpha, c] : terms_) {
    Polynomial acc = Polynomial::constant(dim_, c);
    for (std::size_t k = 0; k < dim_; ++k)
      if (alpha[k] > 0) acc = acc * pow(rows[k], alpha[k]);
    out += acc;
  }
  return out;
}

Polynomial Polynomial::homogeneous_part(int order) const {
  Polynomial out(dim_);
  for (const auto& [alpha, c] : terms_)
    if (alpha.order() == order) out.add_term(alpha, c);
  return out;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [alpha, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::pruned(double rel_tol) const {
  const double cut = rel_tol * max_abs_coefficient();
  Polynomial out(dim_);
  for (const auto& [alpha, c] : terms_)
    if (std::abs(c) > cut) out.add_term(alpha, c);
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (dim_ == 0) dim_ = rhs.dim_;
  for (const auto& [alpha, c] : rhs.terms_) add_term(alpha, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (dim_ == 0) dim_ = rhs.dim_;
  for (const auto& [alpha, c] : rhs.terms_) add_term(alpha, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [alpha, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out(std::max(a.dim(), b.dim()));
  for (const auto& [alpha, ca] : a.terms())
    for (const auto& [beta, cb] : b.terms()) {
      MultiIndex g = alpha;
      for (std::size_t k = 0; k < g.dim(); ++k) g[k] += beta[k];
      out.add_term(g, ca * cb);
    }
  return out;
}

Polynomial pow(const Polynomial& p, int n) {
  Polynomial out = Polynomial::constant(p.dim(), 1.0);
  for (int i = 0; i < n; ++i) out = out * p;
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    for (std::size_t k = 0; k < dim_; ++k) {
      if (alpha[k] == 0) continue;
      os << "*x" << (k + 1);
      if (alpha[k] > 1) os << "^" << alpha[k];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

PolyVectorField::PolyVectorField(std::vector<Polynomial> components) : components_(std::move(components)) {
  for (const auto& c : components_)
    if (c.dim() != components_.size())
      throw std::invalid_argument("potential component dimension must equal the number of components");
}

PolyVectorField PolyVectorField::zero(std::size_t dim) {
  return PolyVectorField(std::vector<Polynomial>(dim, Polynomial(dim)));
}

int PolyVectorField::degree() const {
  int d = -1;
  for (const auto& c : components_) d = std::max(d, c.degree());
  return d;
}

Eigen::VectorXd PolyVectorField::operator()(const Point& x) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim()));
  for (std::size_t k = 0; k < dim(); ++k) v[static_cast<Eigen::Index>(k)] = components_[k](x);
  return v;
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& rhs) {
  if (rhs.dim() != dim()) throw std::invalid_argument("potential dimension mismatch");
  for (std::size_t k = 0; k < dim(); ++k) components_[k] += rhs.components_[k];
  return *this;
}

PolyVectorField operator*(double s, PolyVectorField a) {
  for (auto& c : a.components_) c *= s;
  return a;
}

PolyVectorField gradient(const Polynomial& p) {
  std::vector<Polynomial> comps;
  for (std::size_t k = 0; k < p.dim(); ++k) comps.push_back(p.derivative(k));
  return PolyVectorField(std::move(comps));
}

// ---------------------------------------------------------------------------

PolyMatrixField::PolyMatrixField(std::size_t dim) : dim_(dim), entries_(dim * dim, Polynomial(dim)) {}

PolyMatrixField PolyMatrixField::from_upper(
    std::size_t dim, const std::map<std::pair<std::size_t, std::size_t>, Polynomial>& upper) {
  PolyMatrixField b(dim);
  for (const auto& [jk, p] : upper) {
    if (jk.first >= jk.second || jk.second >= dim) throw std::invalid_argument("from_upper expects j < k < dim");
    b.set(jk.first, jk.second, p);
  }
  return b;
}

PolyMatrixField PolyMatrixField::planar(const Polynomial& b12) { return from_upper(2, {{{0, 1}, b12}}); }

void PolyMatrixField::set(std::size_t j, std::size_t k, const Polynomial& p) {
  if (j == k) throw std::invalid_argument("diagonal of an antisymmetric field is zero");
  entries_[j * dim_ + k] = p;
  entries_[k * dim_ + j] = -p;
}

bool PolyMatrixField::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Polynomial& p) { return p.is_zero(); });
}

bool PolyMatrixField::is_antisymmetric() const {
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = 0; k < dim_; ++k)
      if (!((*this)(j, k) + (*this)(k, j)).is_zero()) return false;
  return true;
}

int PolyMatrixField::degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

Eigen::MatrixXd PolyMatrixField::operator()(const Point& x) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = j + 1; k < dim_; ++k) {
      const double v = (*this)(j, k)(x);
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = -v;
    }
  return m;
}

Eigen::MatrixXd PolyMatrixField::derivative_at(const MultiIndex& alpha, const Point& x) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = j + 1; k < dim_; ++k) {
      const double v = (*this)(j, k).derivative_at(alpha, x);
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = -v;
    }
  return m;
}

PolyMatrixField PolyMatrixField::translated(const Point& shift) const {
  PolyMatrixField out(dim_);
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = j + 1; k < dim_; ++k) out.set(j, k, (*this)(j, k).translated(shift));
  return out;
}

PolyMatrixField PolyMatrixField::homogeneous_part(int order) const {
  PolyMatrixField out(dim_);
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = j + 1; k < dim_; ++k) out.set(j, k, (*this)(j, k).homogeneous_part(order));
  return out;
}

PolyMatrixField PolyMatrixField::operator*(double s) const {
  PolyMatrixField out(dim_);
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = j + 1; k < dim_; ++k) out.set(j, k, (*this)(j, k) * s);
  return out;
}

PolyMatrixField curl(const PolyVectorField& a) {
  const std::size_t d = a.dim();
  PolyMatrixField b(d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) b.set(j, k, a[k].derivative(j) - a[j].derivative(k));
  return b;
}

// ---------------------------------------------------------------------------

FieldNormEvaluator::FieldNormEvaluator(const PolyMatrixField& b, double scale) : dim_(b.dim()) {
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t k = j + 1; k < dim_; ++k) {
      const Polynomial& p = b(j, k);
      if (p.is_zero()) continue;
      Entry e;
      for (const auto& [alpha, c] : p.terms()) {
        for (std::size_t i = 0; i < dim_; ++i) {
          e.exps.push_back(alpha[i]);
          max_exp_ = std::max(max_exp_, alpha[i]);
        }
        e.coeffs.push_back(c * scale);
      }
      upper_.push_back(std::move(e));
    }
}

double FieldNormEvaluator::norm(std::span<const double> x) const {
  // powers[i * (max_exp_+1) + e] = x_i^e
  double powers[3 * 16];
  const int stride = max_exp_ + 1;
  const bool small = dim_ <= 3 && stride <= 16;
  std::vector<double> heap;
  double* pw = powers;
  if (!small) {
    heap.resize(dim_ * static_cast<std::size_t>(stride));
    pw = heap.data();
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    double v = 1.0;
    for (int e = 0; e < stride; ++e) {
      pw[i * static_cast<std::size_t>(stride) + static_cast<std::size_t>(e)] = v;
      v *= x[i];
    }
  }
  double sum_sq = 0.0;
  for (const Entry& e : upper_) {
    double v = 0.0;
    const int* ex = e.exps.data();
    for (double c : e.coeffs) {
      double t = c;
      for (std::size_t i = 0; i < dim_; ++i) t *= pw[i * static_cast<std::size_t>(stride) + static_cast<std::size_t>(*ex++)];
      v += t;
    }
    sum_sq += v * v;
  }
  return std::sqrt(2.0 * sum_sq);
}

}  // namespace maglap
