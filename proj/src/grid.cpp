#include "maglap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace maglap {

namespace {

constexpr double kSlack = 1e-10;

Point default_anchor(const DomainSpec& domain) {
  if (const auto* r = std::get_if<Rectangle>(&domain.variant())) return r->center - 0.5 * r->sides;
  return domain.anchor();
}

// True if the lattice point x' outside a half-space box left through a side or top face.
bool exits_artificially(const HalfSpaceBox& hs, const Eigen::MatrixXd& frame, const Point& x) {
  const Point y = frame * x;
  const auto d = y.size();
  const double lim = hs.half_width * (1.0 + kSlack);
  if (y[d - 1] > lim) return true;
  for (Eigen::Index k = 0; k + 1 < d; ++k)
    if (std::abs(y[k]) > lim) return true;
  return false;
}

}  // namespace

Point Grid::position(int node) const {
  return origin_ + h_ * index_[static_cast<std::size_t>(node)].cast<double>();
}

int Grid::node_at(const Eigen::VectorXi& k) const {
  long flat = 0;
  for (Eigen::Index j = static_cast<Eigen::Index>(dim_) - 1; j >= 0; --j) {
    const int off = k[j] - lo_[j];
    if (off < 0 || off >= shape_[j]) return -1;
    flat = flat * shape_[j] + off;
  }
  return lookup_[static_cast<std::size_t>(flat)];
}

int Grid::neighbor(int node, int axis, int dir) const {
  Eigen::VectorXi k = index_[static_cast<std::size_t>(node)];
  k[axis] += dir;
  return node_at(k);
}

std::size_t Grid::count(NodeFlag f) const { return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), f)); }

Eigen::VectorXi Grid::extent() const {
  Eigen::VectorXi lo = Eigen::VectorXi::Constant(static_cast<Eigen::Index>(dim_), std::numeric_limits<int>::max());
  Eigen::VectorXi hi = Eigen::VectorXi::Constant(static_cast<Eigen::Index>(dim_), std::numeric_limits<int>::min());
  for (const auto& k : index_) {
    lo = lo.cwiseMin(k);
    hi = hi.cwiseMax(k);
  }
  return (hi - lo).array() + 1;
}

Grid build_grid(const DomainSpec& domain, double h, const std::optional<Point>& anchor) {
  if (!(h > 0)) throw DiscretizeError("build_grid: spacing must be positive");
  const auto d = static_cast<Eigen::Index>(domain.dim());
  Grid g;
  g.dim_ = domain.dim();
  g.h_ = h;
  g.origin_ = anchor ? *anchor : default_anchor(domain);
  if (g.origin_.size() != d) throw DiscretizeError("build_grid: anchor dimension mismatch");

  const auto [blo, bhi] = domain.bounding_box();
  g.lo_.resize(d);
  g.shape_.resize(d);
  long total = 1;
  for (Eigen::Index k = 0; k < d; ++k) {
    g.lo_[k] = static_cast<int>(std::floor((blo[k] - g.origin_[k]) / h - 1e-9));
    const int hi = static_cast<int>(std::ceil((bhi[k] - g.origin_[k]) / h + 1e-9));
    g.shape_[k] = hi - g.lo_[k] + 1;
    total *= g.shape_[k];
  }
  if (total > 400'000'000L) throw DiscretizeError("build_grid: lattice too large");

  // Candidate nodes: lattice points in the closed domain.
  std::vector<char> member(static_cast<std::size_t>(total), 0);
  Eigen::VectorXi k = g.lo_;
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (Eigen::Index j = 0; j < d; ++j) {
      k[j] = g.lo_[j] + static_cast<int>(rem % g.shape_[j]);
      rem /= g.shape_[j];
    }
    const Point x = g.origin_ + h * k.cast<double>();
    member[static_cast<std::size_t>(flat)] = inside_closed(domain, x, kSlack);
  }
  auto flat_of = [&](const Eigen::VectorXi& idx) -> long {
    long f = 0;
    for (Eigen::Index j = d - 1; j >= 0; --j) {
      const int off = idx[j] - g.lo_[j];
      if (off < 0 || off >= g.shape_[j]) return -1;
      f = f * g.shape_[j] + off;
    }
    return f;
  };
  // Drop isolated points (no lattice neighbor in the domain).
  std::vector<char> keep = member;
  for (long flat = 0; flat < total; ++flat) {
    if (!member[static_cast<std::size_t>(flat)]) continue;
    long rem = flat;
    for (Eigen::Index j = 0; j < d; ++j) {
      k[j] = g.lo_[j] + static_cast<int>(rem % g.shape_[j]);
      rem /= g.shape_[j];
    }
    bool any = false;
    for (Eigen::Index j = 0; j < d && !any; ++j)
      for (int dir : {-1, 1}) {
        Eigen::VectorXi kk = k;
        kk[j] += dir;
        const long f = flat_of(kk);
        if (f >= 0 && member[static_cast<std::size_t>(f)]) any = true;
      }
    keep[static_cast<std::size_t>(flat)] = any;
  }

  g.lookup_.assign(static_cast<std::size_t>(total), -1);
  for (long flat = 0; flat < total; ++flat) {
    if (!keep[static_cast<std::size_t>(flat)]) continue;
    long rem = flat;
    for (Eigen::Index j = 0; j < d; ++j) {
      k[j] = g.lo_[j] + static_cast<int>(rem % g.shape_[j]);
      rem /= g.shape_[j];
    }
    g.lookup_[static_cast<std::size_t>(flat)] = static_cast<int>(g.index_.size());
    g.index_.push_back(k);
  }
  const int n = static_cast<int>(g.index_.size());
  if (n == 0) throw DiscretizeError("grid too coarse: no lattice points in the domain");
  const Eigen::VectorXi ext = g.extent();
  if (ext.minCoeff() < 5) {
    std::ostringstream os;
    os << "grid too coarse: " << ext.minCoeff() << " nodes across an axis at h=" << h;
    throw DiscretizeError(os.str());
  }

  // Flags and trapezoid factors.
  const auto* hs = std::get_if<HalfSpaceBox>(&domain.variant());
  const Eigen::MatrixXd frame = hs ? half_space_frame(hs->normal) : Eigen::MatrixXd();
  g.flags_.assign(static_cast<std::size_t>(n), NodeFlag::interior);
  g.mass_.resize(n);
  // missing[node] bit 2j: -e_j absent, bit 2j+1: +e_j absent; true_missing marks true-boundary exits.
  std::vector<std::uint32_t> missing(static_cast<std::size_t>(n), 0), true_missing(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    bool artificial = false;
    double mu = std::pow(h, static_cast<double>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
      bool half = false;
      for (int s = 0; s < 2; ++s) {
        const int dir = s ? 1 : -1;
        if (g.neighbor(v, static_cast<int>(j), dir) >= 0) continue;
        half = true;
        const std::uint32_t bit = 1u << (2 * j + s);
        missing[static_cast<std::size_t>(v)] |= bit;
        Point xo = g.position(v);
        xo[j] += dir * h;
        if (hs && exits_artificially(*hs, frame, xo))
          artificial = true;
        else
          true_missing[static_cast<std::size_t>(v)] |= bit;
      }
      if (half) mu *= 0.5;
    }
    g.mass_[v] = mu;
    if (artificial)
      g.flags_[static_cast<std::size_t>(v)] = NodeFlag::artificial_boundary;
    else if (missing[static_cast<std::size_t>(v)])
      g.flags_[static_cast<std::size_t>(v)] = NodeFlag::true_boundary;
  }

  const double hw = std::pow(h, static_cast<double>(d) - 2.0);
  for (int u = 0; u < n; ++u)
    for (Eigen::Index j = 0; j < d; ++j) {
      const int v = g.neighbor(u, static_cast<int>(j), 1);
      if (v < 0) continue;
      double w = hw;
      const auto mu_ = missing[static_cast<std::size_t>(u)], mv = missing[static_cast<std::size_t>(v)];
      for (Eigen::Index i = 0; i < d; ++i) {
        if (i == j) continue;
        const std::uint32_t both = mu_ & mv & (3u << (2 * i));
        if (both) w *= 0.5;
      }
      g.edges_.push_back({u, v, static_cast<int>(j), w});
    }

  g.boundary_mass_ = Eigen::VectorXd::Zero(n);
  if (domain.grid_aligned()) {
    for (int v = 0; v < n; ++v) {
      const auto tm = true_missing[static_cast<std::size_t>(v)];
      if (!tm || g.flags_[static_cast<std::size_t>(v)] != NodeFlag::true_boundary) continue;
      for (Eigen::Index j = 0; j < d; ++j)
        for (int s = 0; s < 2; ++s) {
          if (!(tm & (1u << (2 * j + s)))) continue;
          double w = std::pow(h, static_cast<double>(d) - 1.0);
          for (Eigen::Index i = 0; i < d; ++i)
            if (i != j && (missing[static_cast<std::size_t>(v)] & (3u << (2 * i)))) w *= 0.5;
          g.boundary_mass_[v] += w;
        }
    }
  } else {
    // Arc-length (area) allocation of a dense boundary sample to the nearest true-boundary node.
    const std::size_t nb = g.count(NodeFlag::true_boundary);
    if (nb > 0) {
      const int count = static_cast<int>(std::max<std::size_t>(1024, 16 * nb));
      const BoundarySample bs = boundary_sample(domain, count);
      for (std::size_t i = 0; i < bs.size(); ++i) {
        const Point rel = (bs.points[i] - g.origin_) / h;
        Eigen::VectorXi c(d);
        for (Eigen::Index j = 0; j < d; ++j) c[j] = static_cast<int>(std::lround(rel[j]));
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        const int win = 3;
        const long span = static_cast<long>(std::pow(2 * win + 1, static_cast<double>(d)));
        for (long t = 0; t < span; ++t) {
          long rem = t;
          Eigen::VectorXi kk = c;
          for (Eigen::Index j = 0; j < d; ++j) {
            kk[j] += static_cast<int>(rem % (2 * win + 1)) - win;
            rem /= 2 * win + 1;
          }
          const int v = g.node_at(kk);
          if (v < 0 || g.flags_[static_cast<std::size_t>(v)] != NodeFlag::true_boundary) continue;
          const double dist = (g.position(v) - bs.points[i]).squaredNorm();
          if (dist < best_dist) {
            best_dist = dist;
            best = v;
          }
        }
        if (best < 0)
          for (int v = 0; v < n; ++v) {
            if (g.flags_[static_cast<std::size_t>(v)] != NodeFlag::true_boundary) continue;
            const double dist = (g.position(v) - bs.points[i]).squaredNorm();
            if (dist < best_dist) {
              best_dist = dist;
              best = v;
            }
          }
        g.boundary_mass_[best] += bs.weights[i];
      }
    }
  }
  return g;
}

}  // namespace maglap
