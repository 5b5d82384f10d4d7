#pragma once

#include "maglap/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace maglap {

class DiscretizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeFlag : std::uint8_t { interior, true_boundary, artificial_boundary };

struct GridEdge {
  int u = 0;
  int v = 0;  // v = u + h e_axis
  int axis = 0;
  double weight = 0.0;  // h^{d-2} times the trapezoid factor
};

/// Tensor lattice x = origin + h k clipped to the closure of a domain.
class Grid {
 public:
  std::size_t dim() const { return dim_; }
  double h() const { return h_; }
  const Point& origin() const { return origin_; }
  std::size_t size() const { return flags_.size(); }

  Point position(int node) const;
  const Eigen::VectorXi& lattice_index(int node) const { return index_[static_cast<std::size_t>(node)]; }
  NodeFlag flag(int node) const { return flags_[static_cast<std::size_t>(node)]; }
  const std::vector<NodeFlag>& flags() const { return flags_; }
  /// Node at lattice index k, or -1.
  int node_at(const Eigen::VectorXi& k) const;
  /// Neighbor along axis in direction dir = +1/-1, or -1.
  int neighbor(int node, int axis, int dir) const;

  const std::vector<GridEdge>& edges() const { return edges_; }
  /// Lumped volume weight h^d times the trapezoid factor.
  const Eigen::VectorXd& mass() const { return mass_; }
  /// Surface measure carried by true-boundary nodes (zero elsewhere).
  const Eigen::VectorXd& boundary_mass() const { return boundary_mass_; }

  std::size_t count(NodeFlag f) const;
  /// Number of distinct lattice coordinates used along each axis.
  Eigen::VectorXi extent() const;

 private:
  friend Grid build_grid(const DomainSpec&, double, const std::optional<Point>&);

  std::size_t dim_ = 0;
  double h_ = 0.0;
  Point origin_;
  Eigen::VectorXi lo_, shape_;
  std::vector<int> lookup_;
  std::vector<Eigen::VectorXi> index_;
  std::vector<NodeFlag> flags_;
  std::vector<GridEdge> edges_;
  Eigen::VectorXd mass_, boundary_mass_;
};

/// Lattice anchored at `anchor` (default: the domain's anchor). Throws "grid too coarse"
/// if fewer than 5 nodes span some axis.
Grid build_grid(const DomainSpec& domain, double h, const std::optional<Point>& anchor = std::nullopt);

}  // namespace maglap
