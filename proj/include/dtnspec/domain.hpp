// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dtnspec/types.hpp"

namespace dtnspec {

enum class DomainKind { HalfLine1d, Exterior2d };

inline const char* to_string(DomainKind kind) {
  return kind == DomainKind::HalfLine1d ? "halfline1d" : "exterior2d";
}

/// Geometry request. For the half-line, Ω = (0, L) with ∂Ω = {0}; in 2D, Ω is
/// the box max(|x|,|y|) < L minus the closed square obstacle max(|x|,|y|) <= a.
struct DomainSpec {
  DomainKind kind = DomainKind::HalfLine1d;
  double h = 1.0;
  double L = 1.0;
  double a = 0.0;  // obstacle half-width, 2D only

  static DomainSpec halfline1d(double h, double L) { return {DomainKind::HalfLine1d, h, L, 0.0}; }
  static DomainSpec exterior2d(double h, double a, double L) {
    return {DomainKind::Exterior2d, h, L, a};
  }

  bool operator==(const DomainSpec&) const = default;
};

/// Integer lattice index; the physical coordinate is h * index.
using GridIndex = std::array<int, 2>;

struct DiscreteDomain {
  int dimension = 1;
  double h = 1.0;
  std::vector<GridIndex> interior_nodes;
  std::vector<GridIndex> dirichlet_boundary_nodes;
  std::vector<GridIndex> truncation_nodes;
  /// For each ∂Ω node, indices into interior_nodes of its inward neighbours.
  std::vector<std::vector<int>> boundary_adjacency;

  std::size_t interior_count() const { return interior_nodes.size(); }
  std::size_t boundary_count() const { return dirichlet_boundary_nodes.size(); }

  double interior_weight() const { return std::pow(h, dimension); }

  /// h^{d-1} times the number of inward neighbours of each ∂Ω node.
  VecR boundary_weights() const {
    VecR w(boundary_count());
    const double base = std::pow(h, dimension - 1);
    for (std::size_t b = 0; b < boundary_count(); ++b)
      w[static_cast<Eigen::Index>(b)] = base * static_cast<double>(boundary_adjacency[b].size());
    return w;
  }

  std::array<double, 2> coordinate(const GridIndex& g) const { return {h * g[0], h * g[1]}; }
};

namespace detail {

inline std::int64_t pack(const GridIndex& g) {
  return (static_cast<std::int64_t>(g[0]) << 32) ^ static_cast<std::uint32_t>(g[1]);
}

inline std::vector<GridIndex> neighbours(const GridIndex& g, int dim) {
  if (dim == 1) return {{g[0] - 1, 0}, {g[0] + 1, 0}};
  return {{g[0] - 1, g[1]}, {g[0] + 1, g[1]}, {g[0], g[1] - 1}, {g[0], g[1] + 1}};
}

// Number of lattice steps strictly below `extent`: largest k with k*h < extent.
inline int steps_below(double extent, double h) {
  const double ratio = extent / h;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) < 1e-9 * std::max(1.0, nearest)) return static_cast<int>(nearest) - 1;
  return static_cast<int>(std::floor(ratio));
}

// Largest k with k*h <= extent.
inline int steps_within(double extent, double h) {
  const double ratio = extent / h;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) < 1e-9 * std::max(1.0, nearest)) return static_cast<int>(nearest);
  return static_cast<int>(std::floor(ratio));
}

inline void check_connected(const DiscreteDomain& dom) {
  const auto n = dom.interior_count();
  if (n == 0) return;
  std::unordered_map<std::int64_t, int> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(pack(dom.interior_nodes[i]), static_cast<int>(i));
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t visited = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (const auto& nb : neighbours(dom.interior_nodes[static_cast<std::size_t>(i)], dom.dimension)) {
      auto it = index.find(pack(nb));
      if (it != index.end() && !seen[static_cast<std::size_t>(it->second)]) {
        seen[static_cast<std::size_t>(it->second)] = 1;
        ++visited;
        frontier.push(it->second);
      }
    }
  }
  require(visited == n, ErrorKind::InvalidArgument, "interior adjacency graph is not connected");
}

}  // namespace detail

inline DiscreteDomain build_domain(const DomainSpec& spec) {
  require(spec.h > 0.0 && std::isfinite(spec.h), ErrorKind::InvalidArgument, "mesh spacing h must be positive");
  require(spec.L > 0.0 && std::isfinite(spec.L), ErrorKind::InvalidArgument, "truncation length L must be positive");

  DiscreteDomain dom;
  dom.h = spec.h;

  if (spec.kind == DomainKind::HalfLine1d) {
    dom.dimension = 1;
    const int last = detail::steps_below(spec.L, spec.h);
    require(last >= 2, ErrorKind::InvalidArgument, "fewer than 2 interior nodes (L/h too small)");
    dom.dirichlet_boundary_nodes.push_back({0, 0});
    for (int k = 1; k <= last; ++k) dom.interior_nodes.push_back({k, 0});
    dom.truncation_nodes.push_back({last + 1, 0});
    dom.boundary_adjacency.push_back({0});
    return dom;
  }

  dom.dimension = 2;
  require(spec.a > 0.0 && spec.a < spec.L, ErrorKind::InvalidArgument,
          "obstacle half-width must satisfy 0 < a < L");
  const int box = detail::steps_below(spec.L, spec.h);
  const int obstacle = detail::steps_within(spec.a, spec.h);
  require(obstacle >= 0 && obstacle + 1 <= box, ErrorKind::InvalidArgument,
          "obstacle must be nonempty and strictly inside the truncation box");

  auto in_obstacle = [&](int i, int j) { return std::max(std::abs(i), std::abs(j)) <= obstacle; };
  auto in_box = [&](int i, int j) { return std::max(std::abs(i), std::abs(j)) <= box; };

  std::unordered_map<std::int64_t, int> interior_index;
  for (int j = -box; j <= box; ++j)
    for (int i = -box; i <= box; ++i)
      if (!in_obstacle(i, j)) {
        interior_index.emplace(detail::pack({i, j}), static_cast<int>(dom.interior_nodes.size()));
        dom.interior_nodes.push_back({i, j});
      }
  require(dom.interior_nodes.size() >= 2, ErrorKind::InvalidArgument, "fewer than 2 interior nodes");

  for (int j = -obstacle; j <= obstacle; ++j)
    for (int i = -obstacle; i <= obstacle; ++i) {
      std::vector<int> inward;
      for (const auto& nb : detail::neighbours({i, j}, 2)) {
        auto it = interior_index.find(detail::pack(nb));
        if (it != interior_index.end()) inward.push_back(it->second);
      }
      if (!inward.empty()) {
        dom.dirichlet_boundary_nodes.push_back({i, j});
        dom.boundary_adjacency.push_back(std::move(inward));
      }
    }

  for (int j = -box - 1; j <= box + 1; ++j)
    for (int i = -box - 1; i <= box + 1; ++i) {
      if (in_box(i, j)) continue;
      bool touches = false;
      for (const auto& nb : detail::neighbours({i, j}, 2))
        touches = touches || interior_index.count(detail::pack(nb)) > 0;
      if (touches) dom.truncation_nodes.push_back({i, j});
    }

  detail::check_connected(dom);
  return dom;
}

/// Potential values on interior and ∂Ω nodes, with declared bound |q| <= bound.
struct PotentialField {
  VecR interior;
  VecR boundary;
  double bound = 0.0;
};

inline PotentialField make_potential(VecR interior, VecR boundary, double bound) {
  require(bound >= 0.0, ErrorKind::InvalidArgument, "potential bound must be nonnegative");
  const double max_abs = std::max(interior.size() ? interior.cwiseAbs().maxCoeff() : 0.0,
                                  boundary.size() ? boundary.cwiseAbs().maxCoeff() : 0.0);
  require(max_abs <= bound, ErrorKind::InvalidArgument, "potential exceeds its declared bound");
  return {std::move(interior), std::move(boundary), bound};
}

inline PotentialField constant_potential(const DiscreteDomain& dom, double c) {
  const auto ni = static_cast<Eigen::Index>(dom.interior_count());
  const auto nb = static_cast<Eigen::Index>(dom.boundary_count());
  return make_potential(VecR::Constant(ni, c), VecR::Constant(nb, c), std::abs(c));
}

/// q = -depth on nodes at distance < width from the obstacle (x < width in 1D), 0 elsewhere.
inline PotentialField well_potential(const DiscreteDomain& dom, double depth, double width, double obstacle_half_width = 0.0) {
  auto value = [&](const GridIndex& g) {
    const auto c = dom.coordinate(g);
    const double dist = dom.dimension == 1
                            ? c[0]
                            : std::max(std::abs(c[0]), std::abs(c[1])) - obstacle_half_width;
    return dist < width ? -depth : 0.0;
  };
  VecR qi(static_cast<Eigen::Index>(dom.interior_count()));
  for (std::size_t i = 0; i < dom.interior_count(); ++i) qi[static_cast<Eigen::Index>(i)] = value(dom.interior_nodes[i]);
  VecR qb(static_cast<Eigen::Index>(dom.boundary_count()));
  for (std::size_t b = 0; b < dom.boundary_count(); ++b)
    qb[static_cast<Eigen::Index>(b)] = value(dom.dirichlet_boundary_nodes[b]);
  return make_potential(std::move(qi), std::move(qb), std::abs(depth));
}

}  // namespace dtnspec
