// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <vector>

#include "dtnspec/types.hpp"

namespace dtnspec {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const { return hi <= lo; }
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Finite union of disjoint closed intervals, sorted. Single points are
/// allowed until essential_closure removes them.
struct GridSet {
  std::vector<Interval> parts;

  bool empty() const { return parts.empty(); }
  double measure() const {
    double m = 0.0;
    for (const auto& p : parts) m += p.length();
    return m;
  }
  bool has_nondegenerate() const {
    return std::any_of(parts.begin(), parts.end(), [](const Interval& p) { return !p.degenerate(); });
  }
  bool contains(double x) const {
    return std::any_of(parts.begin(), parts.end(), [x](const Interval& p) { return p.lo <= x && x <= p.hi; });
  }
  bool operator==(const GridSet&) const = default;

  /// Runs of consecutive flagged grid points become [x_first, x_last].
  static GridSet from_flags(const std::vector<double>& xs, const std::vector<bool>& flags) {
    require(xs.size() == flags.size(), ErrorKind::ShapeMismatch, "grid and flags differ in length");
    GridSet s;
    std::size_t i = 0;
    while (i < xs.size()) {
      if (!flags[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < xs.size() && flags[j + 1]) ++j;
      s.parts.push_back({xs[i], xs[j]});
      i = j + 1;
    }
    return s;
  }
};

/// Sorts and merges overlapping or touching intervals; keeps points.
inline GridSet normalized(GridSet s) {
  std::sort(s.parts.begin(), s.parts.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  GridSet out;
  for (const auto& p : s.parts) {
    if (!out.parts.empty() && p.lo <= out.parts.back().hi)
      out.parts.back().hi = std::max(out.parts.back().hi, p.hi);
    else
      out.parts.push_back(p);
  }
  return out;
}

inline GridSet set_union(const GridSet& a, const GridSet& b) {
  GridSet s = a;
  s.parts.insert(s.parts.end(), b.parts.begin(), b.parts.end());
  return normalized(std::move(s));
}

/// Drops zero-length components and closes the union of the rest.
inline GridSet essential_closure(const GridSet& s) {
  GridSet kept;
  for (const auto& p : s.parts)
    if (!p.degenerate()) kept.parts.push_back(p);
  return normalized(std::move(kept));
}

}  // namespace dtnspec
