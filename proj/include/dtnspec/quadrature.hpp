// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "dtnspec/extrapolation.hpp"
#include "dtnspec/types.hpp"

namespace dtnspec {

namespace gk15 {

// Kronrod abscissae on [0,1]; odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace gk15

template <class T>
struct QuadratureResult {
  T value;
  double error = 0.0;
  int intervals = 0;
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of a vector- or
/// matrix-valued function; the error is the norm of K15 - G7.
template <class T, class F>
QuadratureResult<T> integrate_gk15(F&& f, double a, double b, double abs_tol, int initial_pieces = 16,
                                   int max_intervals = 4000) {
  require(a < b, ErrorKind::InvalidArgument, "integration interval must satisfy a < b");
  struct Piece {
    double lo, hi;
    T value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  int evaluations = 0;
  auto rule = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    const T fc = f(c);
    T kron = fc * gk15::wgk[7];
    T gauss = fc * gk15::wg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = r * gk15::xgk[static_cast<std::size_t>(j)];
      const T s = T(f(c - dx) + f(c + dx));
      kron = T(kron + s * gk15::wgk[static_cast<std::size_t>(j)]);
      if (j % 2 == 1) gauss = T(gauss + s * gk15::wg[static_cast<std::size_t>(j / 2)]);
    }
    evaluations += 15;
    kron = T(kron * r);
    gauss = T(gauss * r);
    return Piece{lo, hi, kron, detail::magnitude(T(kron - gauss))};
  };

  std::priority_queue<Piece> heap;
  const double width = (b - a) / initial_pieces;
  for (int k = 0; k < initial_pieces; ++k) heap.push(rule(a + k * width, k + 1 == initial_pieces ? b : a + (k + 1) * width));

  auto total_error = [&]() {
    double e = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      e += copy.top().error;
      copy.pop();
    }
    return e;
  };
  double err = total_error();
  while (err > abs_tol) {
    require(static_cast<int>(heap.size()) < max_intervals, ErrorKind::QuadratureFailure,
            "adaptive quadrature exceeded its interval budget");
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Piece left = rule(worst.lo, mid), right = rule(mid, worst.hi);
    err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    if (err <= abs_tol) err = total_error();  // resync accumulated roundoff
  }

  // Deterministic summation order: by left endpoint.
  std::vector<Piece> pieces;
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.lo < q.lo; });
  QuadratureResult<T> out{pieces.front().value, 0.0, static_cast<int>(pieces.size()), evaluations};
  out.error = pieces.front().error;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    out.value = T(out.value + pieces[i].value);
    out.error += pieces[i].error;
  }
  return out;
}

}  // namespace dtnspec
