// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "dtnspec/types.hpp"

namespace dtnspec {

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

}  // namespace detail

/// Diagonal of the Neville table that extrapolates samples f(t_i) to t = 0.
template <class T>
std::vector<T> neville_diagonal(const std::vector<double>& t, const std::vector<T>& f) {
  require(t.size() == f.size() && !t.empty(), ErrorKind::ShapeMismatch, "extrapolation needs matching samples");
  const std::size_t k = t.size();
  std::vector<T> col = f;
  std::vector<T> diag;
  diag.reserve(k);
  diag.push_back(col[0]);
  // After pass j, col[i] holds the degree-j interpolant through t[i-j..i] evaluated at 0.
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = k - 1; i >= j; --i) {
      const double denom = t[i - j] - t[i];
      col[i] = T(col[i] + (col[i] - col[i - 1]) * (t[i] / denom));
      if (i == j) break;
    }
    diag.push_back(col[j]);
  }
  return diag;
}

template <class T>
struct Extrapolated {
  T value;
  double error = 0.0;
};

/// Richardson extrapolation to t = 0; the error is |last - previous| diagonal entry.
template <class T>
Extrapolated<T> richardson(const std::vector<double>& t, const std::vector<T>& f) {
  const auto diag = neville_diagonal(t, f);
  if (diag.size() == 1) return {diag[0], std::numeric_limits<double>::infinity()};
  const T& last = diag.back();
  const T& prev = diag[diag.size() - 2];
  return {last, detail::magnitude(T(last - prev))};
}

}  // namespace dtnspec
