// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "dtnspec/operator.hpp"

namespace dtnspec {

/// Dense eigendecomposition of A_II. This is the independent reference every
/// DtN-side verdict is checked against; nothing on the DtN path calls it.
struct EigenSystem {
  VecR eigenvalues;      // ascending
  MatR eigenvectors;     // columns orthonormal in the h^d-weighted pairing
  double interior_weight = 1.0;
  double degeneracy_tol = 0.0;
  /// Index ranges [first, last) of numerically equal eigenvalues.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;

  Eigen::Index size() const { return eigenvalues.size(); }

  /// Group containing an eigenvalue within the degeneracy tolerance of x, or -1.
  int group_at(double x) const {
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const double lam = eigenvalues[groups[k].first];
      if (std::abs(lam - x) <= degeneracy_tol) return static_cast<int>(k);
    }
    return -1;
  }

  double group_value(std::size_t k) const {
    double s = 0.0;
    for (auto i = groups[k].first; i < groups[k].second; ++i) s += eigenvalues[i];
    return s / static_cast<double>(groups[k].second - groups[k].first);
  }

  Eigen::Index multiplicity(std::size_t k) const { return groups[k].second - groups[k].first; }

  MatR group_vectors(std::size_t k) const {
    return eigenvectors.middleCols(groups[k].first, groups[k].second - groups[k].first);
  }
};

inline EigenSystem oracle_eigendecomposition(const DirichletOperator& op) {
  const MatR dense = MatR(op.A);
  Eigen::SelfAdjointEigenSolver<MatR> solver(dense);
  require(solver.info() == Eigen::Success, ErrorKind::InvalidArgument, "dense eigensolver failed");

  EigenSystem eig;
  eig.eigenvalues = solver.eigenvalues();
  eig.interior_weight = op.interior_weight();
  eig.eigenvectors = solver.eigenvectors() / std::sqrt(eig.interior_weight);
  const double diameter = eig.eigenvalues.size() > 1
                              ? eig.eigenvalues(eig.eigenvalues.size() - 1) - eig.eigenvalues(0)
                              : std::abs(eig.eigenvalues(0));
  eig.degeneracy_tol = 1e-8 * std::max(diameter, 1e-300);

  Eigen::Index first = 0;
  for (Eigen::Index i = 1; i <= eig.eigenvalues.size(); ++i) {
    if (i == eig.eigenvalues.size() || eig.eigenvalues(i) - eig.eigenvalues(i - 1) > eig.degeneracy_tol) {
      eig.groups.emplace_back(first, i);
      first = i;
    }
  }
  return eig;
}

/// Sum of w_I-orthogonal eigenprojectors for eigenvalues inside (a, b).
inline MatR oracle_projector(const EigenSystem& eig, double a, double b) {
  require(a < b, ErrorKind::InvalidArgument, "interval must satisfy a < b");
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double lam = eig.eigenvalues(i);
    require(std::abs(lam - a) > eig.degeneracy_tol && std::abs(lam - b) > eig.degeneracy_tol,
            ErrorKind::EndpointOnEigenvalue, "interval endpoint coincides with an eigenvalue");
  }
  const Eigen::Index n = eig.eigenvectors.rows();
  MatR P = MatR::Zero(n, n);
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double lam = eig.eigenvalues(i);
    if (lam > a && lam < b) P.noalias() += eig.interior_weight * eig.eigenvectors.col(i) * eig.eigenvectors.col(i).transpose();
  }
  return P;
}

}  // namespace dtnspec
