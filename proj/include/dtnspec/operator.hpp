// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseLU>

#include "dtnspec/domain.hpp"

namespace dtnspec {

/// Interior block of -Δ + q with homogeneous Dirichlet data on ∂Ω and the
/// truncation boundary, together with the boundary-injection map B.
/// (A_II - λ) u = B g is the discrete boundary value problem with u|∂Ω = g.
struct DirichletOperator {
  SpMatR A;  // n x n, exactly symmetric
  SpMatR B;  // n x nb, entries 1/h^2
  std::shared_ptr<const DiscreteDomain> domain;
  std::shared_ptr<const PotentialField> potential;
  double norm_inf = 0.0;   // max absolute row sum of A, bounds the spectral radius
  double gersh_lo = 0.0;   // Gershgorin enclosure of the spectrum
  double gersh_hi = 0.0;

  Eigen::Index size() const { return A.rows(); }
  Eigen::Index boundary_size() const { return B.cols(); }
  double h() const { return domain->h; }
  double interior_weight() const { return domain->interior_weight(); }
  VecR boundary_weights() const { return domain->boundary_weights(); }

  /// Average eigenvalue spacing over the Gershgorin interval.
  double mean_level_spacing() const {
    return (gersh_hi - gersh_lo) / static_cast<double>(std::max<Eigen::Index>(1, size()));
  }
};

inline DirichletOperator assemble_operator(std::shared_ptr<const DiscreteDomain> dom,
                                           std::shared_ptr<const PotentialField> q) {
  require(dom && q, ErrorKind::InvalidArgument, "domain and potential must be provided");
  const auto n = static_cast<Eigen::Index>(dom->interior_count());
  const auto nb = static_cast<Eigen::Index>(dom->boundary_count());
  require(q->interior.size() == n && q->boundary.size() == nb, ErrorKind::ShapeMismatch,
          "potential does not match the domain node counts");

  const double ih2 = 1.0 / (dom->h * dom->h);
  std::unordered_map<std::int64_t, int> interior_index, boundary_index;
  for (Eigen::Index i = 0; i < n; ++i)
    interior_index.emplace(detail::pack(dom->interior_nodes[static_cast<std::size_t>(i)]), static_cast<int>(i));
  for (Eigen::Index b = 0; b < nb; ++b)
    boundary_index.emplace(detail::pack(dom->dirichlet_boundary_nodes[static_cast<std::size_t>(b)]), static_cast<int>(b));

  std::vector<Eigen::Triplet<double>> a_entries, b_entries;
  a_entries.reserve(static_cast<std::size_t>(n) * (2 * dom->dimension + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& node = dom->interior_nodes[static_cast<std::size_t>(i)];
    a_entries.emplace_back(i, i, 2.0 * dom->dimension * ih2 + q->interior[i]);
    for (const auto& nb_node : detail::neighbours(node, dom->dimension)) {
      const auto key = detail::pack(nb_node);
      if (auto it = interior_index.find(key); it != interior_index.end())
        a_entries.emplace_back(i, it->second, -ih2);
      else if (auto jt = boundary_index.find(key); jt != boundary_index.end())
        b_entries.emplace_back(i, jt->second, ih2);
    }
  }

  DirichletOperator op;
  op.A.resize(n, n);
  op.A.setFromTriplets(a_entries.begin(), a_entries.end());
  op.A.makeCompressed();
  op.B.resize(n, nb);
  op.B.setFromTriplets(b_entries.begin(), b_entries.end());
  op.B.makeCompressed();
  op.domain = std::move(dom);
  op.potential = std::move(q);

  VecR diag = VecR::Zero(n), offsum = VecR::Zero(n);
  for (int k = 0; k < op.A.outerSize(); ++k)
    for (SpMatR::InnerIterator it(op.A, k); it; ++it) {
      if (it.row() == it.col()) diag[it.row()] = it.value();
      else offsum[it.row()] += std::abs(it.value());
    }
  op.gersh_lo = (diag - offsum).minCoeff();
  op.gersh_hi = (diag + offsum).maxCoeff();
  op.norm_inf = (diag.cwiseAbs() + offsum).maxCoeff();
  return op;
}

inline DirichletOperator assemble_operator(const DiscreteDomain& dom, const PotentialField& q) {
  return assemble_operator(std::make_shared<const DiscreteDomain>(dom), std::make_shared<const PotentialField>(q));
}

// Weighted pairings, linear in the first slot.
inline cplx interior_inner(const DirichletOperator& op, const VecC& u, const VecC& v) {
  return op.interior_weight() * v.dot(u);
}

inline cplx boundary_inner(const DirichletOperator& op, const VecC& f, const VecC& g) {
  const VecR w = op.boundary_weights();
  return w.cast<cplx>().cwiseProduct(g).dot(f);
}

inline double interior_norm(const DirichletOperator& op, const VecC& u) {
  return std::sqrt(op.interior_weight()) * u.norm();
}

inline double boundary_norm(const DirichletOperator& op, const VecC& g) {
  const VecR w = op.boundary_weights();
  return std::sqrt((w.array() * g.array().abs2()).sum());
}

/// Operator norm of a boundary map in the weighted space: ||W^{1/2} X W^{-1/2}||_2.
inline double boundary_operator_norm(const DirichletOperator& op, const MatC& X) {
  const VecR s = op.boundary_weights().cwiseSqrt();
  const MatC Y = s.cast<cplx>().asDiagonal() * X * s.cwiseInverse().cast<cplx>().asDiagonal();
  return Eigen::JacobiSVD<MatC>(Y).singularValues()(0);
}

/// Sparse LU of A - z, refactorised per shift with a fixed symbolic analysis.
/// A shift within 1e-10 ||A|| of the spectrum raises NearSpectrum; the check
/// estimates ||(A - z)^{-1}|| by power iteration on the factorisation only.
class ShiftedSolver {
 public:
  explicit ShiftedSolver(const DirichletOperator& op) : op_(&op) {
    shifted_ = op.A.cast<cplx>();
    shifted_.makeCompressed();
    for (Eigen::Index i = 0; i < shifted_.rows(); ++i) diag_ptr_.push_back(&shifted_.coeffRef(i, i));
    base_diag_ = op.A.diagonal();
    lu_.analyzePattern(shifted_);
  }

  ShiftedSolver(const ShiftedSolver&) = delete;
  ShiftedSolver& operator=(const ShiftedSolver&) = delete;

  /// Factorise A - z. With check = false the conditioning probe is skipped
  /// (used only where the caller brackets the spectrum itself).
  void factorize(cplx z, bool check = true) {
    z_ = z;
    for (std::size_t i = 0; i < diag_ptr_.size(); ++i) *diag_ptr_[i] = base_diag_[static_cast<Eigen::Index>(i)] - z;
    lu_.factorize(shifted_);
    ok_ = lu_.info() == Eigen::Success;
    if (check) {
      require(ok_, ErrorKind::NearSpectrum, "factorisation of A - z failed (z on the spectrum)");
      const double inv_norm = inverse_norm_estimate(2);
      require(std::isfinite(inv_norm) && inv_norm * op_->norm_inf <= 1e10, ErrorKind::NearSpectrum,
              "shift lies within 1e-10 ||A|| of the spectrum");
    }
  }

  bool ok() const { return ok_; }
  cplx shift() const { return z_; }

  template <class Rhs>
  auto solve(const Rhs& rhs) const {
    return lu_.solve(rhs.template cast<cplx>()).eval();
  }

  /// Power-iteration estimate of ||(A - z)^{-1}||_2 (exact in the limit since A - z is normal).
  double inverse_norm_estimate(int iterations) const {
    if (!ok_) return std::numeric_limits<double>::infinity();
    VecC v(shifted_.rows());
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
      VecC w = lu_.solve(v);
      est = w.norm();
      if (!std::isfinite(est) || est == 0.0) return std::numeric_limits<double>::infinity();
      v = w / est;
    }
    return est;
  }

  /// Distance from the shift to the spectrum, 1 / ||(A - z)^{-1}||; 0 if singular.
  double spectral_distance_estimate(int iterations = 8) const {
    const double s = inverse_norm_estimate(iterations);
    return std::isfinite(s) ? 1.0 / s : 0.0;
  }

 private:
  const DirichletOperator* op_;
  SpMatC shifted_;
  std::vector<cplx*> diag_ptr_;
  VecR base_diag_;
  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu_;
  cplx z_{0.0, 0.0};
  bool ok_ = false;
};

}  // namespace dtnspec
