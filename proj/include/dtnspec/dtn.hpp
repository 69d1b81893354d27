// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "dtnspec/operator.hpp"

namespace dtnspec {

/// γ(λ): columns are the solutions for the boundary basis vectors, (A - λ)Γ = B.
struct PoissonMatrix {
  cplx lambda;
  MatC gamma;  // n x nb
};

/// M(λ) on the weighted boundary space; convention: outward normal of Ω,
/// one-sided quotient (g_b - mean of inward neighbours)/h.
struct DtnMatrix {
  cplx lambda;
  MatC M;  // nb x nb
  static constexpr const char* convention = "outward-one-sided";
};

struct RobinMap {
  cplx lambda;
  MatC theta;
  MatC M_theta;
};

inline PoissonMatrix poisson_matrix(const ShiftedSolver& solver, const DirichletOperator& op) {
  return {solver.shift(), solver.solve(MatR(op.B))};
}

inline PoissonMatrix poisson_matrix(const DirichletOperator& op, cplx lambda) {
  ShiftedSolver solver(op);
  solver.factorize(lambda);
  return poisson_matrix(solver, op);
}

inline InteriorField poisson_solve(const DirichletOperator& op, cplx lambda, const BoundaryVector& g) {
  require(g.size() == op.boundary_size(), ErrorKind::ShapeMismatch, "boundary data has the wrong length");
  ShiftedSolver solver(op);
  solver.factorize(lambda);
  const VecC rhs = op.B.cast<cplx>() * g;
  return solver.solve(rhs);
}

/// Column-wise outward normal derivative of the fields whose ∂Ω values are G
/// and interior values are U.
inline MatC normal_derivative(const DiscreteDomain& dom, const MatC& G, const MatC& U) {
  require(G.rows() == static_cast<Eigen::Index>(dom.boundary_count()) &&
              U.rows() == static_cast<Eigen::Index>(dom.interior_count()) && G.cols() == U.cols(),
          ErrorKind::ShapeMismatch, "normal_derivative: shapes do not match the domain");
  MatC out(G.rows(), G.cols());
  for (Eigen::Index b = 0; b < G.rows(); ++b) {
    const auto& inward = dom.boundary_adjacency[static_cast<std::size_t>(b)];
    const double inv = 1.0 / static_cast<double>(inward.size());
    for (Eigen::Index c = 0; c < G.cols(); ++c) {
      cplx mean = 0.0;
      for (int n : inward) mean += U(n, c);
      out(b, c) = (G(b, c) - inv * mean) / dom.h;
    }
  }
  return out;
}

inline BoundaryVector normal_derivative(const DiscreteDomain& dom, const BoundaryVector& g, const InteriorField& u) {
  return normal_derivative(dom, MatC(g), MatC(u)).col(0);
}

inline DtnMatrix dtn_matrix(const ShiftedSolver& solver, const DirichletOperator& op) {
  const PoissonMatrix P = poisson_matrix(solver, op);
  const auto nb = op.boundary_size();
  return {solver.shift(), normal_derivative(*op.domain, MatC::Identity(nb, nb), P.gamma)};
}

inline DtnMatrix dtn_matrix(const DirichletOperator& op, cplx lambda) {
  ShiftedSolver solver(op);
  solver.factorize(lambda);
  return dtn_matrix(solver, op);
}

/// γ(λ)* U = -∂_ν((A - conj λ)^{-1} U) for a block of interior fields U;
/// `conj_solver` must be factorised at conj(λ).
inline MatC gamma_adjoint_apply(const ShiftedSolver& conj_solver, const DirichletOperator& op, const MatC& U) {
  const MatC V = conj_solver.solve(U);
  return -normal_derivative(*op.domain, MatC::Zero(op.boundary_size(), U.cols()), V);
}

/// The full map γ(λ)*: InteriorField -> BoundaryVector as an nb x n matrix.
inline MatC gamma_adjoint(const DirichletOperator& op, cplx lambda) {
  ShiftedSolver conj_solver(op);
  conj_solver.factorize(std::conj(lambda));
  return gamma_adjoint_apply(conj_solver, op, MatC::Identity(op.size(), op.size()));
}

/// Adjoint of a boundary map in the weighted boundary space: W^{-1} X^H W.
inline MatC boundary_adjoint(const DirichletOperator& op, const MatC& X) {
  const VecC w = op.boundary_weights().cast<cplx>();
  return w.cwiseInverse().asDiagonal() * X.adjoint() * w.asDiagonal();
}

inline double relative_residual(const MatC& lhs, const MatC& rhs) {
  const double scale = std::max({lhs.norm(), rhs.norm(), 1e-300});
  return (lhs - rhs).norm() / scale;
}

struct IdentityReport {
  double resolvent_poisson = 0.0;  // γ(λ) = (I + (λ-ζ)(A-λ)^{-1}) γ(ζ)
  double gamma_product = 0.0;      // (conj ζ - λ) γ(ζ)* γ(λ) = M(λ) - M(ζ)*
  double three_point = 0.0;        // γ(ζ)*(A-λ)^{-1}γ(ν) partial fractions
  double weyl = 0.0;               // Weyl representation of M(λ) around ζ
  double conjugate_symmetry = 0.0; // M(conj λ) = M(λ)*
  double sign_law = 0.0;           // Im(Mg,g) = -Im λ ||γ g||^2, worst over the boundary basis

  double worst() const {
    return std::max({resolvent_poisson, gamma_product, three_point, weyl, conjugate_symmetry, sign_law});
  }
};

/// Residuals of the resolvent/Weyl identities for the discrete boundary triple.
/// The three-point identity is evaluated at z = λ.
inline IdentityReport identity_suite(const DirichletOperator& op, cplx lambda, cplx zeta, cplx nu) {
  const double scale = std::max(1.0, op.norm_inf);
  const double sep = 1e-12 * scale;
  require(std::abs(nu - std::conj(zeta)) > sep, ErrorKind::DegenerateParameters, "nu must differ from conj(zeta)");
  require(std::abs(lambda - nu) > sep, ErrorKind::DegenerateParameters, "lambda must differ from nu");
  require(std::abs(lambda - std::conj(zeta)) > sep, ErrorKind::DegenerateParameters,
          "lambda must differ from conj(zeta)");

  ShiftedSolver s_lambda(op), s_lambda_bar(op), s_zeta(op), s_zeta_bar(op), s_nu(op);
  s_lambda.factorize(lambda);
  s_lambda_bar.factorize(std::conj(lambda));
  s_zeta.factorize(zeta);
  s_zeta_bar.factorize(std::conj(zeta));
  s_nu.factorize(nu);

  const MatC g_lambda = poisson_matrix(s_lambda, op).gamma;
  const MatC g_zeta = poisson_matrix(s_zeta, op).gamma;
  const MatC g_nu = poisson_matrix(s_nu, op).gamma;
  const MatC M_lambda = dtn_matrix(s_lambda, op).M;
  const MatC M_lambda_bar = dtn_matrix(s_lambda_bar, op).M;
  const MatC M_zeta = dtn_matrix(s_zeta, op).M;
  const MatC M_zeta_bar = dtn_matrix(s_zeta_bar, op).M;
  const MatC M_nu = dtn_matrix(s_nu, op).M;
  const MatC M_zeta_adj = boundary_adjoint(op, M_zeta);

  IdentityReport rep;

  rep.resolvent_poisson = relative_residual(g_lambda, g_zeta + (lambda - zeta) * s_lambda.solve(g_zeta));

  const MatC gz_star_gl = gamma_adjoint_apply(s_zeta_bar, op, g_lambda);
  rep.gamma_product = relative_residual((std::conj(zeta) - lambda) * gz_star_gl, M_lambda - M_zeta_adj);

  const cplx zb = std::conj(zeta);
  const MatC lhs3 = gamma_adjoint_apply(s_zeta_bar, op, s_lambda.solve(g_nu));
  const MatC rhs3 = M_lambda / ((lambda - nu) * (zb - lambda)) + M_zeta_bar / ((lambda - zb) * (zb - nu)) -
                    M_nu / ((lambda - nu) * (zb - nu));
  rep.three_point = relative_residual(lhs3, rhs3);

  const MatC re_M_zeta = 0.5 * (M_zeta + M_zeta_adj);
  const MatC inner = (lambda - zeta.real()) * g_zeta + (lambda - zeta) * (lambda - zb) * s_lambda.solve(g_zeta);
  rep.weyl = relative_residual(M_lambda, re_M_zeta - gamma_adjoint_apply(s_zeta_bar, op, inner));

  rep.conjugate_symmetry = relative_residual(M_lambda_bar, boundary_adjoint(op, M_lambda));

  const VecR w = op.boundary_weights();
  for (Eigen::Index j = 0; j < op.boundary_size(); ++j) {
    // (M e_j, e_j)_W = w_j M_jj; ||γ e_j||^2 = h^d ||Γ e_j||^2.
    const double im_form = w[j] * M_lambda(j, j).imag();
    const double rhs = -lambda.imag() * op.interior_weight() * g_lambda.col(j).squaredNorm();
    const double denom = std::max({std::abs(im_form), std::abs(rhs), 1e-300});
    rep.sign_law = std::max(rep.sign_law, std::abs(im_form - rhs) / denom);
  }
  return rep;
}

/// Robin-to-Dirichlet map (Θ - M(λ))^{-1}; Θ must be real and selfadjoint in the weighted boundary space.
inline RobinMap robin_to_dirichlet(const DirichletOperator& op, cplx lambda, const MatR& theta) {
  const auto nb = op.boundary_size();
  require(theta.rows() == nb && theta.cols() == nb, ErrorKind::ShapeMismatch, "Θ has the wrong shape");
  const VecR w = op.boundary_weights();
  const MatR wt = w.asDiagonal() * theta;
  require((wt - wt.transpose()).norm() <= 1e-12 * std::max(1.0, wt.norm()), ErrorKind::InvalidArgument,
          "Θ must be selfadjoint in the weighted boundary space");

  const MatC M = dtn_matrix(op, lambda).M;
  const MatC pencil = theta.cast<cplx>() - M;
  Eigen::JacobiSVD<MatC> svd(pencil);
  const auto& sv = svd.singularValues();
  const double scale = std::max({sv(0), theta.norm(), M.norm()});
  const double smin = sv(sv.size() - 1);
  require(scale > 0.0 && smin > 1e-12 * scale, ErrorKind::SingularRobinPencil,
          "Θ - M(λ) is singular or has condition number above 1e12");
  return {lambda, theta.cast<cplx>(), pencil.fullPivLu().inverse()};
}

}  // namespace dtnspec
