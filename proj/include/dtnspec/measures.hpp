// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dtnspec/classify.hpp"
#include "dtnspec/oracle.hpp"
#include "dtnspec/quadrature.hpp"

namespace dtnspec {

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// Purely atomic measure; locations strictly increasing.
struct SpectralMeasure {
  std::vector<Atom> atoms;
  std::string provenance;

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.weight;
    return m;
  }
};

inline SpectralMeasure spectral_measure(const EigenSystem& eig, const InteriorField& u) {
  require(u.size() == eig.eigenvectors.rows(), ErrorKind::ShapeMismatch, "u does not match the eigensystem");
  SpectralMeasure mu;
  mu.provenance = "oracle eigensystem";
  const VecC coef = eig.interior_weight * (eig.eigenvectors.transpose().cast<cplx>() * u);
  const double total = coef.squaredNorm();
  for (std::size_t k = 0; k < eig.groups.size(); ++k) {
    const auto [first, last] = eig.groups[k];
    const double weight = coef.segment(first, last - first).squaredNorm();
    if (weight > 1e-15 * total) mu.atoms.push_back({eig.group_value(k), weight});
  }
  return mu;
}

struct BorelSample {
  cplx lambda;
  cplx F;
};

inline BorelSample borel_transform(const SpectralMeasure& mu, cplx lambda) {
  cplx F = 0.0;
  for (const auto& a : mu.atoms) {
    const cplx d = a.location - lambda;
    require(std::abs(d) > 1e-14 * std::max(1.0, std::abs(a.location)), ErrorKind::AtomHit,
            "λ coincides with the atom at " + std::to_string(a.location));
    F += a.weight / d;
  }
  return {lambda, F};
}

/// μ({x}) = -i lim y F(x + iy), extrapolated over the schedule.
inline LimitEstimate<double> point_mass(const SpectralMeasure& mu, double x, const EtaSchedule& sched) {
  LimitEstimate<double> est;
  est.etas = sched.samples();
  std::vector<cplx> yF;
  for (double y : est.etas) yF.push_back(y * borel_transform(mu, cplx(x, y)).F);
  const auto ex = richardson(est.etas, yF);
  est.value = (cplx(0.0, -1.0) * ex.value).real();
  est.error = ex.error;
  for (const auto& v : yF) est.samples.push_back((cplx(0.0, -1.0) * v).real());
  est.tolerance = 1e-10 * std::max(mu.total_mass(), 1e-300);
  est.converged = est.error <= est.tolerance;
  return est;
}

// ---------------------------------------------------------------------------
// Stone's formula

struct StoneOptions {
  double delta_fraction = 0.1;  // δ₀ = fraction x (distance from the endpoints to the spectrum)
  double ratio = 0.5;
  int count = 5;
  double abs_tol = 1e-8;
  int max_intervals = 4000;
};

struct StoneResult {
  MatR projection;
  double gap = 0.0;
  std::vector<double> deltas;
  double extrapolation_error = 0.0;
  int evaluations = 0;
};

namespace detail {

/// Im (T - z)^{-1} / π for a real symmetric tridiagonal T. With top-down
/// pivots u and bottom-up pivots r of T - z, X_ii = 1/(u_i + r_i - (a_i - z))
/// and X_ij = X_i,j-1 (-b_j-1 / r_j) for j > i. Im z > 0 keeps all pivots nonzero.
inline MatR tridiagonal_stone_kernel(const VecR& diag, const VecR& sub, cplx z) {
  const Eigen::Index n = diag.size();
  VecC u(n), r(n), f(n);
  u[0] = diag[0] - z;
  for (Eigen::Index i = 1; i < n; ++i) u[i] = diag[i] - z - sub[i - 1] * sub[i - 1] / u[i - 1];
  r[n - 1] = diag[n - 1] - z;
  for (Eigen::Index i = n - 2; i >= 0; --i) r[i] = diag[i] - z - sub[i] * sub[i] / r[i + 1];
  for (Eigen::Index j = 1; j < n; ++j) f[j] = -sub[j - 1] / r[j];
  MatR out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cplx x = 1.0 / (u[i] + r[i] - (diag[i] - z));
    out(i, i) = x.imag();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      x *= f[j];
      out(j, i) = x.imag();
    }
  }
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out / std::numbers::pi;
}

}  // namespace detail

/// E((a,b)) from (1/π) ∫_a^b Im (A - t - iδ)^{-1} dt, extrapolated to δ = 0.
/// The integrand is evaluated after one Householder reduction A = Q T Qᵀ.
inline StoneResult stone_projection(const DirichletOperator& op, double a, double b, const StoneOptions& opt = {}) {
  require(a < b, ErrorKind::InvalidArgument, "Stone interval must satisfy a < b");
  ShiftedSolver probe(op);
  double gap = std::numeric_limits<double>::infinity();
  for (double e : {a, b}) {
    probe.factorize(cplx(e, 0.0), false);
    const double d = probe.spectral_distance_estimate(60);
    require(d > 1e-8 * std::max(1.0, op.norm_inf), ErrorKind::EndpointOnEigenvalue,
            "endpoint " + std::to_string(e) + " lies on an eigenvalue");
    gap = std::min(gap, d);
  }
  StoneResult res;
  res.gap = gap;
  Eigen::Tridiagonalization<MatR> tri(MatR(op.A));
  const VecR diag = tri.diagonal();
  const VecR sub = tri.subDiagonal();
  const MatR Q = tri.matrixQ();
  std::vector<MatR> values;
  for (int k = 0; k < opt.count; ++k) {
    const double delta = opt.delta_fraction * gap * std::pow(opt.ratio, k);
    res.deltas.push_back(delta);
    auto integrand = [&](double t) -> MatR { return detail::tridiagonal_stone_kernel(diag, sub, cplx(t, delta)); };
    auto q = integrate_gk15<MatR>(integrand, a, b, opt.abs_tol, 16, opt.max_intervals);
    res.evaluations += q.evaluations;
    values.push_back(std::move(q.value));
  }
  const auto ex = richardson(res.deltas, values);
  const MatR P = Q * ex.value * Q.transpose();
  res.projection = 0.5 * (P + P.transpose());
  res.extrapolation_error = ex.error;
  return res;
}

// ---------------------------------------------------------------------------
// Lebesgue decomposition supports of a measure

struct MeasureScreenOptions {
  EtaSchedule schedule;
  bool continuum = false;  // no per-point cap on η (density emulated by atoms)
  double tau_ac = 1e-6;
  double tau_zero = 1e-6;
  double divergence_ratio = 1e3;
};

struct DecompositionReport {
  std::vector<double> grid;
  std::vector<double> im_boundary;  // extrapolated Im F(x + i0)
  std::vector<bool> diverges;
  std::vector<bool> y_vanishes;
  GridSet ac_raw;
  GridSet ac_support;  // essential closure
  GridSet sc_support;  // {Im F = ∞, yF -> 0}
};

inline DecompositionReport ac_sc_supports(const SpectralMeasure& mu, const MeasureScreenOptions& opt,
                                          const std::vector<double>& grid) {
  DecompositionReport rep;
  rep.grid = grid;
  std::vector<bool> ac_flags, sc_flags;
  const double mass = std::max(mu.total_mass(), 1e-300);
  for (double x : grid) {
    EtaSchedule sched = opt.schedule;
    if (!opt.continuum && !mu.atoms.empty()) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& a : mu.atoms) d = std::min(d, std::abs(a.location - x));
      if (d > 1e-12 * std::max(1.0, std::abs(x))) sched.eta0 = std::min(sched.eta0, 0.25 * d);
    }
    const auto ys = sched.samples();
    std::vector<cplx> F, yF;
    for (double y : ys) {
      F.push_back(borel_transform(mu, cplx(x, y)).F);
      yF.push_back(y * F.back());
    }
    const auto exF = richardson(ys, F);
    const auto exyF = richardson(ys, yF);
    const double D = std::min(opt.divergence_ratio, 0.5 * ys.front() / ys.back());
    const bool div = std::abs(F.back().imag()) > D * std::abs(F.front().imag());
    const bool yzero = std::abs(exyF.value) <= opt.tau_zero * mass;
    const double im = exF.value.imag();
    rep.im_boundary.push_back(im);
    rep.diverges.push_back(div);
    rep.y_vanishes.push_back(yzero);
    ac_flags.push_back(!div && im > opt.tau_ac * std::max(std::abs(exF.value), 1e-300));
    sc_flags.push_back(div && yzero);
  }
  rep.ac_raw = GridSet::from_flags(grid, ac_flags);
  rep.ac_support = essential_closure(rep.ac_raw);
  rep.sc_support = GridSet::from_flags(grid, sc_flags);
  return rep;
}

/// Density-1 measure on [lo, hi] realised by n equal atoms at cell midpoints.
inline SpectralMeasure uniform_density_atoms(double lo, double hi, int n) {
  SpectralMeasure mu;
  mu.provenance = "midpoint quadrature of a unit density";
  const double h = (hi - lo) / n;
  for (int k = 0; k < n; ++k) mu.atoms.push_back({lo + (k + 0.5) * h, h});
  return mu;
}

inline SpectralMeasure superpose(const SpectralMeasure& a, const SpectralMeasure& b) {
  SpectralMeasure mu;
  mu.provenance = a.provenance + " + " + b.provenance;
  mu.atoms = a.atoms;
  mu.atoms.insert(mu.atoms.end(), b.atoms.begin(), b.atoms.end());
  std::sort(mu.atoms.begin(), mu.atoms.end(), [](const Atom& p, const Atom& q) { return p.location < q.location; });
  return mu;
}

// ---------------------------------------------------------------------------
// Simplicity: span of the solution spaces

struct SimplicityResult {
  int rank = 0;
  int dimension = 0;
  VecR singular_values;
};

inline SimplicityResult simplicity_rank(const DirichletOperator& op, const std::vector<cplx>& zetas, const MatC& G) {
  require(std::any_of(zetas.begin(), zetas.end(), [](cplx z) { return z.imag() != 0.0; }),
          ErrorKind::InvalidArgument, "simplicity test needs a non-real sample");
  require(G.rows() == op.boundary_size(), ErrorKind::ShapeMismatch, "probe block has the wrong row count");
  MatC stacked(op.size(), static_cast<Eigen::Index>(zetas.size()) * G.cols());
  ShiftedSolver solver(op);
  const MatC BG = op.B.cast<cplx>() * G;
  for (std::size_t j = 0; j < zetas.size(); ++j) {
    solver.factorize(zetas[j]);
    stacked.middleCols(static_cast<Eigen::Index>(j) * G.cols(), G.cols()) = solver.solve(BG);
  }
  SimplicityResult out;
  out.dimension = static_cast<int>(op.size());
  out.singular_values = Eigen::BDCSVD<MatC>(stacked).singularValues();
  const double top = out.singular_values.size() ? out.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > 1e-10 * top) ++out.rank;
  return out;
}

}  // namespace dtnspec
