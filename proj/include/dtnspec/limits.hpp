// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dtnspec/dtn.hpp"
#include "dtnspec/extrapolation.hpp"

namespace dtnspec {

/// Geometric sequence η_k = η₀ r^k, k < K.
struct EtaSchedule {
  double eta0 = 0.1;
  double ratio = 0.5;
  int count = 8;

  void validate() const {
    require(eta0 > 0.0 && std::isfinite(eta0), ErrorKind::InvalidArgument, "eta0 must be positive");
    require(ratio > 0.0 && ratio < 1.0, ErrorKind::InvalidArgument, "eta ratio must lie in (0,1)");
    require(count >= 3, ErrorKind::InvalidArgument, "eta schedule needs at least 3 samples");
  }

  std::vector<double> samples() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = eta0 * std::pow(ratio, k);
    return out;
  }

  double smallest() const { return eta0 * std::pow(ratio, count - 1); }

  /// Ends at `floor` after `count` samples.
  static EtaSchedule ending_at(double floor, double ratio, int count) {
    return {floor / std::pow(ratio, count - 1), ratio, count};
  }
};

template <class T>
struct LimitEstimate {
  T value{};
  double error = 0.0;
  std::vector<double> etas;
  std::vector<T> samples;
  bool converged = false;
  double tolerance = 0.0;
  /// Imaginary part blows up like 1/η (only set by boundary-value estimates).
  bool diverges = false;
};

/// How schedules are chosen and judged. With eta_floor > 0 the model is
/// treated as an emulated continuum: η never goes below the floor.
struct LimitPolicy {
  double eta0 = 0.0;  // <= 0: 0.1 x mean level spacing
  double ratio = 0.5;
  int count = 8;
  double eta_floor = 0.0;
  double floor_ratio = 0.7;
  int floor_count = 4;
  double tolerance = 1e-8;  // relative, on the extrapolation error
  int retries = 4;
  double divergence_ratio = 1e3;

  bool continuum() const { return eta_floor > 0.0; }
};

/// M(z) G for a block of boundary data, from one factorisation at z.
inline MatC sample_MG(const ShiftedSolver& solver, const DirichletOperator& op, const MatC& G) {
  const MatC U = solver.solve(MatC(op.B.cast<cplx>() * G));
  return normal_derivative(*op.domain, G, U);
}

/// (f, g)_W column by column.
inline VecC boundary_forms(const DirichletOperator& op, const MatC& F, const MatC& G) {
  VecC out(F.cols());
  for (Eigen::Index j = 0; j < F.cols(); ++j) out[j] = boundary_inner(op, F.col(j), G.col(j));
  return out;
}

/// M(x + iη_k) G at every sample of the schedule.
struct PointSamples {
  double x = 0.0;
  std::vector<double> etas;
  std::vector<MatC> MG;
};

inline PointSamples sample_point(const DirichletOperator& op, double x, const MatC& G, const EtaSchedule& sched) {
  require(G.rows() == op.boundary_size(), ErrorKind::ShapeMismatch, "probe block has the wrong row count");
  PointSamples ps;
  ps.x = x;
  ps.etas = sched.samples();
  ShiftedSolver solver(op);
  for (double eta : ps.etas) {
    try {
      solver.factorize(cplx(x, eta));
    } catch (const Error& e) {
      throw Error(ErrorKind::NearSpectrum, "x=" + std::to_string(x) + " eta=" + std::to_string(eta) + " after " +
                                               std::to_string(ps.MG.size()) + " samples: " + e.what());
    }
    ps.MG.push_back(sample_MG(solver, op, G));
  }
  return ps;
}

inline LimitEstimate<VecC> slim_from(const PointSamples& ps, Eigen::Index probe, double rel_tol) {
  LimitEstimate<VecC> est;
  est.etas = ps.etas;
  double scale = 0.0;
  for (std::size_t k = 0; k < ps.etas.size(); ++k) {
    est.samples.push_back(ps.etas[k] * ps.MG[k].col(probe));
    scale = std::max(scale, est.samples.back().norm());
  }
  const auto ex = richardson(est.etas, est.samples);
  est.value = ex.value;
  est.error = ex.error;
  est.tolerance = rel_tol * std::max(scale, 1e-300);
  est.converged = est.error <= est.tolerance;
  return est;
}

inline LimitEstimate<cplx> boundary_from(const DirichletOperator& op, const PointSamples& ps, const MatC& G,
                                         Eigen::Index probe, double rel_tol, double divergence_ratio) {
  LimitEstimate<cplx> est;
  est.etas = ps.etas;
  double scale = 0.0;
  for (std::size_t k = 0; k < ps.etas.size(); ++k) {
    est.samples.push_back(boundary_inner(op, ps.MG[k].col(probe), G.col(probe)));
    scale = std::max(scale, std::abs(est.samples.back()));
  }
  const auto ex = richardson(est.etas, est.samples);
  est.value = ex.value;
  est.error = ex.error;
  est.tolerance = rel_tol * std::max(scale, 1e-300);
  est.converged = est.error <= est.tolerance;
  // A 1/η law can only grow by η₀/η_min over the schedule; demand half of that.
  const double span = est.etas.front() / est.etas.back();
  const double D = std::min(divergence_ratio, 0.5 * span);
  const double im_first = std::abs(est.samples.front().imag());
  const double im_last = std::abs(est.samples.back().imag());
  est.diverges = im_last > D * im_first && im_last > 0.0;
  return est;
}

inline LimitEstimate<VecC> slim_eta_M(const DirichletOperator& op, double x, const BoundaryVector& g,
                                      const EtaSchedule& sched, double rel_tol = 1e-8) {
  const MatC G = g;
  return slim_from(sample_point(op, x, G, sched), 0, rel_tol);
}

inline LimitEstimate<cplx> boundary_value_M(const DirichletOperator& op, double x, const BoundaryVector& g,
                                            const EtaSchedule& sched, double rel_tol = 1e-8,
                                            double divergence_ratio = 1e3) {
  const MatC G = g;
  return boundary_from(op, sample_point(op, x, G, sched), G, 0, rel_tol, divergence_ratio);
}

/// Both limits at x for every probe, using the schedule the policy selects.
struct PointLimits {
  EtaSchedule schedule;
  PointSamples samples;
  std::vector<LimitEstimate<VecC>> slim;
  std::vector<LimitEstimate<cplx>> boundary;
  double spectral_distance = 0.0;

  bool converged() const {
    for (std::size_t j = 0; j < slim.size(); ++j) {
      if (!slim[j].converged) return false;
      if (!boundary[j].converged && !boundary[j].diverges) return false;
    }
    return true;
  }
};

inline bool on_spectrum(const DirichletOperator& op, double distance) {
  return distance <= 1e-9 * std::max(1.0, op.norm_inf);
}

inline PointLimits evaluate_point(const DirichletOperator& op, double x, const MatC& G, const LimitPolicy& policy) {
  PointLimits pl;
  EtaSchedule sched;
  int attempts = 1;
  const double tol = policy.continuum() ? std::max(policy.tolerance, 5e-2) : policy.tolerance;
  if (policy.continuum()) {
    sched = EtaSchedule::ending_at(policy.eta_floor, policy.floor_ratio, policy.floor_count);
  } else {
    ShiftedSolver probe(op);
    probe.factorize(cplx(x, 0.0), false);
    pl.spectral_distance = probe.spectral_distance_estimate();
    double eta0 = policy.eta0 > 0.0 ? policy.eta0 : 0.1 * op.mean_level_spacing();
    // Off the spectrum the η-series converges only for η below the distance to it.
    if (!on_spectrum(op, pl.spectral_distance)) eta0 = std::min(eta0, 0.25 * pl.spectral_distance);
    sched = {eta0, policy.ratio, policy.count};
    attempts += std::max(0, policy.retries);
  }
  for (int a = 0; a < attempts; ++a) {
    pl.schedule = sched;
    pl.samples = sample_point(op, x, G, sched);
    pl.slim.clear();
    pl.boundary.clear();
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      pl.slim.push_back(slim_from(pl.samples, j, tol));
      pl.boundary.push_back(boundary_from(op, pl.samples, G, j, tol, policy.divergence_ratio));
    }
    if (pl.converged()) break;
    sched.eta0 /= 16.0;
  }
  return pl;
}

struct ResidueMatrix {
  double lambda0 = 0.0;
  double radius = 0.0;
  MatC R;        // (1/2πi)∮ M dz
  MatC moment;   // (1/2πi)∮ (z - λ₀) M dz
  int nodes = 0;
};

/// Trapezoid rule on |z - λ₀| = ρ with nodes offset by half a step from the real axis.
inline ResidueMatrix residue_contour(const DirichletOperator& op, double lambda0, double radius, int n = 64) {
  require(radius > 0.0, ErrorKind::InvalidArgument, "contour radius must be positive");
  require(n >= 16 && n % 2 == 0, ErrorKind::InvalidArgument, "contour needs an even node count >= 16");
  const auto nb = op.boundary_size();
  const MatC I = MatC::Identity(nb, nb);
  ResidueMatrix res{lambda0, radius, MatC::Zero(nb, nb), MatC::Zero(nb, nb), n};
  ShiftedSolver solver(op);
  for (int j = 0; j < n; ++j) {
    const double theta = 2.0 * std::numbers::pi * (j + 0.5) / n;
    const cplx dz = radius * std::polar(1.0, theta);
    try {
      solver.factorize(lambda0 + dz);
    } catch (const Error&) {
      throw Error(ErrorKind::ContourTouchesSpectrum,
                  "contour node " + std::to_string(j) + " of |z-" + std::to_string(lambda0) + "|=" +
                      std::to_string(radius) + " is on the spectrum");
    }
    const MatC M = sample_MG(solver, op, I);
    res.R += dz * M;
    res.moment += dz * dz * M;
  }
  res.R /= static_cast<double>(n);
  res.moment /= static_cast<double>(n);
  return res;
}

/// W^{1/2} X W^{-1/2}, Hermitian whenever X is selfadjoint in the weighted space.
inline MatC symmetrized(const DirichletOperator& op, const MatC& X) {
  const VecR s = op.boundary_weights().cwiseSqrt();
  const MatC Y = s.cast<cplx>().asDiagonal() * X * s.cwiseInverse().cast<cplx>().asDiagonal();
  return 0.5 * (Y + Y.adjoint());
}

/// Numerical rank of a residue: eigenvalues of its Hermitian form above rel_tol x max(|ev|, abs_floor).
inline int residue_rank(const DirichletOperator& op, const MatC& R, double rel_tol = 1e-6, double abs_floor = 0.0) {
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrized(op, R));
  const VecR ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), abs_floor);
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > rel_tol * top && top > 0.0) ++rank;
  return rank;
}

/// Orthonormal (weighted) basis of the range of a residue.
inline MatC residue_range(const DirichletOperator& op, const MatC& R, int rank) {
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrized(op, R));
  const VecR s = op.boundary_weights().cwiseSqrt();
  const MatC top = es.eigenvectors().rightCols(rank);
  return s.cwiseInverse().cast<cplx>().asDiagonal() * top;
}

/// Pole of M near x found by Newton's method on 1/(Mg,g) along the real axis.
/// (Mg,g)' = -||γ g||² comes from the same solve. Returns the first converged
/// real pole within `reach` of x over all probes and starts.
inline std::optional<double> find_pole(const DirichletOperator& op, double x, double reach, const MatC& G,
                                       const std::vector<double>& starts) {
  const double scale = std::max(1.0, std::abs(x) + reach);
  ShiftedSolver solver(op);
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    const VecC g = G.col(j);
    const VecC Bg = op.B.cast<cplx>() * g;
    for (double start : starts) {
      double z = start;
      for (int it = 0; it < 80; ++it) {
        try {
          solver.factorize(cplx(z, 0.0));
        } catch (const Error&) {
          return z;  // singular at z: z is on the spectrum
        }
        const VecC u = solver.solve(Bg);
        const cplx f = boundary_inner(op, normal_derivative(*op.domain, g, u), g);
        const double fp = -op.interior_weight() * u.squaredNorm();
        if (fp == 0.0 || !std::isfinite(f.real())) break;
        const double step = f.real() / fp;
        z += step;
        if (!std::isfinite(z) || std::abs(z - x) > reach) break;
        if (std::abs(step) <= 1e-14 * scale) {
          ShiftedSolver check(op);
          check.factorize(cplx(z, 0.0), false);
          if (check.spectral_distance_estimate(30) <= 1e-7 * scale) return z;
          break;
        }
      }
    }
  }
  return std::nullopt;
}

/// Residue at a pole estimate: the radius is halved until R(ρ) and R(ρ/2)
/// agree to 1e-8, and the centre is corrected by the first moment.
struct PoleResidue {
  double lambda = 0.0;
  ResidueMatrix residue;
  double radius_change = 0.0;
};

inline PoleResidue refine_pole(const DirichletOperator& op, double lambda, double radius, int n = 64) {
  double rho = radius;
  for (int attempt = 0; attempt < 30; ++attempt, rho *= 0.5) {
    ResidueMatrix outer, inner;
    try {
      outer = residue_contour(op, lambda, rho, n);
      inner = residue_contour(op, lambda, 0.5 * rho, n);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ContourTouchesSpectrum) continue;
      throw;
    }
    const double change = (outer.R - inner.R).norm() / std::max(inner.R.norm(), 1e-300);
    if (change > 1e-8) continue;
    const VecC w = op.boundary_weights().cast<cplx>();
    const cplx t0 = (w.asDiagonal() * inner.R).trace();
    const cplx t1 = (w.asDiagonal() * inner.moment).trace();
    PoleResidue pr;
    pr.lambda = lambda + (std::abs(t0) > 0.0 ? (t1 / t0).real() : 0.0);
    pr.residue = inner;
    pr.radius_change = change;
    return pr;
  }
  throw Error(ErrorKind::Inconclusive, "no contour radius around " + std::to_string(lambda) + " gave a stable residue");
}

/// Effective thresholds; continuum emulation cannot resolve below its floor accuracy.
struct Thresholds {
  double tau_eig = 1e-6;
  double tau_ac = 1e-6;
  double null_fraction = 0.01;
  double tolerance = 1e-8;

  Thresholds effective(bool continuum) const {
    if (!continuum) return *this;
    Thresholds t = *this;
    t.tau_eig = std::max(t.tau_eig, 1e-2);
    t.tau_ac = std::max(t.tau_ac, 1e-2);
    t.tolerance = std::max(t.tolerance, 5e-2);
    return t;
  }
};

struct AnalyticityEvidence {
  bool analytic = false;
  bool slim_null = true;
  bool imag_null = true;
  bool fit_ok = false;
  double fit_misfit = 0.0;
  bool converged = true;
  std::string note;
};

namespace detail {

/// Relative max misfit of a least-squares Chebyshev fit of degree `degree`
/// to samples at `points` first-kind nodes on [lo, hi].
template <class Eval>
double chebyshev_misfit(double lo, double hi, int points, int degree, Eval&& eval) {
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  MatR V(points, degree + 1);
  std::vector<MatC> values;
  for (int k = 0; k < points; ++k) {
    const double s = std::cos(std::numbers::pi * (k + 0.5) / points);
    V(k, 0) = 1.0;
    if (degree >= 1) V(k, 1) = s;
    for (int d = 2; d <= degree; ++d) V(k, d) = 2.0 * s * V(k, d - 1) - V(k, d - 2);
    values.push_back(eval(c + r * s));
  }
  const auto rows = values.front().rows(), cols = values.front().cols();
  MatC Y(points, rows * cols);
  for (int k = 0; k < points; ++k) Y.row(k) = values[static_cast<std::size_t>(k)].reshaped().transpose();
  const MatC coeffs = V.cast<cplx>().colPivHouseholderQr().solve(Y);
  const MatC resid = V.cast<cplx>() * coeffs - Y;
  double worst = 0.0, top = 0.0;
  for (int k = 0; k < points; ++k) {
    worst = std::max(worst, resid.row(k).norm());
    top = std::max(top, Y.row(k).norm());
  }
  return top > 0.0 ? worst / top : 0.0;
}

}  // namespace detail

/// Analytic continuation test on (x - w, x + w): vanishing s-limits,
/// real boundary values and a low-degree polynomial fit of M.
inline AnalyticityEvidence analyticity_test(const DirichletOperator& op, double x, double w, const MatC& G,
                                            const LimitPolicy& policy, const Thresholds& th) {
  require(w > 0.0, ErrorKind::InvalidArgument, "window half-width must be positive");
  const Thresholds t = th.effective(policy.continuum());
  AnalyticityEvidence ev;
  // Centre first; stop at the first failed condition.
  for (double s : {0.0, -1.0, 1.0, -0.5, 0.5}) {
    if (!ev.slim_null || !ev.imag_null) break;
    const double xs = x + s * w;
    PointLimits pl;
    try {
      pl = evaluate_point(op, xs, G, policy);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NearSpectrum) throw;
      ev.slim_null = false;
      ev.note = "near spectrum at " + std::to_string(xs);
      continue;
    }
    ev.converged = ev.converged && pl.converged();
    for (std::size_t j = 0; j < pl.slim.size(); ++j) {
      const double ref = pl.samples.MG.front().col(static_cast<Eigen::Index>(j)).norm();
      if (pl.slim[j].value.norm() > t.tau_eig * ref) ev.slim_null = false;
      const cplx b = pl.boundary[j].value;
      if (pl.boundary[j].diverges || std::abs(b.imag()) > t.tau_ac * std::max(std::abs(b), 1e-300))
        ev.imag_null = false;
    }
  }
  const double eta_fit = policy.continuum() ? policy.eta_floor : 0.0;
  ev.fit_misfit = std::numeric_limits<double>::infinity();
  if (ev.slim_null && ev.imag_null) {
    try {
      ShiftedSolver solver(op);
      ev.fit_misfit = detail::chebyshev_misfit(x - w, x + w, 33, 16, [&](double tt) {
        solver.factorize(cplx(tt, eta_fit));
        return sample_MG(solver, op, G);
      });
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NearSpectrum) throw;
    }
    ev.fit_ok = ev.fit_misfit < 1e-6;
  }
  ev.analytic = ev.slim_null && ev.imag_null && ev.fit_ok;
  return ev;
}

}  // namespace dtnspec
