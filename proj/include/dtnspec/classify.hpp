// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dtnspec/gridset.hpp"
#include "dtnspec/limits.hpp"
#include "dtnspec/oracle.hpp"

namespace dtnspec {

enum class Verdict { ResolventSet, Eigenvalue, ContinuousSpectrum, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ResolventSet: return "resolvent";
    case Verdict::Eigenvalue: return "eigenvalue";
    case Verdict::ContinuousSpectrum: return "continuous";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct ClassifyConfig {
  LimitPolicy policy;
  Thresholds thresholds;
  double step = 0.1;  // grid step; x owns the cell [x - step/2, x + step/2)
  int contour_nodes = 64;
};

/// Per-probe evidence behind a verdict at one x.
struct ProbeEvidence {
  std::vector<double> etas;
  std::vector<cplx> mgg;            // (M(x+iη)g, g)_W
  std::vector<double> abs_eta_mg;   // ||η M(x+iη) g||_W
  VecC slim;                        // extrapolated η M(x+iη) g
  double slim_error = 0.0;
  double slim_ref = 0.0;            // ||M(x+iη₀) g||
  cplx y_form = 0.0;                // extrapolated η (M(x+iη)g, g)_W
  cplx boundary = 0.0;              // extrapolated (M(x+i0)g, g)_W
  double boundary_error = 0.0;
  bool diverges = false;
  bool converged = false;
};

inline std::vector<ProbeEvidence> probe_evidence(const DirichletOperator& op, const PointLimits& pl, const MatC& G) {
  std::vector<ProbeEvidence> out;
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    const auto& s = pl.slim[static_cast<std::size_t>(j)];
    const auto& b = pl.boundary[static_cast<std::size_t>(j)];
    ProbeEvidence ev;
    ev.etas = pl.samples.etas;
    ev.mgg = b.samples;
    for (const auto& v : s.samples) ev.abs_eta_mg.push_back(boundary_norm(op, v));
    ev.slim = s.value;
    ev.slim_error = s.error;
    ev.slim_ref = pl.samples.MG.front().col(j).norm();
    ev.y_form = boundary_inner(op, s.value, G.col(j));
    ev.boundary = b.value;
    ev.boundary_error = b.error;
    ev.diverges = b.diverges;
    ev.converged = s.converged && (b.converged || b.diverges);
    out.push_back(std::move(ev));
  }
  return out;
}

struct PointVerdict {
  double x = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  int multiplicity = 0;
  std::optional<double> eigenvalue;
  MatC residue;      // empty unless Eigenvalue
  MatC tau_range;    // weighted-orthonormal basis of ran R
  double residue_consistency = 0.0;  // max_g ||s-lim ηM(λ₀+iη)g + i R g|| / ||R||
  double tau_eig = 0.0;
  std::vector<ProbeEvidence> probes;
  std::optional<AnalyticityEvidence> analyticity;
  std::string note;
};

/// Probe block: boundary basis, or `count` seeded Gaussian vectors normalised in W.
inline MatC basis_probes(const DirichletOperator& op) {
  return MatC::Identity(op.boundary_size(), op.boundary_size());
}

inline MatC random_probes(const DirichletOperator& op, std::uint64_t seed, int count) {
  require(count >= 1, ErrorKind::InvalidArgument, "probe count must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  MatC G(op.boundary_size(), count);
  for (int j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = cplx(nd(rng), nd(rng));
    G.col(j) /= boundary_norm(op, G.col(j));
  }
  return G;
}

inline PointVerdict classify_point(const DirichletOperator& op, double x, const MatC& G, const ClassifyConfig& cfg) {
  require(cfg.step > 0.0, ErrorKind::InvalidArgument, "grid step must be positive");
  const Thresholds th = cfg.thresholds.effective(cfg.policy.continuum());
  const double w = 0.5 * cfg.step;
  PointVerdict pv;
  pv.x = x;

  PointLimits pl;
  try {
    pl = evaluate_point(op, x, G, cfg.policy);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NearSpectrum) throw;
    pv.note = e.what();
    return pv;
  }
  pv.probes = probe_evidence(op, pl, G);
  if (!pl.converged()) {
    pv.note = "eta extrapolation did not converge";
    return pv;
  }

  bool pole_at_x = false;
  double ref = 0.0;
  for (const auto& p : pv.probes) {
    ref = std::max(ref, p.slim_ref);
    if (p.slim.norm() > th.tau_eig * p.slim_ref) pole_at_x = true;
  }
  pv.tau_eig = th.tau_eig * ref;

  std::optional<double> candidate;
  if (pole_at_x) candidate = x;
  else if (!cfg.policy.continuum())
    candidate = find_pole(op, x, w, G, {x, x - 0.5 * w, x + 0.5 * w});

  if (candidate) {
    PoleResidue pr = refine_pole(op, *candidate, w, cfg.contour_nodes);
    if (pr.lambda >= x - w && pr.lambda < x + w) {
      const double floor = 1e-9 * pr.residue.radius * std::max(1.0, op.norm_inf);
      const int rank = residue_rank(op, pr.residue.R, 1e-6, floor);
      if (rank >= 1) {
        pv.verdict = Verdict::Eigenvalue;
        pv.eigenvalue = pr.lambda;
        pv.multiplicity = rank;
        pv.residue = pr.residue.R;
        pv.tau_range = residue_range(op, pr.residue.R, rank);
        // s-lim at the refined pole against -i R g.
        try {
          const PointLimits at = evaluate_point(op, pr.lambda, G, cfg.policy);
          const double rn = std::max(boundary_operator_norm(op, pr.residue.R), 1e-300);
          for (Eigen::Index j = 0; j < G.cols(); ++j) {
            const VecC expect = cplx(0.0, -1.0) * (pr.residue.R * G.col(j));
            pv.residue_consistency = std::max(
                pv.residue_consistency, boundary_norm(op, at.slim[static_cast<std::size_t>(j)].value - expect) / rn);
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NearSpectrum) throw;
          pv.note = "s-limit at the pole hit the spectrum";
          pv.residue_consistency = std::numeric_limits<double>::infinity();
        }
        return pv;
      }
    }
  }

  pv.analyticity = analyticity_test(op, x, 0.5 * w, G, cfg.policy, cfg.thresholds);
  if (!pv.analyticity->converged) {
    pv.verdict = Verdict::Inconclusive;
    pv.note = "analyticity window limits did not converge";
    return pv;
  }
  pv.verdict = pv.analyticity->analytic ? Verdict::ResolventSet : Verdict::ContinuousSpectrum;
  return pv;
}

/// Uniform grid a, a + step, ..., up to b.
inline std::vector<double> window_grid(double a, double b, double step) {
  require(a < b && step > 0.0, ErrorKind::InvalidArgument, "window needs a < b and a positive step");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  std::vector<double> xs(n + 1);
  for (std::size_t k = 0; k <= n; ++k) xs[k] = a + static_cast<double>(k) * step;
  return xs;
}

// ---------------------------------------------------------------------------
// τ-bijection

struct TauReport {
  double lambda0 = 0.0;
  int multiplicity = 0;
  int residue_rank = 0;
  MatC tau;                  // τu for each oracle eigenvector, nb x m
  double gram_ratio = 0.0;   // σ_min / σ_max of the weighted Gram matrix
  double max_angle_sine = 1.0;
  bool injective = false;
  bool range_match = false;
  MatC residue;
};

namespace detail {

/// Weighted-orthonormal basis for the column span (columns independent).
inline MatC weighted_orthonormal(const DirichletOperator& op, const MatC& X) {
  const VecR s = op.boundary_weights().cwiseSqrt();
  Eigen::HouseholderQR<MatC> qr(s.cast<cplx>().asDiagonal() * X);
  return qr.householderQ() * MatC::Identity(X.rows(), X.cols());
}

/// Largest sine of the principal angles between two subspaces given by
/// Euclidean-orthonormal bases; 1 if the dimensions differ.
inline double max_sine(const MatC& Q1, const MatC& Q2) {
  if (Q1.cols() != Q2.cols() || Q1.cols() == 0) return 1.0;
  const MatC P = Q1 - Q2 * (Q2.adjoint() * Q1);
  return Eigen::JacobiSVD<MatC>(P).singularValues()(0);
}

}  // namespace detail

inline TauReport eigenspace_via_tau(const DirichletOperator& op, double lambda0, const EigenSystem& eig,
                                    int contour_nodes = 64) {
  const int k = eig.group_at(lambda0);
  require(k >= 0, ErrorKind::NotAnEigenvalue, "λ₀ = " + std::to_string(lambda0) + " is not an oracle eigenvalue");
  const auto kk = static_cast<std::size_t>(k);
  TauReport rep;
  rep.lambda0 = eig.group_value(kk);
  rep.multiplicity = static_cast<int>(eig.multiplicity(kk));

  const MatC V = eig.group_vectors(kk).cast<cplx>();
  rep.tau = normal_derivative(*op.domain, MatC::Zero(op.boundary_size(), V.cols()), V);

  const VecC w = op.boundary_weights().cast<cplx>();
  const MatC gram = rep.tau.adjoint() * w.asDiagonal() * rep.tau;
  const VecR sv = Eigen::JacobiSVD<MatC>(gram).singularValues();
  rep.gram_ratio = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  rep.injective = rep.gram_ratio > 1e-8;

  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < eig.groups.size(); ++g)
    if (g != kk) gap = std::min(gap, std::abs(eig.group_value(g) - rep.lambda0));
  if (!std::isfinite(gap)) gap = 1.0;
  const PoleResidue pr = refine_pole(op, rep.lambda0, 0.25 * gap, contour_nodes);
  rep.residue = pr.residue.R;
  const double floor = 1e-9 * pr.residue.radius * std::max(1.0, op.norm_inf);
  rep.residue_rank = residue_rank(op, rep.residue, 1e-6, floor);

  if (rep.injective && rep.residue_rank == rep.multiplicity) {
    const VecR s = op.boundary_weights().cwiseSqrt();
    const MatC Q_tau = detail::weighted_orthonormal(op, rep.tau);
    const MatC Q_res = s.cast<cplx>().asDiagonal() * residue_range(op, rep.residue, rep.residue_rank);
    rep.max_angle_sine = detail::max_sine(Q_tau, Q_res);
  }
  rep.range_match = rep.max_angle_sine <= 1e-6;
  return rep;
}

// ---------------------------------------------------------------------------
// Window-level screens. All of them work from per-point evidence so a sweep
// can compute the limits once.

struct GridEvidence {
  double x = 0.0;
  bool converged = false;
  std::vector<ProbeEvidence> probes;
};

inline GridEvidence grid_evidence(const DirichletOperator& op, double x, const MatC& G, const LimitPolicy& policy) {
  GridEvidence ge;
  ge.x = x;
  try {
    const PointLimits pl = evaluate_point(op, x, G, policy);
    ge.probes = probe_evidence(op, pl, G);
    ge.converged = pl.converged();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NearSpectrum) throw;
  }
  return ge;
}

inline GridEvidence grid_evidence(const PointVerdict& pv) {
  GridEvidence ge;
  ge.x = pv.x;
  ge.probes = pv.probes;
  ge.converged = !pv.probes.empty();
  for (const auto& p : pv.probes) ge.converged = ge.converged && p.converged;
  return ge;
}

struct ACSupportSet {
  std::vector<double> grid;
  std::vector<GridSet> per_probe;
  std::vector<GridSet> per_probe_closure;
  GridSet support;
  double flagged_fraction = 0.0;
  bool ac_free = true;
  std::vector<double> inconclusive;
};

/// AC flag: 0 < -Im(M(x+i0)g,g) < ∞, with the lower edge relative to |(M g, g)|.
inline bool ac_flag(const ProbeEvidence& p, double tau_ac) {
  return !p.diverges && std::isfinite(p.boundary.imag()) &&
         -p.boundary.imag() > tau_ac * std::max(std::abs(p.boundary), 1e-300);
}

inline ACSupportSet ac_support_from(const std::vector<GridEvidence>& pts, const Thresholds& th) {
  ACSupportSet acs;
  if (pts.empty()) return acs;
  const std::size_t np = pts.front().probes.size();
  std::vector<std::vector<bool>> flags(np, std::vector<bool>(pts.size(), false));
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    acs.grid.push_back(pts[i].x);
    if (!pts[i].converged) acs.inconclusive.push_back(pts[i].x);
    bool any = false;
    for (std::size_t j = 0; j < pts[i].probes.size() && j < np; ++j) {
      flags[j][i] = pts[i].converged && ac_flag(pts[i].probes[j], th.tau_ac);
      any = any || flags[j][i];
    }
    if (any) ++flagged;
  }
  for (std::size_t j = 0; j < np; ++j) {
    acs.per_probe.push_back(GridSet::from_flags(acs.grid, flags[j]));
    acs.per_probe_closure.push_back(essential_closure(acs.per_probe.back()));
    acs.support = set_union(acs.support, acs.per_probe_closure.back());
  }
  acs.flagged_fraction = static_cast<double>(flagged) / static_cast<double>(pts.size());
  acs.ac_free = acs.flagged_fraction <= th.null_fraction;
  return acs;
}

struct SCReport {
  std::vector<double> grid;
  /// [point][probe]: Im(Mg,g) -> -∞ and y(Mg,g) -> 0.
  std::vector<std::vector<bool>> diverges;
  std::vector<std::vector<bool>> y_vanishes;
  GridSet flagged;
  bool excluded = true;
  std::string caveat;
};

inline SCReport sc_screen_from(const std::vector<GridEvidence>& pts, const Thresholds& th) {
  SCReport sc;
  std::vector<bool> both;
  for (const auto& pt : pts) {
    sc.grid.push_back(pt.x);
    std::vector<bool> d, y;
    bool any = false;
    for (const auto& p : pt.probes) {
      const double ref = std::abs(p.mgg.empty() ? cplx(0.0) : p.mgg.front());
      d.push_back(p.diverges);
      y.push_back(std::abs(p.y_form) <= th.tau_eig * std::max(ref, 1e-300));
      any = any || (d.back() && y.back());
    }
    sc.diverges.push_back(std::move(d));
    sc.y_vanishes.push_back(std::move(y));
    both.push_back(any);
  }
  sc.flagged = GridSet::from_flags(sc.grid, both);
  sc.excluded = !sc.flagged.has_nondegenerate();
  sc.caveat = "finiteness is judged on the sampling grid: only isolated flagged grid points are tolerated";
  return sc;
}

enum class Purity { PureAC, PureSC, NoSpectrum, MixedUnknown };

inline const char* to_string(Purity p) {
  switch (p) {
    case Purity::PureAC: return "PureAC";
    case Purity::PureSC: return "PureSC";
    case Purity::NoSpectrum: return "NoSpectrum";
    case Purity::MixedUnknown: return "Mixed/Unknown";
  }
  return "Mixed/Unknown";
}

struct PurityVerdict {
  Purity verdict = Purity::MixedUnknown;
  std::vector<double> offending;  // points where the s-limit hypothesis fails
  std::vector<double> inconclusive;
};

inline PurityVerdict purity_from(const std::vector<PointVerdict>& pts, const ACSupportSet& ac, const SCReport& sc) {
  PurityVerdict pv;
  bool all_resolvent = true;
  for (const auto& p : pts) {
    if (p.verdict == Verdict::Eigenvalue) pv.offending.push_back(p.x);
    if (p.verdict == Verdict::Inconclusive) pv.inconclusive.push_back(p.x);
    all_resolvent = all_resolvent && p.verdict == Verdict::ResolventSet;
  }
  if (!pv.offending.empty() || !pv.inconclusive.empty()) return pv;
  if (all_resolvent) pv.verdict = Purity::NoSpectrum;
  else if (sc.excluded && !ac.ac_free) pv.verdict = Purity::PureAC;
  else if (ac.ac_free) pv.verdict = Purity::PureSC;
  return pv;
}

// ---------------------------------------------------------------------------
// Window-level entry points.

namespace detail {

inline std::vector<PointVerdict> classify_window(const DirichletOperator& op, double a, double b, const MatC& G,
                                                 const ClassifyConfig& cfg) {
  std::vector<PointVerdict> out;
  for (double x : window_grid(a, b, cfg.step)) out.push_back(classify_point(op, x, G, cfg));
  return out;
}

inline std::vector<GridEvidence> evidence_window(const DirichletOperator& op, double a, double b, const MatC& G,
                                                 const ClassifyConfig& cfg) {
  std::vector<GridEvidence> out;
  for (double x : window_grid(a, b, cfg.step)) out.push_back(grid_evidence(op, x, G, cfg.policy));
  return out;
}

}  // namespace detail

inline ACSupportSet ac_support(const DirichletOperator& op, double a, double b, const MatC& G,
                               const ClassifyConfig& cfg) {
  return ac_support_from(detail::evidence_window(op, a, b, G, cfg),
                         cfg.thresholds.effective(cfg.policy.continuum()));
}

inline SCReport sc_screen(const DirichletOperator& op, double a, double b, const MatC& G, const ClassifyConfig& cfg) {
  return sc_screen_from(detail::evidence_window(op, a, b, G, cfg), cfg.thresholds.effective(cfg.policy.continuum()));
}

inline PurityVerdict purity_filter(const DirichletOperator& op, double a, double b, const MatC& G,
                                   const ClassifyConfig& cfg) {
  const auto pts = detail::classify_window(op, a, b, G, cfg);
  std::vector<GridEvidence> ev;
  for (const auto& p : pts) ev.push_back(grid_evidence(p));
  const Thresholds th = cfg.thresholds.effective(cfg.policy.continuum());
  return purity_from(pts, ac_support_from(ev, th), sc_screen_from(ev, th));
}

}  // namespace dtnspec
