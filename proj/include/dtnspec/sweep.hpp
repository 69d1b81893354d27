// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <thread>
#include <vector>

#include "dtnspec/config.hpp"
#include "dtnspec/oracle.hpp"
#include "dtnspec/report.hpp"

namespace dtnspec {

/// Calls f(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to slot i only, so the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  for (auto& t : pool) t.join();
}

inline constexpr Eigen::Index oracle_size_limit = 3000;

inline OracleCheck oracle_check(const DirichletOperator& op, const std::vector<PointVerdict>& pts, double lo,
                                double hi) {
  OracleCheck oc;
  if (op.size() > oracle_size_limit) {
    oc.note = "skipped: interior dimension " + std::to_string(op.size()) + " exceeds " +
              std::to_string(oracle_size_limit);
    return oc;
  }
  const EigenSystem eig = oracle_eigendecomposition(op);
  oc.available = true;
  oc.note = "dense eigendecomposition";
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
  std::vector<bool> used(pts.size(), false);
  bool ok = true;
  for (std::size_t k = 0; k < eig.groups.size(); ++k) {
    const double lam = eig.group_value(k);
    if (lam < lo || lam >= hi) continue;
    OracleRow row{lam, static_cast<int>(eig.multiplicity(k)), std::nullopt, std::nullopt};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      if (p.verdict != Verdict::Eigenvalue || !p.eigenvalue || !close(*p.eigenvalue, lam)) continue;
      used[i] = true;
      if (!row.detected) {
        row.detected = *p.eigenvalue;
        row.abs_error = std::abs(*p.eigenvalue - lam);
        ok = ok && p.multiplicity == row.multiplicity;
      }
    }
    ok = ok && row.detected.has_value();
    oc.rows.push_back(row);
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].verdict == Verdict::Eigenvalue && !used[i]) oc.unmatched.push_back(pts[i].eigenvalue.value_or(pts[i].x));
  oc.agrees = ok && oc.unmatched.empty();
  return oc;
}

/// Classifies every grid point of the window and assembles the report.
/// A failing point becomes an inconclusive entry; the sweep carries on.
inline ClassificationReport run_sweep(const RunConfig& cfg, const Model& model) {
  const auto& op = model.op;
  const MatC G = build_probes(cfg, op);
  const ClassifyConfig cc = cfg.classify_config();
  const auto grid = window_grid(cfg.window_a, cfg.window_b, cfg.step);

  std::vector<PointVerdict> pts(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    try {
      pts[i] = classify_point(op, grid[i], G, cc);
    } catch (const Error& e) {
      pts[i] = PointVerdict{};
      pts[i].x = grid[i];
      pts[i].verdict = Verdict::Inconclusive;
      pts[i].note = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });

  std::vector<GridEvidence> ev;
  for (const auto& p : pts) ev.push_back(grid_evidence(p));
  const Thresholds th = cc.thresholds.effective(cc.policy.continuum());
  const auto ac = ac_support_from(ev, th);
  const auto sc = sc_screen_from(ev, th);

  ClassificationReport r;
  r.config = config_to_json(cfg);
  r.config.erase("threads");  // execution detail; reports must not depend on it
  for (const auto& p : pts) r.points.push_back(point_record(p));
  r.ac = ac_record(ac);
  r.sc = sc_record(sc);
  r.purity = purity_record(purity_from(pts, ac, sc));
  const double w = 0.5 * cfg.step;
  r.oracle = oracle_check(op, pts, grid.front() - w, grid.back() + w);
  return r;
}

inline ClassificationReport run_sweep(const RunConfig& cfg) { return run_sweep(cfg, build_model(cfg)); }

}  // namespace dtnspec
