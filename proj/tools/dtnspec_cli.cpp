// SPDX-License-Identifier: Apache-2.0
// Command-line front end: validate, classify, oracle, measures, convergence.

#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "dtnspec/dtnspec.hpp"

namespace {

using namespace dtnspec;

enum Exit { kOk = 0, kConfigError = 1, kNumericalFailure = 2 };

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

RunConfig load(const Common& c) {
  RunConfig cfg = parse_config(c.config);
  if (!c.out.empty()) cfg.output = c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

std::filesystem::path write_json(const std::filesystem::path& dir, const char* name, const json& j) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  return path;
}

json reals(const VecR& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json cplx_pair(cplx z) { return json::array({z.real(), z.imag()}); }

// validate: identity_suite over random admissible (λ, ζ, ν) in the upper half-plane.
int cmd_validate(const Common& c, int draws) {
  const RunConfig cfg = load(c);
  const Model m = build_model(cfg);
  std::mt19937_64 rng(cfg.seed);
  const double lo = m.op.gersh_lo, hi = m.op.gersh_hi;
  std::uniform_real_distribution<double> re(lo, hi), im(0.05, 1.0 + 0.1 * (hi - lo));
  json rows = json::array();
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    const cplx lambda(re(rng), im(rng)), zeta(re(rng), im(rng)), nu(re(rng), im(rng));
    const auto rep = identity_suite(m.op, lambda, zeta, nu);
    worst = std::max(worst, rep.worst());
    rows.push_back({{"lambda", cplx_pair(lambda)},
                    {"zeta", cplx_pair(zeta)},
                    {"nu", cplx_pair(nu)},
                    {"resolvent_poisson", rep.resolvent_poisson},
                    {"gamma_product", rep.gamma_product},
                    {"three_point", rep.three_point},
                    {"weyl", rep.weyl},
                    {"conjugate_symmetry", rep.conjugate_symmetry},
                    {"sign_law", rep.sign_law}});
  }
  const bool pass = worst <= 1e-10;
  const json j = {{"schema", "dtnspec.validate/1"}, {"draws", rows}, {"worst", worst}, {"pass", pass},
                  {"config", config_to_json(cfg)}};
  const auto path = write_json(cfg.output, "validate.json", j);
  std::printf("validate: %d draws, worst relative residual %.3e -> %s (%s)\n", draws, worst, pass ? "ok" : "FAILED",
              path.string().c_str());
  return pass ? kOk : kNumericalFailure;
}

int cmd_classify(const Common& c) {
  const RunConfig cfg = load(c);
  const auto report = run_sweep(cfg);
  const auto rp = emit_report(report, cfg.output);
  emit_csv(report, cfg.output);
  emit_plot_data(report, cfg.output);
  int eig = 0, inc = 0;
  for (const auto& p : report.points) {
    eig += p.verdict == "eigenvalue";
    inc += p.verdict == "inconclusive";
  }
  std::printf("classify: %zu points, %d eigenvalue, %d inconclusive, purity %s, oracle %s (%s)\n",
              report.points.size(), eig, inc, report.purity.verdict.c_str(),
              report.oracle.available ? (report.oracle.agrees ? "agrees" : "DISAGREES") : "skipped",
              rp.string().c_str());
  return kOk;
}

int cmd_oracle(const Common& c) {
  const RunConfig cfg = load(c);
  const Model m = build_model(cfg);
  require(m.op.size() <= 4 * oracle_size_limit, ErrorKind::InvalidArgument,
          "interior dimension " + std::to_string(m.op.size()) + " is too large for the dense oracle");
  const auto eig = oracle_eigendecomposition(m.op);
  json groups = json::array();
  for (std::size_t k = 0; k < eig.groups.size(); ++k)
    groups.push_back({{"lambda", eig.group_value(k)}, {"multiplicity", eig.multiplicity(k)}});
  const json j = {{"schema", "dtnspec.oracle/1"},
                  {"dimension", m.op.size()},
                  {"eigenvalues", reals(eig.eigenvalues)},
                  {"groups", groups},
                  {"degeneracy_tol", eig.degeneracy_tol},
                  {"config", config_to_json(cfg)}};
  const auto path = write_json(cfg.output, "oracle.json", j);
  std::printf("oracle: %ld eigenvalues in %zu groups (%s)\n", static_cast<long>(eig.size()), eig.groups.size(),
              path.string().c_str());
  return kOk;
}

// measures: Stone projection over the window, the measure of a unit interior
// field with its decomposition supports, and the simplicity rank.
int cmd_measures(const Common& c) {
  const RunConfig cfg = load(c);
  const Model m = build_model(cfg);
  const auto& op = m.op;
  require(op.size() <= oracle_size_limit, ErrorKind::InvalidArgument,
          "measures needs a dense reduction; interior dimension " + std::to_string(op.size()) + " exceeds " +
              std::to_string(oracle_size_limit));
  const auto eig = oracle_eigendecomposition(op);
  json j = {{"schema", "dtnspec.measures/1"}, {"config", config_to_json(cfg)}};

  const auto stone = stone_projection(op, cfg.window_a, cfg.window_b);
  const MatR P = oracle_projector(eig, cfg.window_a, cfg.window_b);
  j["stone"] = {{"a", cfg.window_a},
                {"b", cfg.window_b},
                {"gap", stone.gap},
                {"deltas", stone.deltas},
                {"extrapolation_error", stone.extrapolation_error},
                {"evaluations", stone.evaluations},
                {"oracle_difference", (stone.projection - P).norm()},
                {"trace", stone.projection.trace()}};

  VecC u = VecC::Zero(op.size());
  u[0] = 1.0 / std::sqrt(op.interior_weight());
  const auto mu = spectral_measure(eig, u);
  json atoms = json::array();
  for (const auto& a : mu.atoms) atoms.push_back({{"location", a.location}, {"weight", a.weight}});
  MeasureScreenOptions mo;
  mo.schedule = {0.1 * cfg.step, 0.5, 8};
  const auto dec = ac_sc_supports(mu, mo, window_grid(cfg.window_a, cfg.window_b, cfg.step));
  auto parts = [](const GridSet& s) {
    json a = json::array();
    for (const auto& p : s.parts) a.push_back(json::array({p.lo, p.hi}));
    return a;
  };
  j["measure"] = {{"provenance", mu.provenance},
                  {"total_mass", mu.total_mass()},
                  {"atoms", atoms},
                  {"ac_support", parts(dec.ac_support)},
                  {"sc_support", parts(dec.sc_support)}};

  const double mid = 0.5 * (cfg.window_a + cfg.window_b), span = cfg.window_b - cfg.window_a;
  const auto simp = simplicity_rank(op, {cplx(mid, 0.5 * span), cplx(mid, span)}, build_probes(cfg, op));
  j["simplicity"] = {{"rank", simp.rank},
                     {"dimension", simp.dimension},
                     {"full", simp.rank == simp.dimension},
                     {"zeta_samples", 2}};
  const auto path = write_json(cfg.output, "measures.json", j);
  std::printf("measures: |P_stone - P_oracle| = %.3e, %zu atoms, simplicity rank %d/%d (%s)\n",
              (stone.projection - P).norm(), mu.atoms.size(), simp.rank, simp.dimension, path.string().c_str());
  return kOk;
}

// convergence: W-averaged DtN form on constant boundary data at h, h/2, h/4.
int cmd_convergence(const Common& c, int levels) {
  const RunConfig cfg = load(c);
  const double eta = cfg.policy.eta_floor > 0.0 ? cfg.policy.eta_floor : 0.1;
  const auto grid = window_grid(cfg.window_a, cfg.window_b, cfg.step);
  const bool free_line = cfg.domain.kind == DomainKind::HalfLine1d && cfg.potential.kind == "zero";
  json lv = json::array();
  for (int l = 0; l < levels; ++l) {
    RunConfig rc = cfg;
    rc.domain.h = cfg.domain.h / std::pow(2.0, l);
    const Model m = build_model(rc);
    ShiftedSolver solver(m.op);
    const VecC one = VecC::Ones(m.op.boundary_size());
    const double mass = boundary_inner(m.op, one, one).real();
    json pts = json::array();
    for (double x : grid) {
      const cplx lambda(x, eta);
      solver.factorize(lambda);
      const VecC u = solver.solve(VecC(m.op.B.cast<cplx>() * one));
      const cplx form = boundary_inner(m.op, normal_derivative(*m.op.domain, one, u), one) / mass;
      json pj = {{"x", x}, {"M", cplx_pair(form)}};
      if (free_line) {
        const cplx exact = std::sqrt(-lambda);
        const double h = rc.domain.h;
        const cplx s = 2.0 - h * h * lambda;
        cplx r = 0.5 * (s - std::sqrt(s * s - 4.0));
        if (std::abs(r) > 1.0) r = 1.0 / r;
        const cplx mh = (1.0 - r) / h;
        pj["error_continuum"] = std::abs(form - exact);
        pj["error_truncation"] = std::abs(form - mh);
      }
      pts.push_back(pj);
    }
    lv.push_back({{"h", rc.domain.h}, {"interior_dimension", m.op.size()}, {"points", pts}});
  }
  const json j = {{"schema", "dtnspec.convergence/1"}, {"eta", eta}, {"levels", lv}, {"config", config_to_json(cfg)}};
  const auto path = write_json(cfg.output, "convergence.json", j);
  std::printf("convergence: %d levels over %zu points at eta = %g (%s)\n", levels, grid.size(), eta,
              path.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of discrete Schrödinger operators through the Dirichlet-to-Neumann map"};
  app.require_subcommand(1);
  Common common;
  int draws = 20, levels = 3;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides the config)");
    sub->add_option("--threads", common.threads, "worker threads (overrides the config)")->check(CLI::Range(1, 1024));
    sub->add_option("--seed", common.seed, "random seed (overrides the config)");
  };
  auto* validate = app.add_subcommand("validate", "check the boundary-triple identities at random parameters");
  add_common(validate);
  validate->add_option("--draws", draws, "number of random (λ, ζ, ν) draws")->check(CLI::PositiveNumber);
  auto* classify = app.add_subcommand("classify", "classify every point of the λ-window and write the report");
  add_common(classify);
  auto* oracle = app.add_subcommand("oracle", "dump the dense eigendecomposition");
  add_common(oracle);
  auto* measures = app.add_subcommand("measures", "Stone projection, measure supports and simplicity rank");
  add_common(measures);
  auto* convergence = app.add_subcommand("convergence", "DtN values under mesh refinement");
  add_common(convergence);
  convergence->add_option("--levels", levels, "number of refinement levels")->check(CLI::Range(1, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*validate) return cmd_validate(common, draws);
    if (*classify) return cmd_classify(common);
    if (*oracle) return cmd_oracle(common);
    if (*measures) return cmd_measures(common);
    if (*convergence) return cmd_convergence(common, levels);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Io ? kConfigError : kNumericalFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalFailure;
  }
  return kOk;
}
