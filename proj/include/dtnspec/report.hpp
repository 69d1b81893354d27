// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtnspec/classify.hpp"

namespace dtnspec {

inline constexpr const char* report_schema = "dtnspec.report/1";

// Report records hold plain values only, so equality is structural and a
// serialized report parses back to an equal object. Quantities that may be
// non-finite are optional; nullopt is written as null.

struct ProbeRecord {
  int probe_id = 0;
  std::vector<double> etas;
  std::vector<cplx> mgg;
  std::vector<double> abs_eta_mg;
  double slim_norm = 0.0;
  std::optional<double> slim_error;
  cplx y_form = 0.0;
  cplx boundary = 0.0;
  std::optional<double> boundary_error;
  bool diverges = false;
  bool converged = false;

  bool operator==(const ProbeRecord&) const = default;
};

struct PointRecord {
  double x = 0.0;
  std::string verdict = "inconclusive";
  int multiplicity = 0;
  std::optional<double> eigenvalue;
  std::vector<std::vector<cplx>> residue;  // row-major
  std::optional<double> residue_consistency;
  std::optional<bool> analytic;
  std::optional<double> fit_misfit;
  std::string note;
  std::vector<ProbeRecord> probes;

  bool operator==(const PointRecord&) const = default;
};

struct ACRecord {
  std::vector<GridSet> per_probe;
  GridSet support;
  double flagged_fraction = 0.0;
  bool ac_free = true;
  std::vector<double> inconclusive;

  bool operator==(const ACRecord&) const = default;
};

struct SCRecord {
  GridSet flagged;
  bool excluded = true;
  std::string caveat;

  bool operator==(const SCRecord&) const = default;
};

struct PurityRecord {
  std::string verdict = "Mixed/Unknown";
  std::vector<double> offending;
  std::vector<double> inconclusive;

  bool operator==(const PurityRecord&) const = default;
};

struct OracleRow {
  double eigenvalue = 0.0;
  int multiplicity = 0;
  std::optional<double> detected;
  std::optional<double> abs_error;

  bool operator==(const OracleRow&) const = default;
};

struct OracleCheck {
  bool available = false;
  std::string note;
  std::vector<OracleRow> rows;
  std::vector<double> unmatched;  // detected eigenvalues with no oracle partner
  bool agrees = false;

  bool operator==(const OracleCheck&) const = default;
};

struct ClassificationReport {
  std::string schema = report_schema;
  json config;
  std::vector<PointRecord> points;
  ACRecord ac;
  SCRecord sc;
  PurityRecord purity;
  OracleCheck oracle;

  bool operator==(const ClassificationReport&) const = default;
};

// ---------------------------------------------------------------------------
// Conversion from library results

inline std::optional<double> finite_or_null(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

inline ProbeRecord probe_record(int id, const ProbeEvidence& p) {
  ProbeRecord r;
  r.probe_id = id;
  r.etas = p.etas;
  r.mgg = p.mgg;
  r.abs_eta_mg = p.abs_eta_mg;
  r.slim_norm = p.slim.size() ? p.slim.norm() : 0.0;
  r.slim_error = finite_or_null(p.slim_error);
  r.y_form = p.y_form;
  r.boundary = p.boundary;
  r.boundary_error = finite_or_null(p.boundary_error);
  r.diverges = p.diverges;
  r.converged = p.converged;
  return r;
}

inline PointRecord point_record(const PointVerdict& pv) {
  PointRecord r;
  r.x = pv.x;
  r.verdict = to_string(pv.verdict);
  r.multiplicity = pv.multiplicity;
  r.eigenvalue = pv.eigenvalue;
  for (Eigen::Index i = 0; i < pv.residue.rows(); ++i) {
    std::vector<cplx> row;
    for (Eigen::Index j = 0; j < pv.residue.cols(); ++j) row.push_back(pv.residue(i, j));
    r.residue.push_back(std::move(row));
  }
  if (pv.verdict == Verdict::Eigenvalue) r.residue_consistency = finite_or_null(pv.residue_consistency);
  if (pv.analyticity) {
    r.analytic = pv.analyticity->analytic;
    r.fit_misfit = finite_or_null(pv.analyticity->fit_misfit);
  }
  r.note = pv.note;
  for (std::size_t j = 0; j < pv.probes.size(); ++j) r.probes.push_back(probe_record(static_cast<int>(j), pv.probes[j]));
  return r;
}

inline ACRecord ac_record(const ACSupportSet& a) {
  return {a.per_probe_closure, a.support, a.flagged_fraction, a.ac_free, a.inconclusive};
}

inline SCRecord sc_record(const SCReport& s) { return {s.flagged, s.excluded, s.caveat}; }

inline PurityRecord purity_record(const PurityVerdict& p) { return {to_string(p.verdict), p.offending, p.inconclusive}; }

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double real_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
inline std::optional<double> opt_from(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

inline json cplx_json(cplx z) { return json::array({real_json(z.real()), real_json(z.imag())}); }
inline cplx cplx_from(const json& j) { return {real_from(j.at(0)), real_from(j.at(1))}; }

inline json reals_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real_json(x));
  return a;
}
inline std::vector<double> reals_from(const json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(real_from(e));
  return v;
}

inline json cplxs_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(cplx_json(z));
  return a;
}
inline std::vector<cplx> cplxs_from(const json& j) {
  std::vector<cplx> v;
  for (const auto& e : j) v.push_back(cplx_from(e));
  return v;
}

inline json gridset_json(const GridSet& s) {
  json a = json::array();
  for (const auto& p : s.parts) a.push_back(json::array({p.lo, p.hi}));
  return a;
}
inline GridSet gridset_from(const json& j) {
  GridSet s;
  for (const auto& e : j) s.parts.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return s;
}

}  // namespace detail

inline json to_json(const ClassificationReport& r) {
  using namespace detail;
  json j;
  j["schema"] = r.schema;
  j["config"] = r.config;
  json pts = json::array();
  for (const auto& p : r.points) {
    json pj;
    pj["x"] = p.x;
    pj["verdict"] = p.verdict;
    pj["multiplicity"] = p.multiplicity;
    pj["eigenvalue"] = opt_json(p.eigenvalue);
    json res = json::array();
    for (const auto& row : p.residue) res.push_back(cplxs_json(row));
    pj["residue"] = res;
    pj["residue_consistency"] = opt_json(p.residue_consistency);
    pj["analytic"] = p.analytic ? json(*p.analytic) : json(nullptr);
    pj["fit_misfit"] = opt_json(p.fit_misfit);
    pj["note"] = p.note;
    json probes = json::array();
    for (const auto& q : p.probes) {
      probes.push_back({{"probe_id", q.probe_id},
                        {"etas", reals_json(q.etas)},
                        {"mgg", cplxs_json(q.mgg)},
                        {"abs_eta_mg", reals_json(q.abs_eta_mg)},
                        {"slim_norm", real_json(q.slim_norm)},
                        {"slim_error", opt_json(q.slim_error)},
                        {"y_form", cplx_json(q.y_form)},
                        {"boundary", cplx_json(q.boundary)},
                        {"boundary_error", opt_json(q.boundary_error)},
                        {"diverges", q.diverges},
                        {"converged", q.converged}});
    }
    pj["probes"] = probes;
    pts.push_back(pj);
  }
  j["points"] = pts;
  json per = json::array();
  for (const auto& s : r.ac.per_probe) per.push_back(gridset_json(s));
  j["ac_support"] = {{"per_probe", per},
                     {"support", gridset_json(r.ac.support)},
                     {"flagged_fraction", r.ac.flagged_fraction},
                     {"ac_free", r.ac.ac_free},
                     {"inconclusive", reals_json(r.ac.inconclusive)}};
  j["sc_screen"] = {{"flagged", gridset_json(r.sc.flagged)}, {"excluded", r.sc.excluded}, {"caveat", r.sc.caveat}};
  j["purity"] = {{"verdict", r.purity.verdict},
                 {"offending", reals_json(r.purity.offending)},
                 {"inconclusive", reals_json(r.purity.inconclusive)}};
  json rows = json::array();
  for (const auto& o : r.oracle.rows)
    rows.push_back({{"eigenvalue", o.eigenvalue},
                    {"multiplicity", o.multiplicity},
                    {"detected", opt_json(o.detected)},
                    {"abs_error", opt_json(o.abs_error)}});
  j["oracle"] = {{"available", r.oracle.available},
                 {"note", r.oracle.note},
                 {"rows", rows},
                 {"unmatched", reals_json(r.oracle.unmatched)},
                 {"agrees", r.oracle.agrees}};
  return j;
}

inline ClassificationReport report_from_json(const json& j) {
  using namespace detail;
  ClassificationReport r;
  try {
    r.schema = j.at("schema").get<std::string>();
    require(r.schema == report_schema, ErrorKind::Config, "unsupported report schema '" + r.schema + "'");
    r.config = j.at("config");
    for (const auto& pj : j.at("points")) {
      PointRecord p;
      p.x = pj.at("x").get<double>();
      p.verdict = pj.at("verdict").get<std::string>();
      p.multiplicity = pj.at("multiplicity").get<int>();
      p.eigenvalue = opt_from(pj.at("eigenvalue"));
      for (const auto& row : pj.at("residue")) p.residue.push_back(cplxs_from(row));
      p.residue_consistency = opt_from(pj.at("residue_consistency"));
      if (!pj.at("analytic").is_null()) p.analytic = pj.at("analytic").get<bool>();
      p.fit_misfit = opt_from(pj.at("fit_misfit"));
      p.note = pj.at("note").get<std::string>();
      for (const auto& qj : pj.at("probes")) {
        ProbeRecord q;
        q.probe_id = qj.at("probe_id").get<int>();
        q.etas = reals_from(qj.at("etas"));
        q.mgg = cplxs_from(qj.at("mgg"));
        q.abs_eta_mg = reals_from(qj.at("abs_eta_mg"));
        q.slim_norm = real_from(qj.at("slim_norm"));
        q.slim_error = opt_from(qj.at("slim_error"));
        q.y_form = cplx_from(qj.at("y_form"));
        q.boundary = cplx_from(qj.at("boundary"));
        q.boundary_error = opt_from(qj.at("boundary_error"));
        q.diverges = qj.at("diverges").get<bool>();
        q.converged = qj.at("converged").get<bool>();
        p.probes.push_back(std::move(q));
      }
      r.points.push_back(std::move(p));
    }
    const json& ac = j.at("ac_support");
    for (const auto& s : ac.at("per_probe")) r.ac.per_probe.push_back(gridset_from(s));
    r.ac.support = gridset_from(ac.at("support"));
    r.ac.flagged_fraction = ac.at("flagged_fraction").get<double>();
    r.ac.ac_free = ac.at("ac_free").get<bool>();
    r.ac.inconclusive = reals_from(ac.at("inconclusive"));
    const json& sc = j.at("sc_screen");
    r.sc.flagged = gridset_from(sc.at("flagged"));
    r.sc.excluded = sc.at("excluded").get<bool>();
    r.sc.caveat = sc.at("caveat").get<std::string>();
    const json& pu = j.at("purity");
    r.purity.verdict = pu.at("verdict").get<std::string>();
    r.purity.offending = reals_from(pu.at("offending"));
    r.purity.inconclusive = reals_from(pu.at("inconclusive"));
    const json& oc = j.at("oracle");
    r.oracle.available = oc.at("available").get<bool>();
    r.oracle.note = oc.at("note").get<std::string>();
    for (const auto& o : oc.at("rows"))
      r.oracle.rows.push_back({o.at("eigenvalue").get<double>(), o.at("multiplicity").get<int>(),
                               opt_from(o.at("detected")), opt_from(o.at("abs_error"))});
    r.oracle.unmatched = reals_from(oc.at("unmatched"));
    r.oracle.agrees = oc.at("agrees").get<bool>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed report: ") + e.what());
  }
  return r;
}

/// Sorted keys, two-space indent, shortest round-trip numbers.
inline std::string report_text(const ClassificationReport& r) { return to_json(r).dump(2) + "\n"; }

inline ClassificationReport parse_report_text(const std::string& text) {
  try {
    return report_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("report parse error: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Files

inline std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace detail

inline ClassificationReport parse_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_report_text(ss.str());
}

inline std::filesystem::path emit_report(const ClassificationReport& r, const std::filesystem::path& dir) {
  const auto path = detail::prepare_dir(dir) / "report.json";
  detail::write_file(path, report_text(r));
  return path;
}

inline std::string csv_text(const ClassificationReport& r) {
  std::string s = "x,eta,probe_id,re_Mgg,im_Mgg,abs_etaMg,verdict\n";
  for (const auto& p : r.points)
    for (const auto& q : p.probes)
      for (std::size_t k = 0; k < q.etas.size(); ++k) {
        s += shortest(p.x) + ',' + shortest(q.etas[k]) + ',' + std::to_string(q.probe_id) + ',' +
             shortest(q.mgg[k].real()) + ',' + shortest(q.mgg[k].imag()) + ',' + shortest(q.abs_eta_mg[k]) + ',' +
             p.verdict + '\n';
      }
  return s;
}

inline std::filesystem::path emit_csv(const ClassificationReport& r, const std::filesystem::path& dir) {
  const auto path = detail::prepare_dir(dir) / "samples.csv";
  detail::write_file(path, csv_text(r));
  return path;
}

/// ac_profile.dat: x and -Im(M(x+i0)g_j, g_j) per probe (nan where the limit
/// diverges). poles.dat: detected eigenvalue and multiplicity.
inline std::vector<std::filesystem::path> emit_plot_data(const ClassificationReport& r,
                                                         const std::filesystem::path& dir) {
  const auto root = detail::prepare_dir(dir);
  std::string prof = "# x";
  const std::size_t np = r.points.empty() ? 0 : r.points.front().probes.size();
  for (std::size_t j = 0; j < np; ++j) prof += " neg_im_Mgg_" + std::to_string(j);
  prof += '\n';
  for (const auto& p : r.points) {
    prof += shortest(p.x);
    for (std::size_t j = 0; j < np; ++j) {
      const bool ok = j < p.probes.size() && !p.probes[j].diverges && p.probes[j].boundary_error;
      prof += ' ' + (ok ? shortest(-p.probes[j].boundary.imag()) : std::string("nan"));
    }
    prof += '\n';
  }
  std::string poles = "# lambda multiplicity\n";
  for (const auto& p : r.points)
    if (p.eigenvalue) poles += shortest(*p.eigenvalue) + ' ' + std::to_string(p.multiplicity) + '\n';
  const auto a = root / "ac_profile.dat", b = root / "poles.dat";
  detail::write_file(a, prof);
  detail::write_file(b, poles);
  return {a, b};
}

}  // namespace dtnspec
