// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "dtnspec/sweep.hpp"

namespace dtnspec {
namespace {

namespace fs = std::filesystem;

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    return e.what();
  }
  return "";
}

RunConfig t1_config() {
  return parse_config_text(R"({
    "schema": "dtnspec.config/1",
    "domain": {"kind": "halfline1d", "h": 1, "L": 3},
    "window": {"a": 0, "b": 4, "step": 0.1}
  })");
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dtnspec_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(ParseConfig, MinimalHalfLineFillsDefaults) {
  const auto c = parse_config_text(R"({"schema": "dtnspec.config/1", "domain": {"h": 0.5, "L": 3}})");
  EXPECT_EQ(c.domain.kind, DomainKind::HalfLine1d);
  EXPECT_EQ(c.potential.kind, "zero");
  EXPECT_EQ(c.policy.eta0, 0.0);  // auto: 0.1 x mean level spacing
  EXPECT_EQ(c.policy.ratio, 0.5);
  EXPECT_EQ(c.policy.count, 8);
  EXPECT_EQ(c.policy.eta_floor, 0.0);
  EXPECT_EQ(c.probes.kind, "basis");
  EXPECT_EQ(c.thresholds.tau_eig, 1e-6);
  EXPECT_EQ(c.threads, 1);
}

TEST(ParseConfig, NegativeStepNamesTheField) {
  const auto msg = error_of(R"({"schema": "dtnspec.config/1", "domain": {"h": -1, "L": 3}})");
  EXPECT_NE(msg.find("domain.h"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownKeySuggestsTheNearestOne) {
  const auto msg = error_of(R"({"schema": "dtnspec.config/1", "domain": {"h": 1, "L": 3}, "potental": {}})");
  EXPECT_NE(msg.find("potental"), std::string::npos) << msg;
  EXPECT_NE(msg.find("did you mean 'potential'"), std::string::npos) << msg;
}

TEST(ParseConfig, SyntaxErrorReportsLineAndColumn) {
  const auto msg = error_of("{\"schema\": \"dtnspec.config/1\",\n  \"domain\": {\"h\": 1,,}}");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(ParseConfig, WrongSchemaAndWrongTypes) {
  EXPECT_NE(error_of(R"({"schema": "dtnspec.config/2", "domain": {"h": 1, "L": 3}})").find("schema"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema": "dtnspec.config/1", "domain": {"h": "one", "L": 3}})").find("domain.h"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema": "dtnspec.config/1"})").find("domain"), std::string::npos);
}

TEST(ParseConfig, EchoParsesBackToTheSameConfig) {
  const auto c = parse_config_text(R"({
    "schema": "dtnspec.config/1",
    "domain": {"kind": "exterior2d", "h": 1, "a": 1.5, "L": 7.5},
    "potential": {"kind": "well", "depth": 1.5, "width": 2},
    "probes": {"kind": "random", "seed": 9, "count": 2},
    "eta": {"floor": 0.05}
  })");
  const auto again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(BuildModel, TabulatedPotentialIsChecked) {
  auto c = t1_config();
  c.potential.kind = "tabulated";
  c.potential.interior = {0.1, 0.2};
  c.potential.boundary = {0.0};
  c.potential.bound = 0.2;
  EXPECT_NEAR(MatR(build_model(c).op.A)(1, 1), 2.2, 1e-15);
  c.potential.interior = {0.1};
  EXPECT_THROW(build_model(c), Error);
}

TEST(RunSweep, T1FlagsExactlyTheOracleEigenvalues) {
  const auto r = run_sweep(t1_config());
  ASSERT_EQ(r.points.size(), 41u);
  std::vector<double> flagged;
  for (const auto& p : r.points)
    if (p.verdict == "eigenvalue") flagged.push_back(*p.eigenvalue);
  ASSERT_EQ(flagged.size(), 2u);
  EXPECT_NEAR(flagged[0], 1.0, 1e-10);
  EXPECT_NEAR(flagged[1], 3.0, 1e-10);
  EXPECT_TRUE(r.oracle.available);
  EXPECT_TRUE(r.oracle.agrees);
  EXPECT_EQ(r.purity.verdict, "Mixed/Unknown");
}

TEST(RunSweep, ResolventWindowHasNoSpectrum) {
  auto c = t1_config();
  c.window_a = 1.5;
  c.window_b = 2.5;
  EXPECT_EQ(run_sweep(c).purity.verdict, "NoSpectrum");
}

TEST(RunSweep, FreeHalfLineIsPureAC) {
  const auto c = parse_config_text(R"({
    "schema": "dtnspec.config/1",
    "domain": {"h": 0.01, "L": 200},
    "window": {"a": 0.25, "b": 4, "step": 0.25},
    "eta": {"floor": 0.1}
  })");
  const auto r = run_sweep(c);
  EXPECT_EQ(r.purity.verdict, "PureAC");
  EXPECT_FALSE(r.oracle.available);
}

TEST(Report, RoundTripsThroughText) {
  auto c = t1_config();
  c.probes = {"random", 3, 2};
  const auto r = run_sweep(c);
  EXPECT_EQ(parse_report_text(report_text(r)), r);
  EXPECT_EQ(report_text(parse_report_text(report_text(r))), report_text(r));
}

TEST(Report, NonFiniteValuesBecomeNull) {
  ClassificationReport r;
  PointRecord p;
  p.fit_misfit = finite_or_null(std::numeric_limits<double>::infinity());
  r.points.push_back(p);
  const auto j = to_json(r);
  EXPECT_TRUE(j["points"][0]["fit_misfit"].is_null());
  EXPECT_EQ(parse_report_text(report_text(r)), r);
}

TEST(Report, ByteIdenticalAcrossThreadCounts) {
  auto c = t1_config();
  c.threads = 1;
  const auto one = report_text(run_sweep(c));
  c.threads = 4;
  EXPECT_EQ(report_text(run_sweep(c)), one);
}

TEST(Emit, FilesAndCsvShape) {
  const auto r = run_sweep(t1_config());
  const auto dir = scratch_dir("emit");
  const auto rp = emit_report(r, dir);
  EXPECT_EQ(parse_report(rp), r);
  const auto csv = emit_csv(r, dir);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,eta,probe_id,re_Mgg,im_Mgg,abs_etaMg,verdict");
  std::size_t rows = 0;
  std::set<std::string> verdicts;
  while (std::getline(in, line)) {
    ++rows;
    verdicts.insert(line.substr(line.rfind(',') + 1));
  }
  std::size_t expected = 0;
  for (const auto& p : r.points)
    for (const auto& q : p.probes) expected += q.etas.size();
  EXPECT_EQ(rows, expected);
  EXPECT_EQ(rows, r.points.size() * 1 * 8);  // grid points x probes x eta samples
  const std::set<std::string> allowed = {"resolvent", "eigenvalue", "continuous", "inconclusive"};
  for (const auto& v : verdicts) EXPECT_TRUE(allowed.count(v)) << v;
  const auto plots = emit_plot_data(r, dir);
  ASSERT_EQ(plots.size(), 2u);
  std::ifstream poles(plots[1]);
  std::stringstream ss;
  ss << poles.rdbuf();
  EXPECT_EQ(ss.str(), "# lambda multiplicity\n" + shortest(*r.points[10].eigenvalue) + " 1\n" +
                          shortest(*r.points[30].eigenvalue) + " 1\n");
  fs::remove_all(dir);
}

TEST(Emit, UnwritableDirectoryNamesThePath) {
  try {
    emit_report(ClassificationReport{}, "/proc/dtnspec_cannot_write_here");
    FAIL() << "expected Io";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("/proc/dtnspec_cannot_write_here"), std::string::npos);
  }
}

TEST(Shortest, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) EXPECT_EQ(std::stod(shortest(v)), v);
  EXPECT_EQ(shortest(0.1), "0.1");
}

}  // namespace
}  // namespace dtnspec
