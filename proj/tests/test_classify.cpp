// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "dtnspec/classify.hpp"
#include "dtnspec/oracle.hpp"

namespace dtnspec {
namespace {

DirichletOperator t1() {
  const auto dom = build_domain(DomainSpec::halfline1d(1.0, 3.0));
  return assemble_operator(dom, constant_potential(dom, 0.0));
}

DirichletOperator free_halfline() {
  const auto dom = build_domain(DomainSpec::halfline1d(0.01, 200.0));
  return assemble_operator(dom, constant_potential(dom, 0.0));
}

DirichletOperator annulus() {
  const auto dom = build_domain(DomainSpec::exterior2d(1.0, 1.5, 7.5));
  return assemble_operator(dom, constant_potential(dom, 0.0));
}

ClassifyConfig continuum_config(double step) {
  ClassifyConfig c;
  c.policy.eta_floor = 0.1;
  c.step = step;
  return c;
}

TEST(ClassifyPoint, T1EigenvalueAndGap) {
  const auto op = t1();
  const MatC G = basis_probes(op);
  const auto at1 = classify_point(op, 1.0, G, {});
  EXPECT_EQ(at1.verdict, Verdict::Eigenvalue);
  EXPECT_EQ(at1.multiplicity, 1);
  ASSERT_TRUE(at1.eigenvalue.has_value());
  EXPECT_NEAR(*at1.eigenvalue, 1.0, 1e-12);
  EXPECT_LE(at1.residue_consistency, 1e-6);
  EXPECT_EQ(classify_point(op, 2.0, G, {}).verdict, Verdict::ResolventSet);
}

TEST(ClassifyPoint, T1EigenvalueInsideTheCellButOffTheGrid) {
  // x = 1.04 owns [0.99, 1.09); the pole is found by the Newton search.
  const auto op = t1();
  const auto pv = classify_point(op, 1.04, basis_probes(op), {});
  EXPECT_EQ(pv.verdict, Verdict::Eigenvalue);
  EXPECT_NEAR(pv.eigenvalue.value_or(0.0), 1.0, 1e-10);
}

TEST(ClassifyPoint, FreeHalfLineContinuumAndResolvent) {
  const auto op = free_halfline();
  const MatC G = basis_probes(op);
  EXPECT_EQ(classify_point(op, 1.0, G, continuum_config(0.25)).verdict, Verdict::ContinuousSpectrum);
  EXPECT_EQ(classify_point(op, -1.0, G, continuum_config(0.25)).verdict, Verdict::ResolventSet);
}

TEST(WindowGrid, IncludesBothEnds) {
  const auto g = window_grid(0.0, 4.0, 0.1);
  ASSERT_EQ(g.size(), 41u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 4.0, 1e-12);
}

TEST(EigenspaceViaTau, T1ByHand) {
  const auto op = t1();
  const auto rep = eigenspace_via_tau(op, 1.0, oracle_eigendecomposition(op));
  EXPECT_NEAR(std::abs(rep.tau(0, 0)), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(rep.residue_rank, 1);
  EXPECT_TRUE(rep.injective);
  EXPECT_TRUE(rep.range_match);
  EXPECT_LE(rep.max_angle_sine, 1e-12);
}

TEST(EigenspaceViaTau, NotAnEigenvalue) {
  const auto op = t1();
  try {
    eigenspace_via_tau(op, 2.0, oracle_eigendecomposition(op));
    FAIL() << "expected NotAnEigenvalue";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAnEigenvalue);
  }
}

TEST(EigenspaceViaTau, AnnulusDegenerateEigenvalue) {
  const auto op = annulus();
  const auto eig = oracle_eigendecomposition(op);
  int checked = 0;
  for (std::size_t k = 0; k < eig.groups.size() && checked == 0; ++k) {
    if (eig.multiplicity(k) != 2) continue;
    const auto rep = eigenspace_via_tau(op, eig.group_value(k), eig);
    if (!rep.injective) continue;  // eigenspaces invisible from the obstacle exist
    EXPECT_EQ(rep.residue_rank, 2);
    EXPECT_TRUE(rep.range_match) << rep.max_angle_sine;
    EXPECT_GT(rep.gram_ratio, 1e-8);
    ++checked;
  }
  EXPECT_EQ(checked, 1);
}

TEST(GridSetOps, EssentialClosure) {
  EXPECT_TRUE(essential_closure(GridSet{{{2.0, 2.0}}}).empty());
  EXPECT_EQ(essential_closure(GridSet{{{0.0, 1.0}, {2.0, 2.0}}}), (GridSet{{{0.0, 1.0}}}));
  EXPECT_EQ(essential_closure(GridSet{{{0.0, 1.0}, {1.0, 2.0}}}), (GridSet{{{0.0, 2.0}}}));
}

TEST(GridSetOps, FromFlags) {
  const std::vector<double> xs = {0, 1, 2, 3, 4};
  const auto s = GridSet::from_flags(xs, {true, true, false, true, false});
  EXPECT_EQ(s, (GridSet{{{0.0, 1.0}, {3.0, 3.0}}}));
  EXPECT_TRUE(s.has_nondegenerate());
  EXPECT_DOUBLE_EQ(s.measure(), 1.0);
}

TEST(AcSupport, T1IsEmpty) {
  const auto op = t1();
  ClassifyConfig c;
  const auto ac = ac_support(op, 0.0, 4.0, basis_probes(op), c);
  EXPECT_TRUE(ac.support.empty());
  EXPECT_TRUE(ac.ac_free);
}

TEST(AcSupport, FreeHalfLineCoversTheWindow) {
  const auto op = free_halfline();
  const auto cfg = continuum_config(0.25);
  const MatC G = basis_probes(op);
  const auto ev = detail::evidence_window(op, 0.25, 4.0, G, cfg);
  const auto ac = ac_support_from(ev, cfg.thresholds.effective(true));
  EXPECT_EQ(ac.support, (GridSet{{{0.25, 4.0}}}));
  for (const auto& p : ev) EXPECT_NEAR(-p.probes[0].boundary.imag() / std::sqrt(p.x), 1.0, 0.1) << p.x;
  const auto sc = sc_screen_from(ev, cfg.thresholds.effective(true));
  EXPECT_TRUE(sc.excluded);
  EXPECT_TRUE(sc.flagged.empty());
}

TEST(AcSupport, FreeHalfLineResolventWindowIsEmpty) {
  const auto op = free_halfline();
  EXPECT_TRUE(ac_support(op, -2.0, -0.5, basis_probes(op), continuum_config(0.25)).support.empty());
}

TEST(ScScreen, T1PolesAreNotSingularContinuous) {
  const auto op = t1();
  const auto sc = sc_screen(op, 0.0, 4.0, basis_probes(op), {});
  EXPECT_TRUE(sc.excluded);
  EXPECT_TRUE(sc.flagged.empty());
}

TEST(PurityFilter, T1Windows) {
  const auto op = t1();
  const MatC G = basis_probes(op);
  ClassifyConfig c;
  const auto mixed = purity_filter(op, 0.5, 1.5, G, c);
  EXPECT_EQ(mixed.verdict, Purity::MixedUnknown);
  ASSERT_EQ(mixed.offending.size(), 1u);
  EXPECT_NEAR(mixed.offending[0], 1.0, 1e-12);
  EXPECT_EQ(purity_filter(op, 1.5, 2.5, G, c).verdict, Purity::NoSpectrum);
}

TEST(PurityFilter, FreeHalfLineIsPureAC) {
  const auto op = free_halfline();
  EXPECT_EQ(purity_filter(op, 0.25, 4.0, basis_probes(op), continuum_config(0.25)).verdict, Purity::PureAC);
}

TEST(RandomProbes, DeterminedBySeed) {
  const auto op = annulus();
  EXPECT_EQ(random_probes(op, 5, 3), random_probes(op, 5, 3));
  EXPECT_NE(random_probes(op, 5, 3), random_probes(op, 6, 3));
  const MatC G = random_probes(op, 5, 3);
  for (Eigen::Index j = 0; j < G.cols(); ++j) EXPECT_NEAR(boundary_norm(op, G.col(j)), 1.0, 1e-14);
}

}  // namespace
}  // namespace dtnspec
