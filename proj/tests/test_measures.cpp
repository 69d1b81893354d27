// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "dtnspec/measures.hpp"

namespace dtnspec {
namespace {

DirichletOperator t1() {
  const auto dom = build_domain(DomainSpec::halfline1d(1.0, 3.0));
  return assemble_operator(dom, constant_potential(dom, 0.0));
}

VecC e1(Eigen::Index n) {
  VecC u = VecC::Zero(n);
  u[0] = 1.0;
  return u;
}

TEST(SpectralMeasure, T1FirstBasisVector) {
  const auto op = t1();
  const auto mu = spectral_measure(oracle_eigendecomposition(op), e1(2));
  ASSERT_EQ(mu.atoms.size(), 2u);
  EXPECT_NEAR(mu.atoms[0].location, 1.0, 1e-14);
  EXPECT_NEAR(mu.atoms[0].weight, 0.5, 1e-14);
  EXPECT_NEAR(mu.atoms[1].location, 3.0, 1e-14);
  EXPECT_NEAR(mu.atoms[1].weight, 0.5, 1e-14);
}

TEST(SpectralMeasure, EigenvectorGivesOneAtomAndZeroGivesNone) {
  const auto op = t1();
  const auto eig = oracle_eigendecomposition(op);
  const auto mu = spectral_measure(eig, VecC(eig.eigenvectors.col(0).cast<cplx>()));
  ASSERT_EQ(mu.atoms.size(), 1u);
  EXPECT_NEAR(mu.atoms[0].location, 1.0, 1e-14);
  EXPECT_NEAR(mu.atoms[0].weight, 1.0, 1e-14);
  EXPECT_TRUE(spectral_measure(eig, VecC(VecC::Zero(2))).atoms.empty());
}

TEST(BorelTransform, SingleAtomAndT1) {
  SpectralMeasure unit;
  unit.atoms = {{0.0, 1.0}};
  EXPECT_NEAR(std::abs(borel_transform(unit, cplx(0.0, 1.0)).F - cplx(0.0, 1.0)), 0.0, 1e-15);
  const auto mu = spectral_measure(oracle_eigendecomposition(t1()), e1(2));
  EXPECT_NEAR(std::abs(borel_transform(mu, 0.0).F - 2.0 / 3.0), 0.0, 1e-14);
  EXPECT_THROW(borel_transform(mu, 1.0), Error);
}

TEST(BorelTransform, HerglotzInTheUpperHalfPlane) {
  const auto mu = uniform_density_atoms(-1.0, 2.0, 50);
  for (double x : {-3.0, 0.0, 0.37, 5.0})
    for (double y : {1e-3, 0.1, 10.0}) EXPECT_GT(borel_transform(mu, cplx(x, y)).F.imag(), 0.0);
}

TEST(PointMass, AtomsAndGaps) {
  SpectralMeasure mu;
  mu.atoms = {{1.0, 0.5}};
  const EtaSchedule s{0.1, 0.5, 8};
  EXPECT_NEAR(point_mass(mu, 1.0, s).value, 0.5, 1e-12);
  EXPECT_NEAR(point_mass(mu, 2.0, s).value, 0.0, 1e-10);
  mu.atoms.push_back({3.0, 0.25});
  EXPECT_NEAR(point_mass(mu, 3.0, s).value, 0.25, 1e-10);
}

TEST(StoneProjection, T1Intervals) {
  const auto op = t1();
  const auto eig = oracle_eigendecomposition(op);
  const auto p = stone_projection(op, 0.5, 1.5);
  EXPECT_LE((p.projection - oracle_projector(eig, 0.5, 1.5)).norm(), 1e-3);
  EXPECT_LE((p.projection - MatR::Constant(2, 2, 0.5)).norm(), 1e-3);
  EXPECT_LE(stone_projection(op, 1.5, 2.5).projection.norm(), 1e-3);
}

TEST(StoneProjection, EndpointOnEigenvalueRejected) {
  try {
    stone_projection(t1(), 1.0, 2.0);
    FAIL() << "expected EndpointOnEigenvalue";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EndpointOnEigenvalue);
  }
}

TEST(TridiagonalKernel, MatchesDenseInverse) {
  VecR d(5), s(4);
  d << 2.0, 1.5, -0.5, 3.0, 0.25;
  s << -1.0, 0.3, 2.0, -0.7;
  MatC T = MatC::Zero(5, 5);
  for (int i = 0; i < 5; ++i) T(i, i) = d[i];
  for (int i = 0; i < 4; ++i) T(i + 1, i) = T(i, i + 1) = s[i];
  const cplx z(0.4, 0.05);
  const MatR ref = (T - z * MatC::Identity(5, 5)).inverse().imag() / std::numbers::pi;
  EXPECT_LE((detail::tridiagonal_stone_kernel(d, s, z) - ref).norm(), 1e-12 * ref.norm());
}

TEST(Supports, AtomicMeasureHasNeither) {
  const auto mu = spectral_measure(oracle_eigendecomposition(t1()), e1(2));
  MeasureScreenOptions o;
  o.schedule = {1e-2, 0.5, 8};
  const auto rep = ac_sc_supports(mu, o, window_grid(0.0, 4.0, 0.1));
  EXPECT_TRUE(rep.ac_support.empty());
  EXPECT_TRUE(rep.sc_support.empty());
}

TEST(Supports, UniformDensityByQuadrature) {
  const auto mu = uniform_density_atoms(0.0, 1.0, 10000);
  MeasureScreenOptions o;
  o.continuum = true;
  o.schedule = EtaSchedule::ending_at(5e-4, 0.7, 4);
  o.tau_ac = 1e-2;
  const auto grid = window_grid(0.2, 0.8, 0.05);
  const auto rep = ac_sc_supports(mu, o, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(rep.im_boundary[i] / std::numbers::pi, 1.0, 0.02) << grid[i];
  EXPECT_TRUE(rep.ac_support.contains(0.2) && rep.ac_support.contains(0.8));
  EXPECT_TRUE(rep.sc_support.empty());
}

TEST(Supports, MixtureKeepsTheAcPartAndIgnoresAtoms) {
  SpectralMeasure heavy;
  heavy.atoms = {{0.4125, 0.3}, {0.6375, 0.2}};
  const auto mu = superpose(uniform_density_atoms(0.0, 1.0, 10000), heavy);
  MeasureScreenOptions o;
  o.continuum = true;
  o.schedule = EtaSchedule::ending_at(5e-4, 0.7, 4);
  o.tau_ac = 1e-2;
  const auto rep = ac_sc_supports(mu, o, window_grid(0.2, 0.8, 0.05));
  EXPECT_TRUE(rep.ac_support.contains(0.2) && rep.ac_support.contains(0.8));
  EXPECT_TRUE(rep.sc_support.empty());
}

TEST(SimplicityRank, T1) {
  const auto op = t1();
  const MatC G = basis_probes(op);
  EXPECT_EQ(simplicity_rank(op, {cplx(0.0, 1.0), cplx(0.0, 2.0)}, G).rank, 2);
  EXPECT_EQ(simplicity_rank(op, {cplx(0.0, 1.0)}, G).rank, 1);
  EXPECT_THROW(simplicity_rank(op, {cplx(1.0, 0.0)}, G), Error);
}

TEST(SimplicityRank, SmallWellWithShiftsAlongTheSpectrum) {
  const auto dom = build_domain(DomainSpec::halfline1d(0.5, 5.0));
  const auto op = assemble_operator(dom, well_potential(dom, 2.0, 1.0));
  const auto n = static_cast<int>(op.size());
  std::vector<cplx> zetas;
  for (int k = 0; k < n; ++k)
    zetas.push_back(cplx(op.gersh_lo + (op.gersh_hi - op.gersh_lo) * (k + 0.5) / n, 0.5));
  const auto r = simplicity_rank(op, zetas, basis_probes(op));
  EXPECT_EQ(r.rank, r.dimension);
}

}  // namespace
}  // namespace dtnspec
