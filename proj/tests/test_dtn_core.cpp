// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "dtnspec/dtn.hpp"

namespace dtnspec {
namespace {

DirichletOperator t1() {
  const auto dom = build_domain(DomainSpec::halfline1d(1.0, 3.0));
  return assemble_operator(dom, constant_potential(dom, 0.0));
}

DirichletOperator annulus() {
  const auto dom = build_domain(DomainSpec::exterior2d(1.0, 1.5, 7.5));
  return assemble_operator(dom, constant_potential(dom, 0.0));
}

TEST(PoissonSolve, T1AtZeroByHand) {
  const auto op = t1();
  const VecC u = poisson_solve(op, 0.0, VecC::Ones(1));
  EXPECT_NEAR(std::abs(u[0] - 2.0 / 3.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u[1] - 1.0 / 3.0), 0.0, 1e-15);
}

TEST(PoissonSolve, DefiningEquationAtI) {
  const auto op = t1();
  const cplx z(0.0, 1.0);
  const VecC u = poisson_solve(op, z, VecC::Ones(1));
  const VecC r = op.A.cast<cplx>() * u - z * u - op.B.cast<cplx>() * VecC::Ones(1);
  EXPECT_LE(r.norm(), 1e-12);
}

TEST(PoissonSolve, OnTheSpectrumThrowsNearSpectrum) {
  try {
    poisson_solve(t1(), 1.0, VecC::Ones(1));
    FAIL() << "expected NearSpectrum";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearSpectrum);
  }
}

TEST(NormalDerivative, ByHandAndLinear) {
  const auto op = t1();
  VecC u(2);
  u << 2.0 / 3.0, 1.0 / 3.0;
  EXPECT_NEAR(std::abs(normal_derivative(*op.domain, VecC(VecC::Ones(1)), u)[0] - 1.0 / 3.0), 0.0, 1e-15);
  EXPECT_EQ(normal_derivative(*op.domain, VecC(VecC::Zero(1)), VecC(VecC::Zero(2)))[0], cplx(0.0));
  EXPECT_EQ(normal_derivative(*op.domain, VecC(VecC::Constant(1, 2.5)), VecC(VecC::Constant(2, 2.5)))[0], cplx(0.0));
}

TEST(NormalDerivative, ConstantFieldVanishesIn2D) {
  const auto op = annulus();
  const VecC g = VecC::Constant(op.boundary_size(), cplx(1.5, -0.5));
  const VecC u = VecC::Constant(op.size(), cplx(1.5, -0.5));
  EXPECT_LE(normal_derivative(*op.domain, g, u).norm(), 1e-15);
}

TEST(DtnMatrix, T1Values) {
  const auto op = t1();
  EXPECT_NEAR(std::abs(dtn_matrix(op, 0.0).M(0, 0) - 1.0 / 3.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(dtn_matrix(op, 2.0).M(0, 0) - 1.0), 0.0, 1e-14);
}

TEST(DtnMatrix, ConjugatePairAtPlusMinusI) {
  for (const auto& op : {t1(), annulus()}) {
    const MatC Mp = dtn_matrix(op, cplx(0.0, 1.0)).M;
    const MatC Mm = dtn_matrix(op, cplx(0.0, -1.0)).M;
    EXPECT_LE((Mm - boundary_adjoint(op, Mp)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GammaAdjoint, T1AtZeroByHand) {
  const MatC gs = gamma_adjoint(t1(), 0.0);
  EXPECT_NEAR(std::abs(gs(0, 0) - 2.0 / 3.0), 0.0, 1e-15);
}

TEST(GammaAdjoint, WeightedAdjointIdentity) {
  for (const auto& op : {t1(), annulus()}) {
    const cplx z(0.3, 1.0);
    const MatC gamma = poisson_matrix(op, z).gamma;
    const MatC gs = gamma_adjoint(op, z);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    VecC u(op.size()), g(op.boundary_size());
    for (auto& v : u) v = cplx(nd(rng), nd(rng));
    for (auto& v : g) v = cplx(nd(rng), nd(rng));
    const cplx lhs = interior_inner(op, gamma * g, u);
    const cplx rhs = boundary_inner(op, g, gs * u);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
    ShiftedSolver conj_solver(op);
    conj_solver.factorize(std::conj(z));
    EXPECT_EQ(gamma_adjoint_apply(conj_solver, op, MatC::Zero(op.size(), 1)).norm(), 0.0);
  }
}

TEST(IdentitySuite, T1FixedParameters) {
  const auto rep = identity_suite(t1(), cplx(1.0, 2.0), cplx(-1.0, 1.0), cplx(3.0, -1.0));
  EXPECT_LE(rep.worst(), 1e-12);
}

TEST(IdentitySuite, AnnulusFixedParameters) {
  const auto rep = identity_suite(annulus(), cplx(1.0, 2.0), cplx(-1.0, 1.0), cplx(3.0, -1.0));
  EXPECT_LE(rep.worst(), 1e-12);
}

TEST(IdentitySuite, EqualSpectralParametersReduceToTheSignLaw) {
  const auto op = t1();
  const cplx z(0.5, 0.75);
  const auto rep = identity_suite(op, z, z, cplx(2.0, -1.0));
  EXPECT_LE(rep.gamma_product, 1e-12);
  const MatC M = dtn_matrix(op, z).M;
  const VecC gz = poisson_matrix(op, z).gamma.col(0);
  EXPECT_NEAR(op.boundary_weights()[0] * M(0, 0).imag(), -z.imag() * op.interior_weight() * gz.squaredNorm(),
              1e-12);
}

TEST(IdentitySuite, DegenerateParametersRejected) {
  const auto op = t1();
  const cplx zeta(-1.0, 1.0);
  try {
    identity_suite(op, cplx(1.0, 2.0), zeta, std::conj(zeta));
    FAIL() << "expected DegenerateParameters";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateParameters);
  }
}

TEST(RobinToDirichlet, T1Values) {
  const auto op = t1();
  EXPECT_NEAR(std::abs(robin_to_dirichlet(op, 0.0, MatR::Zero(1, 1)).M_theta(0, 0) + 3.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(robin_to_dirichlet(op, 2.0, MatR::Constant(1, 1, 2.0)).M_theta(0, 0) - 1.0), 0.0, 1e-13);
}

TEST(RobinToDirichlet, SingularPencilRejected) {
  const auto op = t1();
  try {
    robin_to_dirichlet(op, 0.0, MatR::Constant(1, 1, 1.0 / 3.0));
    FAIL() << "expected SingularRobinPencil";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularRobinPencil);
  }
}

}  // namespace
}  // namespace dtnspec
