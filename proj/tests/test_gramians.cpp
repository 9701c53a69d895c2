// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "morbench/gramians.hpp"
#include "morbench/thermal_block.hpp"
#include "oracles.hpp"

using namespace morbench;

namespace
{

const ParameterPoint kNone{Vector(0)};
const SimGrid kLong = SimGrid::over(20.0, 1e-4);

DenseSystem scalar(double a, double b, double c)
{
  return DenseSystem(Matrix::Ones(1, 1), {Matrix::Constant(1, 1, a)}, Matrix::Constant(1, 1, b),
                     Matrix::Constant(1, 1, c));
}

DenseSystem diag12(Index outputs_as_sum = 1)
{
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = -1;
  A(1, 1) = -2;
  return DenseSystem(Matrix::Identity(2, 2), {A}, Matrix::Ones(2, 1),
                     Matrix::Ones(outputs_as_sum, 2));
}

Matrix hilbert_like()
{
  Matrix w(2, 2);
  w << 1.0 / 2, 1.0 / 3, 1.0 / 3, 1.0 / 4;
  return w;
}

}  // namespace

TEST(EmpiricalWc, ScalarAnalytic)
{
  const auto g = empirical_wc(scalar(-1, 1, 1), kNone, kLong);
  EXPECT_EQ(g.kind, GramianKind::WC);
  EXPECT_NEAR(g.matrix(0, 0), 0.5, 1e-3);
}

TEST(EmpiricalWc, ZeroInputMatrix)
{
  const auto g = empirical_wc(scalar(-1, 0, 1), kNone, SimGrid{1e-2, 100});
  EXPECT_TRUE(g.matrix.isZero(0.0));
}

TEST(EmpiricalWc, DiagonalSystemMatchesLyapunovOracle)
{
  const auto sys = diag12();
  const auto g = empirical_wc(sys, kNone, kLong);
  const Matrix oracle_w = oracle::lyapunov(sys.A_terms()[0], sys.E(), sys.B() * sys.B().transpose());
  EXPECT_LE((oracle_w - hilbert_like()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((g.matrix - oracle_w).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(EmpiricalWc, IsSymmetricPositiveSemidefiniteProperty)
{
  oracle::Gen gen(2);
  for (int trial = 0; trial < 5; ++trial)
  {
    const Index n = gen.integer(3, 15);
    const DenseSystem sys(Matrix::Identity(n, n), {gen.stable(n)}, gen.gaussian(n, 2),
                          gen.gaussian(2, n));
    const auto g = empirical_wc(sys, kNone, SimGrid{1e-2, 600});
    EXPECT_EQ(g.matrix, g.matrix.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(g.matrix);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * g.matrix.norm());
  }
}

TEST(EmpiricalWo, ScalarAnalytic)
{
  EXPECT_NEAR(empirical_wo(scalar(-1, 1, 1), kNone, kLong).matrix(0, 0), 0.5, 1e-3);
}

TEST(EmpiricalWo, ZeroOutputMatrix)
{
  EXPECT_TRUE(empirical_wo(scalar(-1, 1, 0), kNone, SimGrid{1e-2, 100}).matrix.isZero(0.0));
}

TEST(EmpiricalWo, SymmetricSystemEqualsWc)
{
  oracle::Gen gen(3);
  const Matrix A = gen.symmetric_stable(8);
  const Matrix B = gen.gaussian(8, 2);
  const DenseSystem sys(Matrix::Identity(8, 8), {A}, B, B.transpose());
  const SimGrid grid{1e-3, 3000};
  const auto wc = empirical_wc(sys, kNone, grid);
  const auto wo = empirical_wo(sys, kNone, grid);
  EXPECT_LE((wc.matrix - wo.matrix).norm(), 1e-8);
}

TEST(EmpiricalWo, MatchesObservabilityOracleWithMass)
{
  oracle::Gen gen(4);
  const Index n = 6;
  const Matrix E = Matrix::Identity(n, n) + 0.2 * gen.gaussian(n, n);
  const Matrix A = E * gen.stable(n, -5.0, -0.5);
  const DenseSystem sys(E, {A}, gen.gaussian(n, 1), gen.gaussian(2, n));
  const auto wo = empirical_wo(sys, kNone, SimGrid::over(30.0, 1e-4));
  const Matrix want = oracle::observability(A, E, sys.C().transpose() * sys.C());
  EXPECT_LE((wo.matrix - want).norm(), 5e-3 * want.norm());
}

TEST(EmpiricalWx, ScalarAnalytic)
{
  EXPECT_NEAR(empirical_wx(scalar(-1, 1, 1), kNone, kLong).matrix(0, 0), 0.5, 1e-3);
}

TEST(EmpiricalWx, SymmetricSisoIsSymmetric)
{
  oracle::Gen gen(5);
  const Matrix A = gen.symmetric_stable(7);
  const Matrix B = gen.gaussian(7, 1);
  const DenseSystem sys(Matrix::Identity(7, 7), {A}, B, B.transpose());
  const auto wx = empirical_wx(sys, kNone, SimGrid{1e-3, 3000});
  EXPECT_LE((wx.matrix - wx.matrix.transpose()).norm(), 1e-8);
  EXPECT_GE((sys.C() * wx.matrix * sys.B())(0, 0), 0.0);
}

TEST(EmpiricalWx, DiagonalSystemMatchesSylvesterOracle)
{
  const auto sys = diag12();
  const auto wx = empirical_wx(sys, kNone, kLong);
  const Matrix want = oracle::sylvester(sys.A_terms()[0], sys.E(), sys.B() * sys.C());
  EXPECT_LE((wx.matrix - want).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(EmpiricalWx, RejectsNonSquareSystems)
{
  EXPECT_THROW(empirical_wx(diag12(2), kNone, SimGrid{1e-2, 10}), InvalidArgument);
}

TEST(EmpiricalWz, EqualsWxForSiso)
{
  oracle::Gen gen(6);
  const DenseSystem sys(Matrix::Identity(5, 5), {gen.stable(5)}, gen.gaussian(5, 1),
                        gen.gaussian(1, 5));
  const SimGrid grid{1e-2, 500};
  EXPECT_EQ(empirical_wz(sys, kNone, grid).matrix, empirical_wx(sys, kNone, grid).matrix);
}

TEST(EmpiricalWz, DuplicatedInputColumnDoubles)
{
  oracle::Gen gen(7);
  const Matrix A = gen.stable(5);
  const Matrix b = gen.gaussian(5, 1);
  const Matrix c = gen.gaussian(1, 5);
  Matrix bb(5, 2);
  bb << b, b;
  const SimGrid grid{1e-2, 500};
  const DenseSystem one(Matrix::Identity(5, 5), {A}, b, c);
  const DenseSystem two(Matrix::Identity(5, 5), {A}, bb, c);
  const Matrix w1 = empirical_wx(one, kNone, grid).matrix;
  const Matrix w2 = empirical_wz(two, kNone, grid).matrix;
  EXPECT_LE((w2 - 2.0 * w1).norm(), 1e-14 * w1.norm());
}

TEST(EmpiricalWz, ThermalBlockTraceMatchesSparseSylvesterOracle)
{
  thermal::ThermalBlockConfig cfg;
  cfg.grid_n = 8;
  const auto sys = thermal::build(cfg);
  const ParameterPoint theta{2.0, 3.0, 4.0, 5.0};
  const auto wz = empirical_wz(sys, theta, SimGrid::over(8.0, 2e-4));
  ASSERT_EQ(wz.matrix.rows(), 64);
  ASSERT_TRUE(wz.matrix.allFinite());
  const SparseMatrix A = sys.assemble(theta);
  const Matrix b_bar = sys.B().rowwise().sum();
  const Matrix c_bar = sys.C().colwise().sum();
  const Matrix want = oracle::sylvester_sparse(A, b_bar * c_bar);
  EXPECT_NEAR(wz.matrix.trace(), want.trace(), 1e-2 * std::abs(want.trace()));
}

TEST(EmpiricalGramians, ScaleCovariance)
{
  oracle::Gen gen(8);
  const DenseSystem sys(Matrix::Identity(6, 6), {gen.stable(6)}, gen.gaussian(6, 2),
                        gen.gaussian(3, 6));
  const SimGrid grid{1e-2, 300};
  const auto w1 = empirical_wc(sys, kNone, grid);
  const auto w2 = empirical_wc(sys, kNone, grid, ExcitationScales{Vector::Constant(2, 2.0), {}});
  EXPECT_EQ(w2.matrix, 4.0 * w1.matrix);
  const auto o1 = empirical_wo(sys, kNone, grid);
  const auto o2 = empirical_wo(sys, kNone, grid, ExcitationScales{{}, Vector::Constant(3, 2.0)});
  EXPECT_EQ(o2.matrix, 4.0 * o1.matrix);
}

TEST(EmpiricalGramians, RejectsWrongScaleLength)
{
  EXPECT_THROW(empirical_wc(diag12(), kNone, SimGrid{1e-2, 10}, ExcitationScales{Vector::Ones(3), {}}),
               InvalidArgument);
}

TEST(EmpiricalGramians, PodAccumulationIdentityProperty)
{
  oracle::Gen gen(9);
  for (int trial = 0; trial < 10; ++trial)
  {
    const Index n = gen.integer(2, 20);
    const Matrix x1 = gen.gaussian(n, gen.integer(1, 30));
    const Matrix x2 = gen.gaussian(n, gen.integer(1, 30));
    Matrix joint(n, x1.cols() + x2.cols());
    joint << x1, x2;
    const Matrix lhs = joint * joint.transpose();
    const Matrix rhs = x1 * x1.transpose() + x2 * x2.transpose();
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * lhs.norm());
  }
}

TEST(EmpiricalGramians, ChunkedAccumulationMatchesNaiveSum)
{
  oracle::Gen gen(10);
  const Index n = 9;
  const DenseSystem sys(Matrix::Identity(n, n), {gen.stable(n)}, gen.gaussian(n, 3),
                        gen.gaussian(3, n));
  const SimGrid grid{1e-2, 777};  // not a multiple of the chunk length
  const auto wc = empirical_wc(sys, kNone, grid);
  const auto wx = empirical_wx(sys, kNone, grid);
  Matrix naive_c = Matrix::Zero(n, n), naive_x = Matrix::Zero(n, n);
  for (Index m = 0; m < 3; ++m)
  {
    const Vector x0 = sys.B().col(m);
    const Vector z0 = sys.C().row(m).transpose();
    const Matrix X = simulate(sys, kNone, Matrix(), x0, grid, Capture::State).values;
    const Matrix Z = simulate_dual(sys, kNone, Matrix(), z0, grid, Capture::State).values;
    naive_c += grid.dt * X * X.transpose();
    naive_x += grid.dt * X * Z.transpose();
  }
  EXPECT_LE((wc.matrix - naive_c).norm(), 1e-12 * naive_c.norm());
  EXPECT_LE((wx.matrix - naive_x).norm(), 1e-12 * naive_x.norm());
}

TEST(EmpiricalGramians, DivergentTrajectoryIsReported)
{
  // Growth factor 1/(1 - 0.9) = 10 per step overflows well within 1000 steps.
  EXPECT_THROW(empirical_wc(scalar(900.0, 1, 1), kNone, SimGrid{1e-3, 1000}), Divergence);
}

TEST(ParametricAverage, SingleParameterEqualsGramian)
{
  const DenseSystem sys(Matrix::Identity(2, 2), {Matrix::Zero(2, 2), -Matrix::Identity(2, 2)},
                        Matrix::Ones(2, 1), Matrix::Ones(1, 2));
  const SimGrid grid{1e-2, 200};
  const std::vector<ParameterPoint> one{{2.0}};
  EXPECT_EQ(parametric_average(GramianKind::WC, sys, std::span(one), grid).matrix,
            empirical_wc(sys, one[0], grid).matrix);
}

TEST(ParametricAverage, RepeatedParameterDoubles)
{
  const DenseSystem sys(Matrix::Identity(2, 2), {Matrix::Zero(2, 2), -Matrix::Identity(2, 2)},
                        Matrix::Ones(2, 1), Matrix::Ones(1, 2));
  const SimGrid grid{1e-2, 200};
  const std::vector<ParameterPoint> two{{2.0}, {2.0}};
  const auto avg = parametric_average(GramianKind::WO, sys, std::span(two), grid);
  EXPECT_EQ(avg.matrix, 2.0 * empirical_wo(sys, two[0], grid).matrix);
  EXPECT_EQ(avg.params_used.size(), 2u);
}

TEST(ParametricAverage, NonParametricTriples)
{
  const auto sys = diag12();
  const SimGrid grid{1e-2, 200};
  const std::vector<ParameterPoint> three(3, kNone);
  const auto avg = parametric_average(GramianKind::WX, sys, std::span(three), grid);
  EXPECT_LE((avg.matrix - 3.0 * empirical_wx(sys, kNone, grid).matrix).norm(), 1e-15);
}

TEST(ParametricAverage, ReportsOffendingParameter)
{
  const DenseSystem sys(Matrix::Ones(1, 1), {Matrix::Zero(1, 1), Matrix::Ones(1, 1)},
                        Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  const std::vector<ParameterPoint> sample{{-1.0}, {900.0}};
  try
  {
    parametric_average(GramianKind::WC, sys, std::span(sample), SimGrid{1e-3, 1000});
    FAIL() << "expected ParameterFailure";
  }
  catch (const ParameterFailure &e)
  {
    EXPECT_EQ(e.theta, sample[1]);
  }
  const std::vector<ParameterPoint> empty;
  EXPECT_THROW(parametric_average(GramianKind::WC, sys, std::span(empty), SimGrid{1e-3, 10}),
               InvalidArgument);
}
