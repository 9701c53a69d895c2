// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "morbench/gramians.hpp"
#include "morbench/norms.hpp"
#include "oracles.hpp"

using namespace morbench;

namespace
{

const ParameterPoint kNone{Vector(0)};

TruncationModes modes_from(const Vector &sigma, Index m = 1, Index q = 1)
{
  return TruncationModes{sigma, Matrix::Ones(sigma.size(), m), Matrix::Ones(q, sigma.size()),
                         std::nullopt};
}

Vector row(std::initializer_list<double> v)
{
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v)
  {
    out(i++) = x;
  }
  return out;
}

Matrix one_by(std::initializer_list<double> v) { return row(v).transpose(); }

BalancedRealization balanced(const DenseSystem &sys, const SimGrid &grid)
{
  const auto wz = empirical_wx(sys, kNone, grid);
  return balance_wcwo(sys, empirical_wc(sys, kNone, grid), empirical_wo(sys, kNone, grid),
                      sys.states(), &wz);
}

DenseSystem scalar()
{
  return DenseSystem(Matrix::Ones(1, 1), {-Matrix::Ones(1, 1)}, Matrix::Ones(1, 1),
                     Matrix::Ones(1, 1));
}

}  // namespace

TEST(SignalNorms, GeometricMeanExamples)
{
  EXPECT_NEAR(l0_approx(Matrix::Constant(2, 5, 0.3), Matrix::Zero(2, 5)), 0.3, 1e-15);
  EXPECT_NEAR(l0_approx(one_by({1, 4}), Matrix::Zero(1, 2)), 2.0, 1e-14);
  const Matrix y = Matrix::Ones(3, 3);
  EXPECT_NEAR(l0_approx(y, y), 1e-300, 1e-312);
}

TEST(SignalNorms, L1Examples)
{
  const Matrix zero = Matrix::Zero(1, 100);
  EXPECT_NEAR(l1_signal(Matrix::Constant(1, 100, 0.7), zero, 0.01), 0.7, 1e-14);
  EXPECT_EQ(l1_signal(zero, zero, 0.01), 0.0);
  Matrix e = zero;
  e(0, 42) = -3.0;
  EXPECT_NEAR(l1_signal(e, zero, 0.01), 0.03, 1e-16);
}

TEST(SignalNorms, L2Examples)
{
  const Matrix zero = Matrix::Zero(1, 100);
  EXPECT_NEAR(l2_signal(Matrix::Constant(1, 100, 0.7), zero, 0.01), 0.7, 1e-14);
  EXPECT_EQ(l2_signal(zero, zero, 0.01), 0.0);
  Matrix e = zero;
  e(0, 3) = 1.0;
  EXPECT_DOUBLE_EQ(l2_signal(e, zero, 0.25), 0.5);
}

TEST(SignalNorms, LinfExamples)
{
  EXPECT_EQ(linf_signal(one_by({-3, 2}), Matrix::Zero(1, 2)), 3.0);
  EXPECT_EQ(linf_signal(one_by({1, 2}), one_by({1, 2})), 0.0);
  EXPECT_EQ(linf_signal(-2.5 * one_by({-3, 2}), Matrix::Zero(1, 2)), 7.5);
}

TEST(SignalNorms, ShapeErrors)
{
  EXPECT_THROW(l0_approx(Matrix(), Matrix()), InvalidArgument);
  EXPECT_THROW(l2_signal(Matrix::Zero(1, 3), Matrix::Zero(1, 4), 0.1), InvalidArgument);
  EXPECT_THROW(linf_signal(Matrix::Zero(2, 3), Matrix::Zero(1, 3)), InvalidArgument);
}

TEST(SignalNorms, VectorNormOrderingProperty)
{
  oracle::Gen gen(1);
  for (int trial = 0; trial < 100; ++trial)
  {
    const Index q = gen.integer(1, 4), k = gen.integer(1, 50);
    const Matrix y = gen.gaussian(q, k), yr = gen.gaussian(q, k);
    const double inf = linf_signal(y, yr), two = l2_signal(y, yr, 1.0), one = l1_signal(y, yr, 1.0);
    EXPECT_LE(inf, two * (1 + 1e-14));
    EXPECT_LE(two, one * (1 + 1e-14));
    EXPECT_LE(l0_approx(y, yr), inf * (1 + 1e-14));
    const double alpha = gen.uniform(-4, 4);
    EXPECT_NEAR(linf_signal(alpha * y, alpha * yr), std::abs(alpha) * inf, 1e-12 * (1 + inf));
  }
}

TEST(HsvNorms, FormulaExamples)
{
  const auto m = modes_from(row({0.5, 0.1, 0.05}));
  EXPECT_DOUBLE_EQ(hinf_approx(m, 1, 3), 0.4);
  EXPECT_EQ(hinf_approx(m, 3, 3), 0.0);
  EXPECT_DOUBLE_EQ(hsh_approx(m, 1, 3), std::sqrt(2.0) * 0.1);
  EXPECT_EQ(hsh_approx(m, 3, 3), 0.0);
  EXPECT_EQ(hsh_approx(m, 2, 3), hankel_norm(m, 2));

  const auto h = modes_from(row({2, 1, 0.5}));
  EXPECT_EQ(hankel_norm(h, 1), 1.0);
  EXPECT_EQ(hankel_norm(h, 0), 2.0);
  EXPECT_EQ(hankel_norm(h, 3), 0.0);
  EXPECT_EQ(hankel_norm(h, 7), 0.0);
}

TEST(HsvNorms, PrincipalDiscardedUsesLargestTail)
{
  // Balanced-gains order need not be sorted by sigma.
  const auto m = modes_from(row({1.0, 4.0, 0.5}));
  EXPECT_EQ(hankel_norm(m, 0), 4.0);
  EXPECT_EQ(hankel_norm(m, 1), 4.0);
  EXPECT_EQ(hankel_norm(m, 2), 0.5);
}

TEST(HsvNorms, ScalarSystem)
{
  const auto bal = balanced(scalar(), SimGrid::over(20.0, 1e-4));
  const auto m = truncation_modes(bal);
  EXPECT_NEAR(h2_approx(m, 0), std::sqrt(0.5), 1e-3);
  EXPECT_EQ(h2_approx(m, 1), 0.0);
  EXPECT_NEAR(hinf_approx(m, 0, 1), 1.0, 2e-3);
}

TEST(HsvNorms, H2MatchesTraceIdentityOnSymmetricSystem)
{
  Matrix A(2, 2);
  A << -2.0, 0.5, 0.5, -1.0;
  Matrix B(2, 1);
  B << 1.0, 0.5;
  const DenseSystem sys(Matrix::Identity(2, 2), {A}, B, B.transpose());
  const auto m = truncation_modes(balanced(sys, SimGrid::over(30.0, 1e-4)));
  for (Index n = 0; n < 2; ++n)
  {
    double s = 0.0;
    for (Index k = n; k < 2; ++k)
    {
      s += m.C_hat.col(k).squaredNorm() * m.sigma(k);
    }
    EXPECT_NEAR(h2_approx(m, n), std::sqrt(s), 5e-2 * std::sqrt(s)) << "n = " << n;
  }
}

TEST(HsvNorms, H2NeedsCrossGramian)
{
  EXPECT_THROW(h2_approx(modes_from(row({1.0})), 0), InvalidArgument);
}

TEST(HsvNorms, InducedNormsMatchDirectSums)
{
  Matrix A(3, 3);
  A << -3, 1, 0, 0, -2, 0.5, 0.2, 0, -1;
  Matrix B(3, 1), C(1, 3);
  B << 1, 0, 1;
  C << 0.5, 1, -1;
  const DenseSystem sys(Matrix::Identity(3, 3), {A}, B, C);
  const auto m = truncation_modes(balanced(sys, SimGrid{1e-3, 20000}));
  for (Index n = 0; n <= m.rank(); ++n)
  {
    double sb = 0.0, sc = 0.0;
    for (Index k = n; k < m.rank(); ++k)
    {
      sb += m.B_hat(k, 0) * m.B_hat(k, 0) * m.sigma(k);
      sc += m.C_hat(0, k) * m.C_hat(0, k) * m.sigma(k);
    }
    EXPECT_NEAR(induced_primal(m, n), std::sqrt(sb), 1e-12);
    EXPECT_NEAR(induced_dual(m, n), std::sqrt(sc), 1e-12);
  }
  const Index last = m.rank() - 1;
  EXPECT_NEAR(induced_primal(m, last), std::abs(m.B_hat(last, 0)) * std::sqrt(m.sigma(last)), 1e-14);
  EXPECT_NEAR(induced_dual(m, last), std::abs(m.C_hat(0, last)) * std::sqrt(m.sigma(last)), 1e-14);
}

TEST(HsvNorms, InducedNormsAreDual)
{
  oracle::Gen gen(2);
  TruncationModes p{row({3, 2, 1, 0.5}), gen.gaussian(4, 2), gen.gaussian(3, 4), std::nullopt};
  TruncationModes d{p.sigma, p.C_hat.transpose(), p.B_hat.transpose(), std::nullopt};
  for (Index n = 0; n <= 4; ++n)
  {
    EXPECT_NEAR(induced_primal(p, n), induced_dual(d, n), 1e-12);
  }
}

TEST(HsvNorms, MonotoneAndOrderedProperty)
{
  oracle::Gen gen(3);
  for (int trial = 0; trial < 100; ++trial)
  {
    const Index r = gen.integer(1, 40);
    Vector s(r);
    for (Index k = 0; k < r; ++k)
    {
      s(k) = std::pow(10.0, gen.uniform(-15, 2));
    }
    std::sort(s.data(), s.data() + r, std::greater<double>());
    const auto m = modes_from(s);
    const Index n_eff = gen.integer(1, r);
    for (Index n = 0; n < n_eff; ++n)
    {
      const double ha = hankel_norm(m, n), hs = hsh_approx(m, n, n_eff), hi = hinf_approx(m, n, n_eff);
      EXPECT_LE(ha, hs);
      EXPECT_LE(hs, hi);
      EXPECT_GE(ha, hankel_norm(m, n + 1));
      EXPECT_GE(hs, hsh_approx(m, n + 1, n_eff));
      EXPECT_GE(hi, hinf_approx(m, n + 1, n_eff));
    }
  }
}

TEST(RelativeError, Examples)
{
  const Matrix y = Matrix::Ones(1, 10);
  const auto m = modes_from(row({2, 1, 0.5}));
  const ErrorContext same{y, y, 0.1, m, 1, 3};
  EXPECT_EQ(relative_error(same, NormId::L2), kErrorFloor);
  EXPECT_EQ(relative_error(same, NormId::Linf), kErrorFloor);
  EXPECT_DOUBLE_EQ(relative_error(same, NormId::Hankel), 0.5);
  EXPECT_DOUBLE_EQ(relative_error(same, NormId::HSH), std::sqrt(2.0) * 1.0 / (std::sqrt(3.0) * 2.0));

  const Matrix empty;
  const ErrorContext unstable{y, empty, 0.1, m, 1, 3, false};
  for (auto id : kAllNorms)
  {
    if (id == NormId::H2)
    {
      continue;
    }
    EXPECT_EQ(relative_error(unstable, id), 1.0) << label(id);
    const auto e = evaluate(unstable, id);
    EXPECT_FALSE(e.valid);
    EXPECT_EQ(e.error, e.normalizer);
  }
}

TEST(RelativeError, NonFiniteRomIsInvalid)
{
  const Matrix y = Matrix::Ones(1, 4);
  Matrix yr = y;
  yr(0, 2) = std::numeric_limits<double>::infinity();
  const auto m = modes_from(row({1.0}));
  const ErrorContext ctx{y, yr, 0.1, m, 1, 1};
  EXPECT_FALSE(evaluate(ctx, NormId::L1).valid);
  EXPECT_EQ(relative_error(ctx, NormId::L1), 1.0);
}

TEST(RelativeError, ZeroNormalizerFails)
{
  const Matrix y = Matrix::Zero(1, 4);
  const auto m = modes_from(row({1.0}));
  const ErrorContext ctx{y, y, 0.1, m, 1, 1};
  EXPECT_THROW(evaluate(ctx, NormId::L2), InvalidArgument);
}

TEST(RelativeError, RangeProperty)
{
  oracle::Gen gen(4);
  for (int trial = 0; trial < 50; ++trial)
  {
    const Matrix y = gen.gaussian(2, 30), yr = gen.gaussian(2, 30) * gen.uniform(0, 10);
    Vector s(5);
    for (Index k = 0; k < 5; ++k)
    {
      s(k) = gen.uniform(0.1, 1);
    }
    std::sort(s.data(), s.data() + 5, std::greater<double>());
    TruncationModes m{s, gen.gaussian(5, 1), gen.gaussian(2, 5), Matrix(gen.gaussian(5, 5))};
    const ErrorContext ctx{y, yr, 0.01, m, gen.integer(1, 4), 100};
    for (auto id : kAllNorms)
    {
      const double e = relative_error(ctx, id);
      EXPECT_GE(e, kErrorFloor);
      EXPECT_LE(e, 1.0);
    }
  }
}

TEST(Compose, Examples)
{
  const std::vector<double> one{0.3};
  for (auto c : kAllCompositions)
  {
    EXPECT_EQ(parametric_compose(one, c), 0.3);
  }
  EXPECT_EQ(parametric_compose(std::vector<double>{3, 4}, Composition::L2), 5.0);
  EXPECT_EQ(parametric_compose(std::vector<double>{1, 2}, Composition::Linf), 2.0);
  EXPECT_EQ(parametric_compose(std::vector<double>{1, 2}, Composition::L1), 3.0);
  EXPECT_THROW(parametric_compose(std::vector<double>{}, Composition::L1), InvalidArgument);
}

TEST(Compose, RelativeDividesComposedNormalizers)
{
  const std::vector<NormEvaluation> e{{1.0, 10.0, true}, {3.0, 10.0, true}};
  EXPECT_DOUBLE_EQ(compose_relative(e, Composition::L1), 0.2);
  EXPECT_DOUBLE_EQ(compose_relative(e, Composition::L2), std::sqrt(10.0) / std::sqrt(200.0));
  EXPECT_DOUBLE_EQ(compose_relative(e, Composition::Linf), 0.3);
  const std::vector<NormEvaluation> bad{{1.0, 10.0, true}, {10.0, 10.0, false}};
  EXPECT_EQ(compose_relative(bad, Composition::Linf), 1.0);
  EXPECT_DOUBLE_EQ(compose_relative(bad, Composition::L1), 11.0 / 20.0);
}

TEST(Compose, MaxRssSumOrderingProperty)
{
  oracle::Gen gen(5);
  for (int trial = 0; trial < 200; ++trial)
  {
    std::vector<double> v(static_cast<std::size_t>(gen.integer(1, 20)));
    for (auto &x : v)
    {
      x = std::pow(10.0, gen.uniform(-16, 0));
    }
    const double mx = parametric_compose(v, Composition::Linf);
    const double rss = parametric_compose(v, Composition::L2);
    const double sum = parametric_compose(v, Composition::L1);
    EXPECT_LE(mx, rss * (1 + 1e-14));
    EXPECT_LE(rss, sum * (1 + 1e-14));
  }
}

TEST(NormIds, LabelsRoundTrip)
{
  for (auto id : kAllNorms)
  {
    EXPECT_EQ(parse_norm(label(id)), id);
  }
  EXPECT_FALSE(parse_norm("H3"));
  EXPECT_EQ(label(kAllNorms.front()), "L0");
  EXPECT_EQ(label(kAllNorms.back()), "HO");
}
