// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "morbench/gramians.hpp"
#include "morbench/system.hpp"

namespace morbench
{

// Leading singular triplets, S nonincreasing. Each left singular vector is signed so that its
// entry of largest magnitude (first one on ties) is nonnegative; V follows the same flip.
struct TruncatedSvd
{
  Matrix U;
  Vector S;
  Matrix V;
};

inline TruncatedSvd tsvd(const Matrix &m, Index r_max)
{
  if (r_max < 1)
  {
    throw InvalidArgument("tsvd: rank must be at least one");
  }
  if (!m.allFinite())
  {
    throw InvalidArgument("tsvd: matrix is not finite");
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
  {
    throw ConvergenceFailure("tsvd: SVD did not converge");
  }
  const Index r = std::min<Index>(r_max, std::min(m.rows(), m.cols()));
  TruncatedSvd out{svd.matrixU().leftCols(r), svd.singularValues().head(r),
                   svd.matrixV().leftCols(r)};
  for (Index j = 0; j < r; ++j)
  {
    Index at = 0;
    out.U.col(j).cwiseAbs().maxCoeff(&at);
    if (out.U(at, j) < 0.0)
    {
      out.U.col(j) *= -1.0;
      out.V.col(j) *= -1.0;
    }
  }
  return out;
}

enum class ProjectionKind
{
  Galerkin,        // V = U^T, VU = I
  PetrovGalerkin,  // VU = I, V != U^T
  Oblique          // U^T U = I and V V^T = I, VU != I in general
};

// Reconstructing map U (N x r) and reducing map V (r x N); truncation keeps leading columns/rows.
struct ProjectionPair
{
  Matrix U;
  Matrix V;
  ProjectionKind kind = ProjectionKind::Galerkin;
  Vector order_weights;

  Index rank() const { return U.cols(); }

  ProjectionPair truncated(Index n) const
  {
    if (n < 1 || n > rank())
    {
      throw RankDeficient("projection truncated to order " + std::to_string(n), rank());
    }
    return ProjectionPair{U.leftCols(n), V.topRows(n), kind, order_weights.head(n)};
  }
};

struct BalancedRealization
{
  Vector hsv;                   // sigma_1 >= ... >= sigma_r >= 0
  Matrix B_bal;                 // r x M
  Matrix C_bal;                 // Q x r
  std::optional<Matrix> WZ_bal; // r x r, V W_Z U
  ProjectionPair projections;
  Index requested_rank = 0;

  Index rank() const { return hsv.size(); }
};

namespace detail
{

inline void require_kind(const GramianSet &g, std::initializer_list<GramianKind> allowed,
                         const char *who)
{
  for (auto k : allowed)
  {
    if (g.kind == k)
    {
      return;
    }
  }
  throw InvalidArgument(std::string(who) + ": unsupported Gramian kind " + to_string(g.kind));
}

inline Matrix square_root_factor(const Matrix &w, Index r_max)
{
  const auto t = tsvd(w, r_max);
  return t.U * t.S.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

inline double condition_number(const Matrix &m)
{
  Eigen::BDCSVD<Matrix> svd(m);
  const auto &s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= 0.0)
  {
    return std::numeric_limits<double>::infinity();
  }
  return s(0) / s(s.size() - 1);
}

inline const double kHsvCutoff = 1e-14;
inline const double kBreakdownCondition = 1e12;

}  // namespace detail

// Poor man's TBR: dominant singular vectors of one Gramian as Galerkin projection.
inline ProjectionPair pm(const Matrix &w, Index r_max)
{
  auto t = tsvd(w, r_max);
  Matrix v = t.U.transpose();
  return ProjectionPair{std::move(t.U), std::move(v), ProjectionKind::Galerkin, std::move(t.S)};
}

inline ProjectionPair pm(const GramianSet &w, Index r_max)
{
  detail::require_kind(w, {GramianKind::WC, GramianKind::WO}, "pm");
  return pm(w.matrix, r_max);
}

// Approximate balancing from W_C and W_O (modified POD): separate left singular vectors,
// no bi-orthogonalization.
inline ProjectionPair ab_wcwo(const Matrix &wc, const Matrix &wo, Index r_max)
{
  auto c = tsvd(wc, r_max);
  auto o = tsvd(wo, r_max);
  const Index r = std::min(c.U.cols(), o.U.cols());
  return ProjectionPair{c.U.leftCols(r), o.U.leftCols(r).transpose(), ProjectionKind::Oblique,
                        c.S.head(r)};
}

inline ProjectionPair ab_wcwo(const GramianSet &wc, const GramianSet &wo, Index r_max)
{
  detail::require_kind(wc, {GramianKind::WC}, "ab_wcwo");
  detail::require_kind(wo, {GramianKind::WO}, "ab_wcwo");
  return ab_wcwo(wc.matrix, wo.matrix, r_max);
}

// Approximate balancing from the cross Gramian: left/right singular vectors.
inline ProjectionPair ab_wx(const Matrix &wz, Index r_max)
{
  auto t = tsvd(wz, r_max);
  Matrix v = t.V.transpose();
  return ProjectionPair{std::move(t.U), std::move(v), ProjectionKind::Oblique, std::move(t.S)};
}

inline ProjectionPair ab_wx(const GramianSet &wz, Index r_max)
{
  detail::require_kind(wz, {GramianKind::WX, GramianKind::WZ}, "ab_wx");
  return ab_wx(wz.matrix, r_max);
}

namespace detail
{

inline ProjectionPair conjoined(const Matrix &left, const Matrix &right, Index r_max)
{
  Matrix joint(left.rows(), left.cols() + right.cols());
  joint << left, right;
  auto t = tsvd(joint, r_max);
  Matrix v = t.U.transpose();
  return ProjectionPair{std::move(t.U), std::move(v), ProjectionKind::Galerkin, std::move(t.S)};
}

}  // namespace detail

// Dominant subspaces: SVD of the singular-value weighted concatenation [U_C S_C, U_O S_O].
inline ProjectionPair ds(const Matrix &wc, const Matrix &wo, Index r_max)
{
  const auto c = tsvd(wc, r_max);
  const auto o = tsvd(wo, r_max);
  return detail::conjoined(c.U * c.S.asDiagonal(), o.U * o.S.asDiagonal(), r_max);
}

// Cross-Gramian dominant subspaces: [U_sv S, V_sv S].
inline ProjectionPair ds(const Matrix &wz, Index r_max)
{
  const auto t = tsvd(wz, r_max);
  return detail::conjoined(t.U * t.S.asDiagonal(), t.V * t.S.asDiagonal(), r_max);
}

inline ProjectionPair ds(const GramianSet &wc, const GramianSet &wo, Index r_max)
{
  detail::require_kind(wc, {GramianKind::WC}, "ds");
  detail::require_kind(wo, {GramianKind::WO}, "ds");
  return ds(wc.matrix, wo.matrix, r_max);
}

inline ProjectionPair ds(const GramianSet &wz, Index r_max)
{
  detail::require_kind(wz, {GramianKind::WX, GramianKind::WZ}, "ds");
  return ds(wz.matrix, r_max);
}

// Balanced POD / SVD-based square-root balancing. Not exactly balanced when the Gramian factors
// are truncated.
inline BalancedRealization balance_wcwo(const Matrix &wc, const Matrix &wo, Index r_max,
                                        const Matrix &B, const Matrix &C,
                                        const Matrix *wz = nullptr)
{
  if (wc.isZero(0.0) || wo.isZero(0.0))
  {
    throw InvalidArgument("balance_wcwo: all-zero Gramian");
  }
  const Matrix zc = detail::square_root_factor(wc, r_max);
  const Matrix zo = detail::square_root_factor(wo, r_max);
  const auto t = tsvd(zo.transpose() * zc, r_max);
  if (!(t.S(0) > 0.0))
  {
    throw InvalidArgument("balance_wcwo: Gramians have no joint range");
  }
  Index k = 0;
  while (k < t.S.size() && t.S(k) > detail::kHsvCutoff * t.S(0))
  {
    ++k;
  }
  const Vector hsv = t.S.head(k);
  const Vector inv_sqrt = hsv.cwiseSqrt().cwiseInverse();
  Matrix U = zc * t.V.leftCols(k) * inv_sqrt.asDiagonal();
  Matrix V = inv_sqrt.asDiagonal() * t.U.leftCols(k).transpose() * zo.transpose();

  BalancedRealization bal;
  bal.hsv = hsv;
  bal.B_bal = V * B;
  bal.C_bal = C * U;
  if (wz)
  {
    bal.WZ_bal = V * (*wz) * U;
  }
  bal.projections = ProjectionPair{std::move(U), std::move(V), ProjectionKind::PetrovGalerkin, hsv};
  bal.requested_rank = r_max;
  return bal;
}

// Cross-Gramian balancing: W_Z ~ U_sv S V_sv^T, U0 = U_sv S^{1/2}, V0 = S^{1/2} V_sv^T, then
// V = (V0 U0)^{-1} V0 so that V U0 = I. Evaluated as S^{-1/2} G^{-1} V_sv^T with G = V_sv^T U_sv;
// the rank is lowered until cond(G) <= 1e12.
inline BalancedRealization balance_wx(const Matrix &wz, Index r_max, const Matrix &B,
                                      const Matrix &C)
{
  if (wz.isZero(0.0))
  {
    throw InvalidArgument("balance_wx: all-zero Gramian");
  }
  const auto t = tsvd(wz, r_max);
  Index k = 0;
  while (k < t.S.size() && t.S(k) > detail::kHsvCutoff * t.S(0))
  {
    ++k;
  }
  const Matrix g = t.V.leftCols(k).transpose() * t.U.leftCols(k);
  Index r = k;
  while (r > 0 && !(detail::condition_number(g.topLeftCorner(r, r)) <= detail::kBreakdownCondition))
  {
    --r;
  }
  if (r == 0)
  {
    throw BalancingBreakdown("balance_wx: bi-orthogonal correction is ill-conditioned");
  }
  const Vector hsv = t.S.head(r);
  const Vector sqrt_s = hsv.cwiseSqrt();
  Matrix U = t.U.leftCols(r) * sqrt_s.asDiagonal();
  const Eigen::PartialPivLU<Matrix> lu(g.topLeftCorner(r, r));
  Matrix V = sqrt_s.cwiseInverse().asDiagonal() * lu.solve(t.V.leftCols(r).transpose());

  BalancedRealization bal;
  bal.hsv = hsv;
  bal.B_bal = V * B;
  bal.C_bal = C * U;
  bal.WZ_bal = V * wz * U;
  bal.projections = ProjectionPair{std::move(U), std::move(V), ProjectionKind::PetrovGalerkin, hsv};
  bal.requested_rank = r_max;
  return bal;
}

template <class Mat>
BalancedRealization balance_wcwo(const AffineLTISystem<Mat> &sys, const GramianSet &wc,
                                 const GramianSet &wo, Index r_max,
                                 const GramianSet *wz = nullptr)
{
  detail::require_kind(wc, {GramianKind::WC}, "balance_wcwo");
  detail::require_kind(wo, {GramianKind::WO}, "balance_wcwo");
  if (wz)
  {
    detail::require_kind(*wz, {GramianKind::WX, GramianKind::WZ}, "balance_wcwo");
  }
  return balance_wcwo(wc.matrix, wo.matrix, r_max, sys.B(), sys.C(), wz ? &wz->matrix : nullptr);
}

template <class Mat>
BalancedRealization balance_wx(const AffineLTISystem<Mat> &sys, const GramianSet &wz,
                               Index r_max)
{
  detail::require_kind(wz, {GramianKind::WX, GramianKind::WZ}, "balance_wx");
  return balance_wx(wz.matrix, r_max, sys.B(), sys.C());
}

// Balanced truncation: leading n modes in HSV order.
inline ProjectionPair bt(const BalancedRealization &bal, Index n)
{
  return bal.projections.truncated(n);
}

// Mode order of balanced gains: descending d_k = |c_k|^2 sigma_k, ties by sigma then index.
inline std::vector<Index> balanced_gains_order(const BalancedRealization &bal)
{
  const Index r = bal.rank();
  Vector d(r);
  for (Index k = 0; k < r; ++k)
  {
    d(k) = bal.C_bal.col(k).squaredNorm() * bal.hsv(k);
  }
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (d(a) != d(b))
    {
      return d(a) > d(b);
    }
    if (bal.hsv(a) != bal.hsv(b))
    {
      return bal.hsv(a) > bal.hsv(b);
    }
    return a < b;
  });
  return order;
}

// The full balanced realization with modes permuted into balanced-gains order.
inline ProjectionPair balanced_gains_pair(const BalancedRealization &bal)
{
  const auto order = balanced_gains_order(bal);
  const Index r = bal.rank();
  const auto &p = bal.projections;
  ProjectionPair out{Matrix(p.U.rows(), r), Matrix(r, p.V.cols()), p.kind, Vector(r)};
  for (Index j = 0; j < r; ++j)
  {
    const Index k = order[static_cast<std::size_t>(j)];
    out.U.col(j) = p.U.col(k);
    out.V.row(j) = p.V.row(k);
    out.order_weights(j) = bal.C_bal.col(k).squaredNorm() * bal.hsv(k);
  }
  return out;
}

inline ProjectionPair bg(const BalancedRealization &bal, Index n)
{
  return balanced_gains_pair(bal).truncated(n);
}

struct ReducedModel
{
  DenseSystem system;
  Index order = 0;
  std::string method;
};

// Projects every affine term: E_r = V E U, A_r,p = V A_p U, B_r = V B, C_r = C U.
template <class Mat>
ReducedModel reduce(const AffineLTISystem<Mat> &sys, const ProjectionPair &pair, Index n,
                    std::string method = {})
{
  if (n < 1)
  {
    throw InvalidArgument("reduce: order must be at least one");
  }
  if (n > pair.rank())
  {
    throw RankDeficient("reduce: order " + std::to_string(n) + " exceeds projection rank",
                        pair.rank());
  }
  if (pair.U.rows() != sys.states() || pair.V.cols() != sys.states())
  {
    throw InvalidArgument("reduce: projection does not match the state dimension");
  }
  const auto U = pair.U.leftCols(n);
  const auto V = pair.V.topRows(n);
  auto project = [&](const Mat &m) -> Matrix {
    const Matrix mu = m * U;
    return V * mu;
  };
  std::vector<Matrix> a;
  a.reserve(sys.A_terms().size());
  for (const auto &ap : sys.A_terms())
  {
    a.push_back(project(ap));
  }
  return ReducedModel{DenseSystem(project(sys.E()), std::move(a), V * sys.B(), sys.C() * U), n,
                      std::move(method)};
}

// Order-n model from a higher-order one built with the same pair: projections keep leading
// columns/rows, so every reduced matrix is its leading block.
inline ReducedModel truncate(const ReducedModel &rom, Index n)
{
  if (n < 1 || n > rom.order)
  {
    throw RankDeficient("truncate: order " + std::to_string(n) + " unavailable", rom.order);
  }
  const auto &s = rom.system;
  std::vector<Matrix> a;
  a.reserve(s.A_terms().size());
  for (const auto &ap : s.A_terms())
  {
    a.push_back(ap.topLeftCorner(n, n));
  }
  return ReducedModel{DenseSystem(s.E().topLeftCorner(n, n), std::move(a), s.B().topRows(n),
                                  s.C().leftCols(n)),
                      n, rom.method};
}

}  // namespace morbench
