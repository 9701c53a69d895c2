// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "morbench/reducers.hpp"
#include "morbench/system.hpp"

namespace morbench
{

// Column order of the score tables.
enum class NormId
{
  L0,
  L1,
  L2,
  Linf,
  H2,
  Hinf,
  HSH,
  Hankel,
  IndPrimal,
  IndDual
};

inline constexpr std::array<NormId, 10> kAllNorms = {
  NormId::L0, NormId::L1,   NormId::L2,  NormId::Linf,      NormId::H2,
  NormId::Hinf, NormId::HSH, NormId::Hankel, NormId::IndPrimal, NormId::IndDual};

inline std::string_view label(NormId id)
{
  switch (id)
  {
    case NormId::L0: return "L0";
    case NormId::L1: return "L1";
    case NormId::L2: return "L2";
    case NormId::Linf: return "Linf";
    case NormId::H2: return "H2";
    case NormId::Hinf: return "Hinf";
    case NormId::HSH: return "HSH";
    case NormId::Hankel: return "Ha";
    case NormId::IndPrimal: return "HC";
    case NormId::IndDual: return "HO";
  }
  return "?";
}

inline std::optional<NormId> parse_norm(std::string_view s)
{
  for (auto id : kAllNorms)
  {
    if (label(id) == s)
    {
      return id;
    }
  }
  return std::nullopt;
}

inline bool is_signal_norm(NormId id)
{
  return id == NormId::L0 || id == NormId::L1 || id == NormId::L2 || id == NormId::Linf;
}

// The full system expressed in the (rank r) coordinates of one reduction method, in the order the
// method truncates: sigma_k plays the role of the Hankel singular value of mode k.
struct TruncationModes
{
  Vector sigma;
  Matrix B_hat;  // r x M
  Matrix C_hat;  // Q x r
  std::optional<Matrix> WZ_hat;

  Index rank() const { return sigma.size(); }
};

inline TruncationModes truncation_modes(const BalancedRealization &bal)
{
  return TruncationModes{bal.hsv, bal.B_bal, bal.C_bal, bal.WZ_bal};
}

// Balanced coordinates with modes permuted (e.g. into balanced-gains order).
inline TruncationModes truncation_modes(const BalancedRealization &bal,
                                        std::span<const Index> order)
{
  const Index r = static_cast<Index>(order.size());
  TruncationModes m{Vector(r), Matrix(r, bal.B_bal.cols()), Matrix(bal.C_bal.rows(), r),
                    std::nullopt};
  for (Index j = 0; j < r; ++j)
  {
    const Index k = order[static_cast<std::size_t>(j)];
    m.sigma(j) = bal.hsv(k);
    m.B_hat.row(j) = bal.B_bal.row(k);
    m.C_hat.col(j) = bal.C_bal.col(k);
  }
  if (bal.WZ_bal)
  {
    Matrix w(r, r);
    for (Index i = 0; i < r; ++i)
    {
      for (Index j = 0; j < r; ++j)
      {
        w(i, j) = (*bal.WZ_bal)(order[static_cast<std::size_t>(i)],
                                order[static_cast<std::size_t>(j)]);
      }
    }
    m.WZ_hat = std::move(w);
  }
  return m;
}

inline constexpr double kErrorFloor = 1e-16;

struct ErrorContext
{
  const Matrix &y_full;  // Q x K
  const Matrix &y_rom;   // Q x K, may be empty when the ROM is invalid
  double dt;
  const TruncationModes &modes;
  Index order;        // reduced order n
  Index full_states;  // N of the full model
  bool rom_valid = true;
  double floor = kErrorFloor;
};

// ---- signal norms -------------------------------------------------------------------------

namespace detail
{

inline void check_signals(const Matrix &y, const Matrix &yr)
{
  if (y.size() == 0)
  {
    throw InvalidArgument("signal norm: empty trajectory");
  }
  if (y.rows() != yr.rows() || y.cols() != yr.cols())
  {
    throw InvalidArgument("signal norm: trajectories differ in shape");
  }
}

}  // namespace detail

// Geometric mean of the entrywise absolute error, in log space with a 1e-300 floor.
inline double l0_approx(const Matrix &y, const Matrix &yr)
{
  detail::check_signals(y, yr);
  const auto mag = (y - yr).array().abs().max(1e-300);
  return std::exp(mag.log().mean());
}

inline double l1_signal(const Matrix &y, const Matrix &yr, double dt)
{
  detail::check_signals(y, yr);
  return dt * (y - yr).cwiseAbs().sum();
}

inline double l2_signal(const Matrix &y, const Matrix &yr, double dt)
{
  detail::check_signals(y, yr);
  return std::sqrt(dt) * (y - yr).norm();
}

inline double linf_signal(const Matrix &y, const Matrix &yr)
{
  detail::check_signals(y, yr);
  return (y - yr).cwiseAbs().maxCoeff();
}

// ---- Gramian based norms ------------------------------------------------------------------

// Largest modal value among the discarded modes n+1..r; zero when nothing is discarded.
inline double principal_discarded(const TruncationModes &modes, Index n)
{
  const Index r = modes.rank();
  if (n >= r)
  {
    return 0.0;
  }
  return modes.sigma.tail(r - std::max<Index>(n, 0)).maxCoeff();
}

inline Index effective_states(const ErrorContext &ctx)
{
  return std::min(ctx.full_states, ctx.modes.rank());
}

// sqrt(|Cbar_2 W_Z,22 Bbar_2|) with Cbar, Bbar the output-summed / input-summed balanced maps.
inline double h2_approx(const TruncationModes &modes, Index n)
{
  if (!modes.WZ_hat)
  {
    throw InvalidArgument("h2_approx: cross Gramian in modal coordinates is missing");
  }
  const Index r = modes.rank();
  if (n >= r)
  {
    return 0.0;
  }
  const Index d = r - n;
  const Vector c_bar = modes.C_hat.rightCols(d).colwise().sum().transpose();
  const Vector b_bar = modes.B_hat.bottomRows(d).rowwise().sum();
  const double v = c_bar.dot(modes.WZ_hat->bottomRightCorner(d, d) * b_bar);
  return std::sqrt(std::abs(v));
}

inline double h2_approx(const ErrorContext &ctx) { return h2_approx(ctx.modes, ctx.order); }

// 2 (N_eff - n) sigma_{n+1}.
inline double hinf_approx(const TruncationModes &modes, Index n, Index n_eff)
{
  if (n >= n_eff)
  {
    return 0.0;
  }
  return 2.0 * static_cast<double>(n_eff - n) * principal_discarded(modes, n);
}

inline double hinf_approx(const ErrorContext &ctx, Index n_eff)
{
  return hinf_approx(ctx.modes, ctx.order, n_eff);
}

// sqrt(N_eff - n) sigma_{n+1}.
inline double hsh_approx(const TruncationModes &modes, Index n, Index n_eff)
{
  if (n >= n_eff)
  {
    return 0.0;
  }
  return std::sqrt(static_cast<double>(n_eff - n)) * principal_discarded(modes, n);
}

inline double hsh_approx(const ErrorContext &ctx, Index n_eff)
{
  return hsh_approx(ctx.modes, ctx.order, n_eff);
}

inline double hankel_norm(const TruncationModes &modes, Index n)
{
  return principal_discarded(modes, n);
}

inline double hankel_norm(const ErrorContext &ctx) { return hankel_norm(ctx.modes, ctx.order); }

namespace detail
{

inline double sqrt_lambda_max(const Matrix &sym)
{
  if (sym.size() == 0)
  {
    return 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
  {
    throw ConvergenceFailure("induced norm: eigenvalue iteration failed");
  }
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

}  // namespace detail

// sqrt(lambda_max(B_2^T diag(sigma_2) B_2)).
inline double induced_primal(const TruncationModes &modes, Index n)
{
  const Index r = modes.rank();
  if (n >= r)
  {
    return 0.0;
  }
  const auto b2 = modes.B_hat.bottomRows(r - n);
  const Matrix g = b2.transpose() * modes.sigma.tail(r - n).asDiagonal() * b2;
  return detail::sqrt_lambda_max(g);
}

inline double induced_primal(const ErrorContext &ctx) { return induced_primal(ctx.modes, ctx.order); }

// sqrt(lambda_max(C_2 diag(sigma_2) C_2^T)).
inline double induced_dual(const TruncationModes &modes, Index n)
{
  const Index r = modes.rank();
  if (n >= r)
  {
    return 0.0;
  }
  const auto c2 = modes.C_hat.rightCols(r - n);
  const Matrix g = c2 * modes.sigma.tail(r - n).asDiagonal() * c2.transpose();
  return detail::sqrt_lambda_max(g);
}

inline double induced_dual(const ErrorContext &ctx) { return induced_dual(ctx.modes, ctx.order); }

// ---- relative errors ----------------------------------------------------------------------

// Absolute error of the ROM and the full-order normalizer for one norm.
struct NormEvaluation
{
  double error = 0.0;
  double normalizer = 0.0;
  bool valid = true;
};

inline NormEvaluation evaluate(const ErrorContext &ctx, NormId id)
{
  const Matrix zero = is_signal_norm(id) ? Matrix::Zero(ctx.y_full.rows(), ctx.y_full.cols())
                                         : Matrix();
  const Index n_eff = effective_states(ctx);
  const Index n = ctx.order;
  NormEvaluation out;
  switch (id)
  {
    case NormId::L0:
      out.normalizer = l0_approx(ctx.y_full, zero);
      break;
    case NormId::L1:
      out.normalizer = l1_signal(ctx.y_full, zero, ctx.dt);
      break;
    case NormId::L2:
      out.normalizer = l2_signal(ctx.y_full, zero, ctx.dt);
      break;
    case NormId::Linf:
      out.normalizer = linf_signal(ctx.y_full, zero);
      break;
    case NormId::H2:
      out.error = h2_approx(ctx.modes, n);
      out.normalizer = h2_approx(ctx.modes, 0);
      break;
    case NormId::Hinf:
      out.error = hinf_approx(ctx.modes, n, n_eff);
      out.normalizer = hinf_approx(ctx.modes, 0, n_eff);
      break;
    case NormId::HSH:
      out.error = hsh_approx(ctx.modes, n, n_eff);
      out.normalizer = hsh_approx(ctx.modes, 0, n_eff);
      break;
    case NormId::Hankel:
      out.error = hankel_norm(ctx.modes, n);
      out.normalizer = hankel_norm(ctx.modes, 0);
      break;
    case NormId::IndPrimal:
      out.error = induced_primal(ctx.modes, n);
      out.normalizer = induced_primal(ctx.modes, 0);
      break;
    case NormId::IndDual:
      out.error = induced_dual(ctx.modes, n);
      out.normalizer = induced_dual(ctx.modes, 0);
      break;
  }
  if (!(out.normalizer > 0.0))
  {
    throw InvalidArgument(std::string("relative error: zero full-order normalizer for ") +
                          std::string(label(id)));
  }
  if (!ctx.rom_valid)
  {
    out.error = out.normalizer;
    out.valid = false;
    return out;
  }
  switch (id)
  {
    case NormId::L0: out.error = l0_approx(ctx.y_full, ctx.y_rom); break;
    case NormId::L1: out.error = l1_signal(ctx.y_full, ctx.y_rom, ctx.dt); break;
    case NormId::L2: out.error = l2_signal(ctx.y_full, ctx.y_rom, ctx.dt); break;
    case NormId::Linf: out.error = linf_signal(ctx.y_full, ctx.y_rom); break;
    default: break;
  }
  if (!std::isfinite(out.error))
  {
    out.error = out.normalizer;
    out.valid = false;
  }
  return out;
}

inline double clamp_relative(double value, double floor = kErrorFloor)
{
  if (!std::isfinite(value))
  {
    return 1.0;
  }
  return std::clamp(value, floor, 1.0);
}

// Relative error in [floor, 1]; an invalid (unstable or failed) ROM scores 1.
inline double relative_error(const ErrorContext &ctx, NormId id)
{
  const auto e = evaluate(ctx, id);
  if (!e.valid)
  {
    return 1.0;
  }
  return clamp_relative(e.error / e.normalizer, ctx.floor);
}

// ---- parametric composition ---------------------------------------------------------------

enum class Composition
{
  L1,
  L2,
  Linf
};

inline constexpr std::array<Composition, 3> kAllCompositions = {Composition::L1, Composition::L2,
                                                                Composition::Linf};

inline std::string_view label(Composition c)
{
  switch (c)
  {
    case Composition::L1: return "L1";
    case Composition::L2: return "L2";
    case Composition::Linf: return "Linf";
  }
  return "?";
}

// Sum, root-sum-square or maximum over the parameter sample.
inline double parametric_compose(std::span<const double> values, Composition mode)
{
  if (values.empty())
  {
    throw InvalidArgument("parametric_compose: no values");
  }
  switch (mode)
  {
    case Composition::L1:
    {
      double s = 0.0;
      for (double v : values)
      {
        s += v;
      }
      return s;
    }
    case Composition::L2:
    {
      double s = 0.0;
      for (double v : values)
      {
        s += v * v;
      }
      return std::sqrt(s);
    }
    case Composition::Linf: return *std::max_element(values.begin(), values.end());
  }
  return 0.0;
}

// Relative parametric error: L1/L2 compose errors and normalizers identically and divide;
// Linf is the largest per-parameter relative error.
inline double compose_relative(std::span<const NormEvaluation> evals, Composition mode,
                               double floor = kErrorFloor)
{
  if (evals.empty())
  {
    throw InvalidArgument("compose_relative: no values");
  }
  std::vector<double> err, nrm, rel;
  for (const auto &e : evals)
  {
    err.push_back(e.valid ? e.error : e.normalizer);
    nrm.push_back(e.normalizer);
    rel.push_back(e.valid ? clamp_relative(e.error / e.normalizer, floor) : 1.0);
  }
  if (mode == Composition::Linf)
  {
    return parametric_compose(rel, mode);
  }
  return clamp_relative(parametric_compose(err, mode) / parametric_compose(nrm, mode), floor);
}

}  // namespace morbench
