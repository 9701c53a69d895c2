// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "morbench/system.hpp"

namespace morbench
{

enum class GramianKind
{
  WC,  // controllability
  WO,  // observability
  WX,  // cross (square systems)
  WZ   // non-symmetric cross (cross Gramian of the input/output averaged system)
};

inline std::string to_string(GramianKind k)
{
  switch (k)
  {
    case GramianKind::WC: return "WC";
    case GramianKind::WO: return "WO";
    case GramianKind::WX: return "WX";
    case GramianKind::WZ: return "WZ";
  }
  return "?";
}

// Impulse scales c_m (inputs) and d_q (outputs); empty vectors mean all ones.
struct ExcitationScales
{
  Vector input;
  Vector output;
};

struct GramianSet
{
  GramianKind kind = GramianKind::WC;
  Matrix matrix;
  Vector scales_c;
  Vector scales_d;
  SimGrid grid;
  std::vector<ParameterPoint> params_used;
};

// Failure while building the Gramian for one parameter of a sample.
class ParameterFailure : public Error
{
public:
  ParameterFailure(const std::string &what, ParameterPoint p)
    : Error(what + " at theta = " + p.str()), theta(std::move(p))
  {
  }
  ParameterPoint theta;
};

namespace detail
{

inline Vector resolve_scales(const Vector &given, Index count, const char *name)
{
  if (given.size() == 0)
  {
    return Vector::Ones(count);
  }
  if (given.size() != count)
  {
    throw InvalidArgument(std::string("empirical Gramian: ") + name + " scales have wrong length");
  }
  return given;
}

// dt * sum_{k=0}^{K-1} X_k Z_k^T over two zero-input block trajectories started from X0 and Z0
// (left-rectangle rule). Without a second stepper Z == X and the result is exactly symmetric.
// Samples are buffered and folded in with one product per chunk, always in time order.
template <class Mat>
Matrix accumulate_products(const ImplicitEulerStepper<Mat> &primal, Matrix X,
                           const ImplicitEulerStepper<Mat> *second, Matrix Z, Index steps)
{
  const bool symmetric = second == nullptr;
  const Index n = X.rows();
  const Index width = X.cols();
  if (!symmetric && (Z.rows() != n || Z.cols() != width))
  {
    throw InvalidArgument("empirical Gramian: mismatched primal/dual excitation blocks");
  }
  const double dt = primal.dt();
  const Index chunk = std::max<Index>(1, 256 / std::max<Index>(width, 1));
  Matrix bx(n, width * chunk);
  Matrix bz(symmetric ? 0 : n, width * chunk);
  Matrix w = Matrix::Zero(n, n);
  Index filled = 0;

  auto flush = [&] {
    if (filled == 0)
    {
      return;
    }
    const auto lx = bx.leftCols(filled * width);
    if (!lx.allFinite())
    {
      throw Divergence("empirical Gramian: trajectory is not finite");
    }
    if (symmetric)
    {
      w.selfadjointView<Eigen::Lower>().rankUpdate(lx, dt);
    }
    else
    {
      const auto lz = bz.leftCols(filled * width);
      if (!lz.allFinite())
      {
        throw Divergence("empirical Gramian: dual trajectory is not finite");
      }
      w.noalias() += dt * (lx * lz.transpose());
    }
    filled = 0;
  };

  for (Index k = 0; k < steps; ++k)
  {
    if (k > 0)
    {
      primal.advance(X);
      if (!symmetric)
      {
        second->advance(Z);
      }
    }
    bx.middleCols(filled * width, width) = X;
    if (!symmetric)
    {
      bz.middleCols(filled * width, width) = Z;
    }
    if (++filled == chunk)
    {
      flush();
    }
  }
  flush();
  if (symmetric)
  {
    w.triangularView<Eigen::StrictlyUpper>() = w.transpose();
  }
  return w;
}

}  // namespace detail

// W_C = sum_m int x^m x^m^T dt, x^m the response to the impulse c_m e_m
// (realized as x(0) = E^{-1} B c_m e_m with zero input).
template <class Mat>
GramianSet empirical_wc(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta,
                        const SimGrid &grid, const ExcitationScales &scales = {})
{
  grid.validate();
  GramianSet g{GramianKind::WC, {}, detail::resolve_scales(scales.input, sys.inputs(), "input"),
               detail::resolve_scales(scales.output, sys.outputs(), "output"), grid, {theta}};
  const ImplicitEulerStepper<Mat> stepper(sys.E(), sys.assemble(theta), sys.B(), grid.dt);
  Matrix x0 = sys.solve_mass(sys.B() * g.scales_c.asDiagonal());
  g.matrix = detail::accumulate_products<Mat>(stepper, std::move(x0), nullptr, {}, grid.steps);
  return g;
}

// W_O from dual impulse responses: E^T z' = A^T z + C^T d_q e_q delta(t).
template <class Mat>
GramianSet empirical_wo(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta,
                        const SimGrid &grid, const ExcitationScales &scales = {})
{
  grid.validate();
  GramianSet g{GramianKind::WO, {}, detail::resolve_scales(scales.input, sys.inputs(), "input"),
               detail::resolve_scales(scales.output, sys.outputs(), "output"), grid, {theta}};
  const auto dual = sys.dual();
  const ImplicitEulerStepper<Mat> stepper(dual.E(), dual.assemble(theta), dual.B(), grid.dt);
  Matrix z0 = dual.solve_mass(dual.B() * g.scales_d.asDiagonal());
  g.matrix = detail::accumulate_products<Mat>(stepper, std::move(z0), nullptr, {}, grid.steps);
  return g;
}

namespace detail
{

template <class Mat>
Matrix cross_product(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta,
                     const SimGrid &grid, const Matrix &b, const Matrix &ct)
{
  const auto dual = sys.dual();
  const ImplicitEulerStepper<Mat> primal(sys.E(), sys.assemble(theta), sys.B(), grid.dt);
  const ImplicitEulerStepper<Mat> adjoint(dual.E(), dual.assemble(theta), dual.B(), grid.dt);
  return accumulate_products<Mat>(primal, sys.solve_mass(b), &adjoint, dual.solve_mass(ct),
                                  grid.steps);
}

}  // namespace detail

// W_X = sum_m int x^m z^m^T dt; square systems only.
template <class Mat>
GramianSet empirical_wx(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta,
                        const SimGrid &grid, const ExcitationScales &scales = {})
{
  grid.validate();
  if (sys.inputs() != sys.outputs())
  {
    throw InvalidArgument("empirical_wx: system is not square (M != Q); use empirical_wz");
  }
  GramianSet g{GramianKind::WX, {}, detail::resolve_scales(scales.input, sys.inputs(), "input"),
               detail::resolve_scales(scales.output, sys.outputs(), "output"), grid, {theta}};
  g.matrix = detail::cross_product(sys, theta, grid, sys.B() * g.scales_c.asDiagonal(),
                                   sys.C().transpose() * g.scales_d.asDiagonal());
  return g;
}

// W_Z: cross Gramian of (A, Bbar = sum_m c_m B_m, Cbar = sum_q d_q C_q, E); one primal and one
// dual run.
template <class Mat>
GramianSet empirical_wz(const AffineLTISystem<Mat> &sys, const ParameterPoint &theta,
                        const SimGrid &grid, const ExcitationScales &scales = {})
{
  grid.validate();
  GramianSet g{GramianKind::WZ, {}, detail::resolve_scales(scales.input, sys.inputs(), "input"),
               detail::resolve_scales(scales.output, sys.outputs(), "output"), grid, {theta}};
  const Matrix b_bar = sys.B() * g.scales_c;
  const Matrix c_bar_t = sys.C().transpose() * g.scales_d;
  g.matrix = detail::cross_product(sys, theta, grid, b_bar, c_bar_t);
  return g;
}

template <class Mat>
GramianSet empirical_gramian(GramianKind kind, const AffineLTISystem<Mat> &sys,
                             const ParameterPoint &theta, const SimGrid &grid,
                             const ExcitationScales &scales = {})
{
  switch (kind)
  {
    case GramianKind::WC: return empirical_wc(sys, theta, grid, scales);
    case GramianKind::WO: return empirical_wo(sys, theta, grid, scales);
    case GramianKind::WX: return empirical_wx(sys, theta, grid, scales);
    case GramianKind::WZ: return empirical_wz(sys, theta, grid, scales);
  }
  throw InvalidArgument("unknown Gramian kind");
}

// Sum of per-parameter Gramians over the sample, accumulated in sample order.
template <class Mat, class Builder>
GramianSet parametric_average(Builder &&builder, const AffineLTISystem<Mat> &sys,
                              std::span<const ParameterPoint> sample, const SimGrid &grid,
                              const ExcitationScales &scales = {})
{
  if (sample.empty())
  {
    throw InvalidArgument("parametric_average: empty parameter sample");
  }
  GramianSet total;
  for (std::size_t i = 0; i < sample.size(); ++i)
  {
    GramianSet g;
    try
    {
      g = builder(sys, sample[i], grid, scales);
    }
    catch (const Error &e)
    {
      throw ParameterFailure(e.what(), sample[i]);
    }
    if (i == 0)
    {
      total = std::move(g);
    }
    else
    {
      total.matrix += g.matrix;
      total.params_used.push_back(sample[i]);
    }
  }
  return total;
}

template <class Mat>
GramianSet parametric_average(GramianKind kind, const AffineLTISystem<Mat> &sys,
                              std::span<const ParameterPoint> sample, const SimGrid &grid,
                              const ExcitationScales &scales = {})
{
  return parametric_average(
    [kind](const AffineLTISystem<Mat> &s, const ParameterPoint &p, const SimGrid &gr,
           const ExcitationScales &sc) { return empirical_gramian(kind, s, p, gr, sc); },
    sys, sample, grid, scales);
}

}  // namespace morbench
