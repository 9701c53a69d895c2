// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "morbench/system.hpp"

// Thermal block: heat equation d_t u = div(kappa grad u) on the unit square with four circular
// inclusions of parametric conductivity, heat inflow through the left edge, insulated top and
// bottom, zero temperature on the right edge and the mean temperature of each inclusion as output.
//
// Cell-centred finite differences: node (i, j) sits at ((i+1/2)h, (j+1/2)h), h = 1/grid_n, and has
// index j*grid_n + i. Face conductivities are arithmetic means of the two node conductivities,
// so A(theta) = theta_0 A_bg + sum_p theta_p A_p is exact and symmetric negative definite.

namespace morbench::thermal
{

struct Point
{
  double x = 0.0;
  double y = 0.0;
};

struct ThermalBlockConfig
{
  Index grid_n = 16;
  double circle_radius = 0.2;
  std::array<Point, 4> circle_centers = {Point{0.25, 0.25}, Point{0.75, 0.25}, Point{0.25, 0.75},
                                         Point{0.75, 0.75}};
  double theta_lower = 1.0;
  double theta_upper = 10.0;
  double theta0 = 1.0;

  double spacing() const { return 1.0 / static_cast<double>(grid_n); }
  Index states() const { return grid_n * grid_n; }
  Point node(Index k) const
  {
    const double h = spacing();
    return Point{(static_cast<double>(k % grid_n) + 0.5) * h,
                 (static_cast<double>(k / grid_n) + 0.5) * h};
  }
};

// Node labels: 0 = background, p = 1..4 for nodes whose centre lies in circle p.
inline std::vector<int> region_labels(const ThermalBlockConfig &cfg)
{
  std::vector<int> labels(static_cast<std::size_t>(cfg.states()), 0);
  for (Index k = 0; k < cfg.states(); ++k)
  {
    const Point q = cfg.node(k);
    for (int p = 0; p < 4; ++p)
    {
      const Point c = cfg.circle_centers[static_cast<std::size_t>(p)];
      if (std::hypot(q.x - c.x, q.y - c.y) < cfg.circle_radius)
      {
        labels[static_cast<std::size_t>(k)] = p + 1;
      }
    }
  }
  return labels;
}

inline void validate(const ThermalBlockConfig &cfg)
{
  if (cfg.grid_n < 8)
  {
    throw InvalidArgument("thermal block: grid_n must be at least 8");
  }
  const double r = cfg.circle_radius;
  if (!(r > 0.0))
  {
    throw InvalidArgument("thermal block: circle radius must be positive");
  }
  for (std::size_t p = 0; p < 4; ++p)
  {
    const Point c = cfg.circle_centers[p];
    if (c.x - r <= 0.0 || c.x + r >= 1.0 || c.y - r <= 0.0 || c.y + r >= 1.0)
    {
      throw InvalidArgument("thermal block: circle " + std::to_string(p + 1) +
                            " touches the domain boundary");
    }
    for (std::size_t q = p + 1; q < 4; ++q)
    {
      const Point d = cfg.circle_centers[q];
      if (std::hypot(c.x - d.x, c.y - d.y) <= 2.0 * r)
      {
        throw InvalidArgument("thermal block: circles " + std::to_string(p + 1) + " and " +
                              std::to_string(q + 1) + " overlap");
      }
    }
  }
  const auto labels = region_labels(cfg);
  for (int p = 1; p <= 4; ++p)
  {
    if (std::find(labels.begin(), labels.end(), p) == labels.end())
    {
      throw InvalidArgument("thermal block: circle " + std::to_string(p) +
                            " contains no grid node at this resolution");
    }
  }
}

namespace detail
{

// Visits every conductance of the stencil: interior faces (a, b) and the Dirichlet half-faces on
// the right edge (b = -1). face_weight is the geometric factor multiplying the conductivity.
template <class F>
void for_each_face(const ThermalBlockConfig &cfg, F &&face)
{
  const Index n = cfg.grid_n;
  const double h2 = 1.0 / (cfg.spacing() * cfg.spacing());
  for (Index j = 0; j < n; ++j)
  {
    for (Index i = 0; i < n; ++i)
    {
      const Index a = j * n + i;
      if (i + 1 < n)
      {
        face(a, a + 1, h2);
      }
      else
      {
        face(a, Index{-1}, 2.0 * h2);
      }
      if (j + 1 < n)
      {
        face(a, a + n, h2);
      }
    }
  }
}

inline void add_face(std::vector<Eigen::Triplet<double>> &t, Index a, Index b, double w)
{
  t.emplace_back(a, a, -w);
  if (b >= 0)
  {
    t.emplace_back(b, b, -w);
    t.emplace_back(a, b, w);
    t.emplace_back(b, a, w);
  }
}

}  // namespace detail

// E = I, A_0 = theta_0 * background conductances, A_p = conductances of circle p, B = inflow 1/h
// on the left column, C = mean over each circle.
inline SparseSystem build(const ThermalBlockConfig &cfg)
{
  validate(cfg);
  const Index n = cfg.grid_n;
  const Index N = cfg.states();
  const auto labels = region_labels(cfg);

  std::array<std::vector<Eigen::Triplet<double>>, 5> terms;
  detail::for_each_face(cfg, [&](Index a, Index b, double w) {
    const auto la = static_cast<std::size_t>(labels[static_cast<std::size_t>(a)]);
    if (b < 0)
    {
      detail::add_face(terms[la], a, b, w);
      return;
    }
    const auto lb = static_cast<std::size_t>(labels[static_cast<std::size_t>(b)]);
    detail::add_face(terms[la], a, b, 0.5 * w);
    detail::add_face(terms[lb], a, b, 0.5 * w);
  });

  std::vector<SparseMatrix> a_terms;
  for (std::size_t p = 0; p < 5; ++p)
  {
    SparseMatrix m(N, N);
    m.setFromTriplets(terms[p].begin(), terms[p].end());
    if (p == 0)
    {
      m *= cfg.theta0;
    }
    a_terms.push_back(std::move(m));
  }

  Matrix B = Matrix::Zero(N, 1);
  for (Index j = 0; j < n; ++j)
  {
    B(j * n, 0) = 1.0 / cfg.spacing();
  }

  Matrix C = Matrix::Zero(4, N);
  for (int p = 1; p <= 4; ++p)
  {
    double count = 0.0;
    for (int l : labels)
    {
      count += (l == p) ? 1.0 : 0.0;
    }
    for (Index k = 0; k < N; ++k)
    {
      if (labels[static_cast<std::size_t>(k)] == p)
      {
        C(p - 1, k) = 1.0 / count;
      }
    }
  }

  SparseMatrix E(N, N);
  E.setIdentity();
  return SparseSystem(std::move(E), std::move(a_terms), std::move(B), std::move(C));
}

// Conductivity-weighted operator assembled directly from kappa(x) for one parameter.
inline SparseMatrix assemble_direct(const ThermalBlockConfig &cfg, const ParameterPoint &theta)
{
  validate(cfg);
  if (theta.size() != 4)
  {
    throw InvalidArgument("thermal block: parameter must have four components");
  }
  const auto labels = region_labels(cfg);
  auto kappa = [&](Index k) {
    const int l = labels[static_cast<std::size_t>(k)];
    return l == 0 ? cfg.theta0 : theta[l - 1];
  };
  std::vector<Eigen::Triplet<double>> t;
  detail::for_each_face(cfg, [&](Index a, Index b, double w) {
    const double k = b < 0 ? kappa(a) : 0.5 * (kappa(a) + kappa(b));
    detail::add_face(t, a, b, k * w);
  });
  SparseMatrix m(cfg.states(), cfg.states());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

enum class Variant
{
  Fixed,
  Single,
  Multi
};

inline std::string_view label(Variant v)
{
  switch (v)
  {
    case Variant::Fixed: return "fixed";
    case Variant::Single: return "single";
    case Variant::Multi: return "multi";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s)
{
  for (auto v : {Variant::Fixed, Variant::Single, Variant::Multi})
  {
    if (label(v) == s)
    {
      return v;
    }
  }
  return std::nullopt;
}

// theta_1/5 = 2 theta_2/5 = 3 theta_3/5 = 4 theta_4/5 = s.
inline Vector variant_ratios()
{
  Vector r(4);
  r << 5.0, 5.0 / 2.0, 5.0 / 3.0, 5.0 / 4.0;
  return r;
}

inline ParameterPoint variant_theta_fixed() { return ParameterPoint(std::sqrt(10.0) * variant_ratios()); }

inline ParameterPoint variant_theta_single(double s, const ThermalBlockConfig &cfg = {})
{
  if (!(s >= cfg.theta_lower && s <= cfg.theta_upper))
  {
    throw InvalidArgument("thermal block: single parameter outside its domain");
  }
  return ParameterPoint(s * variant_ratios());
}

inline ParameterPoint variant_theta_multi(const ParameterPoint &theta,
                                          const ThermalBlockConfig &cfg = {})
{
  if (theta.size() != 4 || (theta.theta.array() < cfg.theta_lower).any() ||
      (theta.theta.array() > cfg.theta_upper).any())
  {
    throw InvalidArgument("thermal block: parameter outside [lower, upper]^4");
  }
  return theta;
}

}  // namespace morbench::thermal
