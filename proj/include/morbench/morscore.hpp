// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "morbench/errors.hpp"
#include "morbench/norms.hpp"

namespace morbench
{

// Number system accuracy as a decimal exponent: eps_mach = 10^exponent.
// Double precision gives floor(log10(DBL_EPSILON)) = -16.
struct MachinePrecision
{
  int exponent = -16;

  static MachinePrecision from_epsilon(double eps)
  {
    if (!(eps > 0.0) || !(eps <= 1.0))
    {
      throw InvalidArgument("machine precision must lie in (0, 1]");
    }
    return MachinePrecision{static_cast<int>(std::floor(std::log10(eps)))};
  }

  static MachinePrecision double_precision() { return from_epsilon(DBL_EPSILON); }

  double epsilon() const { return std::pow(10.0, exponent); }
};

inline double phi_n(Index n, Index n_max)
{
  if (n_max < 1 || n < 1 || n > n_max)
  {
    throw InvalidArgument("phi_n: order outside 1..n_max");
  }
  return static_cast<double>(n) / static_cast<double>(n_max);
}

inline double phi_eps(double eps, MachinePrecision prec = {})
{
  if (prec.exponent >= 0)
  {
    return 0.0;
  }
  const double clamped = std::clamp(eps, prec.epsilon(), 1.0);
  return std::log10(clamped) / static_cast<double>(prec.exponent);
}

struct GraphPoint
{
  Index n = 0;
  double eps = 1.0;
};

struct ErrorGraph
{
  Index n_max = 0;
  std::vector<GraphPoint> points;
  std::string method;
  std::string norm;
  std::string variant;
  std::string composition;
};

// Area under (phi_n, phi_eps) by the trapezoid rule over the abscissae n = 1..n_max.
inline double morscore(const ErrorGraph &graph, MachinePrecision prec = {})
{
  if (graph.n_max < 1)
  {
    throw InvalidArgument("morscore: n_max must be positive");
  }
  std::vector<GraphPoint> pts = graph.points;
  std::sort(pts.begin(), pts.end(), [](const GraphPoint &a, const GraphPoint &b) { return a.n < b.n; });
  if (static_cast<Index>(pts.size()) != graph.n_max)
  {
    throw InvalidArgument("morscore: incomplete error graph");
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
  {
    if (pts[i].n != static_cast<Index>(i) + 1)
    {
      throw InvalidArgument("morscore: incomplete error graph (orders must be 1..n_max)");
    }
    if (!(pts[i].eps > 0.0) || !(pts[i].eps <= 1.0))
    {
      throw InvalidArgument("morscore: error outside (0, 1]");
    }
  }
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
  {
    const double dx = phi_n(pts[i].n, graph.n_max) - phi_n(pts[i - 1].n, graph.n_max);
    area += 0.5 * dx * (phi_eps(pts[i - 1].eps, prec) + phi_eps(pts[i].eps, prec));
  }
  return area;
}

// Unstable-ROM counts over the test sample: mean (L1), root-sum-square (L2) or max (Linf).
inline double aggregate_unstable(std::span<const double> counts, Composition mode)
{
  if (counts.empty())
  {
    throw InvalidArgument("aggregate_unstable: no counts");
  }
  if (mode == Composition::L1)
  {
    return parametric_compose(counts, mode) / static_cast<double>(counts.size());
  }
  return parametric_compose(counts, mode);
}

// Rows are methods, columns are norms plus the unstable count. NaN marks a failed cell.
struct MORscoreTable
{
  std::string variant;
  std::string composition;
  std::vector<std::string> rows;
  std::vector<NormId> norms;
  std::vector<std::vector<double>> mu;  // rows x norms
  std::vector<double> unstable;         // per row
  MachinePrecision precision;
  Index n_max = 0;
};

namespace detail
{

inline std::string full_precision(double v)
{
  if (std::isnan(v))
  {
    return "failed";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string two_decimals(double v)
{
  if (std::isnan(v))
  {
    return "failed";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Counts stay as they are: integers without decimals, averages with at most two.
inline std::string count_text(double v)
{
  if (std::isnan(v))
  {
    return "failed";
  }
  char buf[32];
  if (v == std::round(v))
  {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0')
  {
    s.pop_back();
  }
  return s;
}

}  // namespace detail

inline void write_csv(std::ostream &os, const MORscoreTable &t)
{
  os << "method";
  for (auto id : t.norms)
  {
    os << ',' << label(id);
  }
  os << ",unstable\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i)
  {
    os << t.rows[i];
    for (double v : t.mu[i])
    {
      os << ',' << detail::full_precision(v);
    }
    os << ',' << detail::full_precision(t.unstable[i]) << '\n';
  }
}

inline void write_markdown(std::ostream &os, const MORscoreTable &t)
{
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{""};
  for (auto id : t.norms)
  {
    header.emplace_back(label(id));
  }
  header.emplace_back("unstable");
  cells.push_back(header);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
  {
    std::vector<std::string> row{t.rows[i]};
    for (double v : t.mu[i])
    {
      row.push_back(detail::two_decimals(v));
    }
    row.push_back(detail::count_text(t.unstable[i]));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto &row : cells)
  {
    for (std::size_t j = 0; j < row.size(); ++j)
    {
      width[j] = std::max(width[j], row[j].size());
    }
  }
  auto emit = [&](const std::vector<std::string> &row) {
    os << '|';
    for (std::size_t j = 0; j < row.size(); ++j)
    {
      os << ' ' << (j == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[j]))
         << row[j] << " |";
    }
    os << std::left << '\n';
  };
  emit(cells.front());
  os << '|';
  for (std::size_t j = 0; j < width.size(); ++j)
  {
    os << (j == 0 ? ':' : '-') << std::string(width[j], '-') << (j == 0 ? '-' : ':') << '|';
  }
  os << '\n';
  for (std::size_t i = 1; i < cells.size(); ++i)
  {
    emit(cells[i]);
  }
}

}  // namespace morbench
