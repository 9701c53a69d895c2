// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "morbench/harness/config.hpp"
#include "morbench/system.hpp"
#include "morbench/thermal_block.hpp"

namespace morbench::harness
{

namespace detail
{

// Independent stream per purpose and index, derived from the run seed.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline constexpr std::uint64_t kTestStream = 0x7e57;
inline constexpr std::uint64_t kInputStream = 0x1a7u;

// 3 log-spaced values in [lower, upper].
inline std::vector<double> log_grid3(double lower, double upper)
{
  const double mid = std::sqrt(lower * upper);
  return {lower, mid, upper};
}

}  // namespace detail

// Logarithmic grid: single -> s in {1, sqrt 10, 10}; multi -> one-at-a-time grid of 3 values per
// parameter with the rest at sqrt 10 (3 * 4 points); fixed -> the fixed point.
inline std::vector<ParameterPoint> sample_training(thermal::Variant variant,
                                                   const thermal::ThermalBlockConfig &cfg = {})
{
  const auto grid = detail::log_grid3(cfg.theta_lower, cfg.theta_upper);
  std::vector<ParameterPoint> out;
  switch (variant)
  {
    case thermal::Variant::Fixed:
      out.push_back(thermal::variant_theta_fixed());
      break;
    case thermal::Variant::Single:
      for (double s : grid)
      {
        out.push_back(thermal::variant_theta_single(s, cfg));
      }
      break;
    case thermal::Variant::Multi:
    {
      const double centre = std::sqrt(cfg.theta_lower * cfg.theta_upper);
      for (Index p = 0; p < 4; ++p)
      {
        for (double s : grid)
        {
          Vector theta = Vector::Constant(4, centre);
          theta(p) = s;
          out.push_back(thermal::variant_theta_multi(ParameterPoint(theta), cfg));
        }
      }
      break;
    }
  }
  return out;
}

// Log-uniform draws: every coordinate is lower * (upper/lower)^U[0,1).
inline std::vector<ParameterPoint> sample_test(thermal::Variant variant, std::uint64_t seed,
                                               Index count = 10,
                                               const thermal::ThermalBlockConfig &cfg = {})
{
  if (variant == thermal::Variant::Fixed)
  {
    return {thermal::variant_theta_fixed()};
  }
  auto rng = detail::stream(seed, detail::kTestStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::log10(cfg.theta_lower);
  const double hi = std::log10(cfg.theta_upper);
  auto draw = [&] { return std::pow(10.0, lo + (hi - lo) * unit(rng)); };

  std::vector<ParameterPoint> out;
  for (Index i = 0; i < count; ++i)
  {
    if (variant == thermal::Variant::Single)
    {
      out.push_back(thermal::variant_theta_single(draw(), cfg));
    }
    else
    {
      Vector theta(4);
      for (Index p = 0; p < 4; ++p)
      {
        theta(p) = draw();
      }
      out.push_back(thermal::variant_theta_multi(ParameterPoint(theta), cfg));
    }
  }
  return out;
}

inline bool disjoint(const std::vector<ParameterPoint> &a, const std::vector<ParameterPoint> &b)
{
  for (const auto &p : a)
  {
    for (const auto &q : b)
    {
      if (p == q)
      {
        return false;
      }
    }
  }
  return true;
}

// Standard normal input, one value per channel and time step, seeded per test index.
inline Matrix random_input(Index inputs, Index steps, std::uint64_t seed, std::uint64_t index)
{
  auto rng = detail::stream(seed, detail::kInputStream, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix u(inputs, steps);
  for (Index k = 0; k < steps; ++k)
  {
    for (Index m = 0; m < inputs; ++m)
    {
      u(m, k) = normal(rng);
    }
  }
  return u;
}

}  // namespace morbench::harness
