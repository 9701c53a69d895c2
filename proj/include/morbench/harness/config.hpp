// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "morbench/norms.hpp"
#include "morbench/system.hpp"
#include "morbench/thermal_block.hpp"

namespace morbench::harness
{

enum class Reducer
{
  PM,
  AB,
  DS,
  BT,
  BG
};

// Which Gramians feed a method: one of W_C, W_O, the pair, or the cross Gramian.
enum class Flavor
{
  WC,
  WO,
  WCWO,
  WX
};

struct Method
{
  Reducer reducer;
  Flavor flavor;

  friend bool operator==(const Method &, const Method &) = default;
};

// Row order of the score tables.
inline constexpr std::array<Method, 10> kAllMethods = {
  Method{Reducer::PM, Flavor::WC},   Method{Reducer::PM, Flavor::WO},
  Method{Reducer::AB, Flavor::WCWO}, Method{Reducer::AB, Flavor::WX},
  Method{Reducer::DS, Flavor::WCWO}, Method{Reducer::DS, Flavor::WX},
  Method{Reducer::BT, Flavor::WCWO}, Method{Reducer::BT, Flavor::WX},
  Method{Reducer::BG, Flavor::WCWO}, Method{Reducer::BG, Flavor::WX}};

inline std::string_view label(Reducer r)
{
  switch (r)
  {
    case Reducer::PM: return "PM";
    case Reducer::AB: return "AB";
    case Reducer::DS: return "DS";
    case Reducer::BT: return "BT";
    case Reducer::BG: return "BG";
  }
  return "?";
}

inline bool uses_cross_gramian(const Method &m) { return m.flavor == Flavor::WX; }

// Table row label, e.g. "BT(W_C,W_O)".
inline std::string row_label(const Method &m)
{
  static constexpr std::array<std::string_view, 4> args = {"W_C", "W_O", "W_C,W_O", "W_X"};
  return std::string(label(m.reducer)) + "(" +
         std::string(args[static_cast<std::size_t>(m.flavor)]) + ")";
}

// File-name token, e.g. "BT_WCWO".
inline std::string token(const Method &m)
{
  static constexpr std::array<std::string_view, 4> args = {"WC", "WO", "WCWO", "WX"};
  return std::string(label(m.reducer)) + "_" +
         std::string(args[static_cast<std::size_t>(m.flavor)]);
}

inline std::optional<Method> parse_method(std::string_view s)
{
  for (const auto &m : kAllMethods)
  {
    if (token(m) == s || row_label(m) == s)
    {
      return m;
    }
  }
  return std::nullopt;
}

struct ExperimentConfig
{
  thermal::Variant variant = thermal::Variant::Fixed;
  thermal::ThermalBlockConfig block;
  Index n_max = 50;
  Index tsvd_rank = 100;
  SimGrid grid{1e-3, 1000};
  Index test_samples = 10;
  std::uint64_t seed = 1;
  std::filesystem::path out = "morbench-out";
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<NormId> norms{kAllNorms.begin(), kAllNorms.end()};
  unsigned jobs = 1;
  bool export_artifacts = false;

  // Benchmark an imported system instead of the thermal block. All parameters of the sample
  // are `theta` (empty for P = 0), as in the fixed variant.
  std::optional<std::filesystem::path> system_dir;
  std::optional<ParameterPoint> theta;

  void validate() const
  {
    if (n_max < 1)
    {
      throw InvalidArgument("config: n_max must be at least 1");
    }
    if (tsvd_rank < n_max)
    {
      throw InvalidArgument("config: n_max must not exceed the tsvd rank");
    }
    if (test_samples < 1)
    {
      throw InvalidArgument("config: at least one test sample is required");
    }
    if (methods.empty() || norms.empty())
    {
      throw InvalidArgument("config: method and norm selections must be nonempty");
    }
    if (jobs < 1)
    {
      throw InvalidArgument("config: jobs must be at least 1");
    }
    grid.validate();
    if (!system_dir)
    {
      thermal::validate(block);
    }
  }

  std::string variant_label() const
  {
    return system_dir ? std::string("custom") : std::string(thermal::label(variant));
  }

  // Compositions written out: a single test point makes the three modes coincide.
  std::vector<Composition> compositions() const
  {
    if (system_dir || variant == thermal::Variant::Fixed)
    {
      return {Composition::L2};
    }
    return {kAllCompositions.begin(), kAllCompositions.end()};
  }
};

}  // namespace morbench::harness
