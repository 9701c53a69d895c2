// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "morbench/harness/experiment.hpp"
#include "morbench/matrix_market.hpp"
#include "morbench/morscore.hpp"

namespace morbench::harness
{

inline constexpr const char *kVersion = "0.1.0";

namespace detail
{

inline std::ofstream open_out(const std::filesystem::path &path)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
  {
    throw Error("cannot open " + path.string() + " for writing");
  }
  return os;
}

inline nlohmann::ordered_json to_json(const ParameterPoint &p)
{
  auto a = nlohmann::ordered_json::array();
  for (Index i = 0; i < p.size(); ++i)
  {
    a.push_back(p[i]);
  }
  return a;
}

}  // namespace detail

inline std::string table_stem(const MORscoreTable &t)
{
  return "morscore_" + t.variant + "_" + t.composition;
}

inline std::string graph_file(const GraphEntry &g)
{
  return "errorgraph_" + token(g.method) + "_" + std::string(label(g.norm)) + "_" +
         std::string(label(g.composition)) + ".csv";
}

inline void write_errorgraph(std::ostream &os, const ErrorGraph &g)
{
  os << "n,eps\n";
  for (const auto &p : g.points)
  {
    os << p.n << ',' << morbench::detail::full_precision(p.eps) << '\n';
  }
}

// Reads "n,eps" rows; n_max is the largest order present.
inline ErrorGraph read_errorgraph(std::istream &is)
{
  ErrorGraph g;
  std::string line;
  if (!std::getline(is, line) || line.rfind("n,", 0) != 0)
  {
    throw InvalidArgument("error graph: missing 'n,eps' header");
  }
  while (std::getline(is, line))
  {
    if (line.empty() || line == "\r")
    {
      continue;
    }
    std::istringstream row(line);
    GraphPoint p;
    char comma = 0;
    if (!(row >> p.n >> comma >> p.eps) || comma != ',')
    {
      throw InvalidArgument("error graph: malformed row '" + line + "'");
    }
    g.points.push_back(p);
    g.n_max = std::max(g.n_max, p.n);
  }
  return g;
}

inline ErrorGraph read_errorgraph_file(const std::filesystem::path &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw InvalidArgument("cannot open " + path.string());
  }
  return read_errorgraph(is);
}

inline nlohmann::ordered_json manifest(const ExperimentResult &res,
                                       const std::vector<std::string> &files)
{
  const auto &c = res.config;
  nlohmann::ordered_json j;
  j["tool"] = "morbench";
  j["version"] = kVersion;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
#if defined(__VERSION__)
  j["compiler"] = __VERSION__;
#endif
  j["variant"] = res.benchmark.variant;
  j["seed"] = c.seed;
  auto &cfg = j["config"];
  if (c.system_dir)
  {
    cfg["system"] = c.system_dir->string();
  }
  else
  {
    cfg["grid_n"] = c.block.grid_n;
    cfg["circle_radius"] = c.block.circle_radius;
  }
  cfg["n_max"] = c.n_max;
  cfg["tsvd_rank"] = c.tsvd_rank;
  cfg["dt"] = c.grid.dt;
  cfg["steps"] = c.grid.steps;
  cfg["test_samples"] = c.test_samples;
  auto methods = nlohmann::ordered_json::array();
  for (const auto &m : c.methods)
  {
    methods.push_back(token(m));
  }
  cfg["methods"] = methods;
  auto norms = nlohmann::ordered_json::array();
  for (auto n : c.norms)
  {
    norms.push_back(std::string(label(n)));
  }
  cfg["norms"] = norms;

  const auto &sys = *res.benchmark.system;
  j["system"] = {{"N", sys.states()}, {"M", sys.inputs()}, {"Q", sys.outputs()},
                 {"P", sys.parameters()}};
  auto thetas = [](const std::vector<ParameterPoint> &ps) {
    auto a = nlohmann::ordered_json::array();
    for (const auto &p : ps)
    {
      a.push_back(detail::to_json(p));
    }
    return a;
  };
  j["training"] = thetas(res.benchmark.training);
  j["test"] = thetas(res.benchmark.test);

  auto models = nlohmann::ordered_json::array();
  for (const auto &m : res.models)
  {
    nlohmann::ordered_json e;
    e["method"] = token(m.method);
    e["rank"] = m.failure ? 0 : m.pair.rank();
    if (m.failure)
    {
      e["failure"] = *m.failure;
    }
    models.push_back(e);
  }
  j["methods"] = models;
  for (const auto &[name, err] : {std::pair{"W_C", &res.gramians.wc_error},
                                  std::pair{"W_O", &res.gramians.wo_error},
                                  std::pair{"W_Z", &res.gramians.wz_error}})
  {
    if (!err->empty())
    {
      j["gramian_failures"][name] = *err;
    }
  }
  j["files"] = files;
  return j;
}

// Writes tables, error graphs and manifest.json into dir (created if missing); returns the
// written file names. With export_artifacts, the system, Gramians and full-order ROMs are
// also written as Matrix Market files.
inline std::vector<std::string> emit(const ExperimentResult &res, const std::filesystem::path &dir)
{
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  for (const auto &t : res.tables)
  {
    {
      auto os = detail::open_out(dir / (table_stem(t) + ".csv"));
      write_csv(os, t);
    }
    {
      auto os = detail::open_out(dir / (table_stem(t) + ".md"));
      write_markdown(os, t);
    }
    files.push_back(table_stem(t) + ".csv");
    files.push_back(table_stem(t) + ".md");
  }
  for (const auto &g : res.graphs)
  {
    if (!g.graph)
    {
      continue;
    }
    auto os = detail::open_out(dir / graph_file(g));
    write_errorgraph(os, *g.graph);
    files.push_back(graph_file(g));
  }
  if (res.config.export_artifacts)
  {
    mm::write_system(dir / "system", *res.benchmark.system);
    files.push_back("system/");
    std::filesystem::create_directories(dir / "gramians");
    for (const auto &[name, g] : {std::pair{"WC", &res.gramians.wc},
                                  std::pair{"WO", &res.gramians.wo},
                                  std::pair{"WZ", &res.gramians.wz}})
    {
      if (*g)
      {
        mm::write_file(dir / "gramians" / (std::string(name) + ".mtx"), (*g)->matrix);
        files.push_back("gramians/" + std::string(name) + ".mtx");
      }
    }
    for (const auto &m : res.models)
    {
      if (m.rom)
      {
        mm::write_system(dir / "roms" / token(m.method), m.rom->system);
        files.push_back("roms/" + token(m.method) + "/");
      }
    }
  }
  files.push_back("manifest.json");
  auto os = detail::open_out(dir / "manifest.json");
  os << manifest(res, files).dump(2) << '\n';
  return files;
}

}  // namespace morbench::harness
