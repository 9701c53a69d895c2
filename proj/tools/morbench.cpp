// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

// morbench command line: run the benchmark sweep, rescore error graphs, export systems.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morbench/morbench.hpp"

namespace fs = std::filesystem;
using namespace morbench;

namespace
{

std::vector<std::string> split_list(const std::vector<std::string> &items)
{
  std::vector<std::string> out;
  for (const auto &item : items)
  {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
    {
      if (!part.empty())
      {
        out.push_back(part);
      }
    }
  }
  return out;
}

struct RunOptions
{
  std::string variant = "fixed";
  long long grid_n = 16;
  long long n_max = 50;
  long long tsvd_rank = 100;
  std::uint64_t seed = 1;
  std::string out = "morbench-out";
  std::vector<std::string> methods;
  std::vector<std::string> norms;
  double dt = 1e-3;
  double horizon = 1.0;
  long long test_samples = 10;
  unsigned jobs = 1;
  double radius = 0.2;
  std::string system;
  std::vector<double> theta;
  bool export_artifacts = false;
};

harness::ExperimentConfig to_config(const RunOptions &o)
{
  harness::ExperimentConfig cfg;
  const auto variant = thermal::parse_variant(o.variant);
  if (!variant)
  {
    throw InvalidArgument("unknown variant '" + o.variant + "'");
  }
  cfg.variant = *variant;
  cfg.block.grid_n = o.grid_n;
  cfg.block.circle_radius = o.radius;
  cfg.n_max = o.n_max;
  cfg.tsvd_rank = o.tsvd_rank;
  cfg.grid = SimGrid::over(o.horizon, o.dt);
  cfg.test_samples = o.test_samples;
  cfg.seed = o.seed;
  cfg.out = o.out;
  cfg.jobs = o.jobs;
  cfg.export_artifacts = o.export_artifacts;
  if (!o.methods.empty())
  {
    cfg.methods.clear();
    for (const auto &m : split_list(o.methods))
    {
      const auto id = harness::parse_method(m);
      if (!id)
      {
        throw InvalidArgument("unknown method '" + m + "'");
      }
      cfg.methods.push_back(*id);
    }
    // Table rows always follow the canonical order.
    std::vector<harness::Method> ordered;
    for (const auto &m : harness::kAllMethods)
    {
      if (std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end())
      {
        ordered.push_back(m);
      }
    }
    cfg.methods = ordered;
  }
  if (!o.norms.empty())
  {
    std::vector<NormId> picked;
    for (const auto &n : split_list(o.norms))
    {
      const auto id = parse_norm(n);
      if (!id)
      {
        throw InvalidArgument("unknown norm '" + n + "'");
      }
      picked.push_back(*id);
    }
    cfg.norms.clear();
    for (auto id : kAllNorms)
    {
      if (std::find(picked.begin(), picked.end(), id) != picked.end())
      {
        cfg.norms.push_back(id);
      }
    }
  }
  if (!o.system.empty())
  {
    cfg.system_dir = fs::path(o.system);
    if (!o.theta.empty())
    {
      cfg.theta = ParameterPoint(Eigen::Map<const Vector>(o.theta.data(),
                                                          static_cast<Index>(o.theta.size())));
    }
  }
  return cfg;
}

int run(const RunOptions &o)
{
  const auto cfg = to_config(o);
  const auto res = harness::run_experiment(cfg);
  const auto files = harness::emit(res, cfg.out);
  for (const auto &m : res.models)
  {
    if (m.failure)
    {
      std::cerr << "warning: " << harness::row_label(m.method) << " failed: " << *m.failure
                << '\n';
    }
  }
  for (const auto &t : res.tables)
  {
    std::cout << "## " << t.variant << " / " << t.composition << '\n';
    write_markdown(std::cout, t);
  }
  std::cout << "wrote " << files.size() << " files to " << cfg.out.string() << '\n';
  return 0;
}

int score(const std::vector<std::string> &inputs, long long n_max, int exponent)
{
  std::vector<fs::path> files;
  for (const auto &in : inputs)
  {
    const fs::path p(in);
    if (fs::is_directory(p))
    {
      std::vector<fs::path> found;
      for (const auto &e : fs::directory_iterator(p))
      {
        const auto name = e.path().filename().string();
        if (name.rfind("errorgraph_", 0) == 0 && e.path().extension() == ".csv")
        {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    }
    else
    {
      files.push_back(p);
    }
  }
  if (files.empty())
  {
    throw InvalidArgument("score: no error graph files given");
  }
  std::cout << "file,n_max,mu\n";
  for (const auto &f : files)
  {
    auto g = harness::read_errorgraph_file(f);
    if (n_max > 0)
    {
      g.n_max = n_max;
    }
    const double mu = morscore(g, MachinePrecision{exponent});
    std::cout << f.filename().string() << ',' << g.n_max << ','
              << morbench::detail::full_precision(mu) << '\n';
  }
  return 0;
}

int export_system(long long grid_n, double radius, const std::string &out)
{
  thermal::ThermalBlockConfig cfg;
  cfg.grid_n = grid_n;
  cfg.circle_radius = radius;
  mm::write_system(out, thermal::build(cfg));
  std::cout << "wrote thermal block (N = " << cfg.states() << ") to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"morbench: empirical-Gramian model reduction benchmark"};
  app.set_config("--config", "", "TOML/INI file with option values ([run], [score] sections)");
  app.require_subcommand(1);

  RunOptions ro;
  auto *run_cmd = app.add_subcommand("run", "Run the benchmark sweep and emit score tables");
  run_cmd->add_option("--variant", ro.variant, "fixed | single | multi")
    ->check(CLI::IsMember({"fixed", "single", "multi"}))
    ->capture_default_str();
  run_cmd->add_option("--grid-n", ro.grid_n, "Thermal block nodes per axis")->capture_default_str();
  run_cmd->add_option("--n-max", ro.n_max, "Largest reduced order")->capture_default_str();
  run_cmd->add_option("--tsvd-rank", ro.tsvd_rank, "Rank of the truncated decompositions")
    ->capture_default_str();
  run_cmd->add_option("--seed", ro.seed, "RNG seed for test samples and inputs")
    ->capture_default_str();
  run_cmd->add_option("--out", ro.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--methods", ro.methods, "Comma-separated method tokens, e.g. PM_WC,BT_WX");
  run_cmd->add_option("--norms", ro.norms, "Comma-separated norms: L0,L1,L2,Linf,H2,Hinf,HSH,Ha,HC,HO");
  run_cmd->add_option("--dt", ro.dt, "Time step")->capture_default_str();
  run_cmd->add_option("--horizon", ro.horizon, "Simulation horizon T")->capture_default_str();
  run_cmd->add_option("--test-samples", ro.test_samples, "Number of test parameters")
    ->capture_default_str();
  run_cmd->add_option("--jobs", ro.jobs, "Worker threads")->capture_default_str();
  run_cmd->add_option("--radius", ro.radius, "Circle radius of the thermal block")
    ->capture_default_str();
  run_cmd->add_option("--system", ro.system, "Directory with E.mtx, A0.mtx.., B.mtx, C.mtx");
  run_cmd->add_option("--theta", ro.theta, "Parameter of an imported system")->delimiter(',');
  run_cmd->add_flag("--export", ro.export_artifacts, "Also write system, Gramians and ROMs (.mtx)");

  std::vector<std::string> score_inputs;
  long long score_n_max = 0;
  int exponent = -16;
  auto *score_cmd = app.add_subcommand("score", "Recompute MORscores from error graph CSVs");
  score_cmd->add_option("inputs", score_inputs, "errorgraph_*.csv files or directories")
    ->required();
  score_cmd->add_option("--n-max", score_n_max, "Override n_max (default: largest order)");
  score_cmd->add_option("--eps-exponent", exponent, "floor(log10(eps_mach))")
    ->capture_default_str();

  long long ex_grid = 16;
  double ex_radius = 0.2;
  std::string ex_out = "thermal-block";
  auto *export_cmd = app.add_subcommand("export-system", "Write the thermal block as Matrix Market");
  export_cmd->add_option("--grid-n", ex_grid, "Nodes per axis")->capture_default_str();
  export_cmd->add_option("--radius", ex_radius, "Circle radius")->capture_default_str();
  export_cmd->add_option("--out", ex_out, "Output directory")->capture_default_str();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    return app.exit(e);
  }

  try
  {
    if (*run_cmd)
    {
      return run(ro);
    }
    if (*score_cmd)
    {
      return score(score_inputs, score_n_max, exponent);
    }
    if (*export_cmd)
    {
      return export_system(ex_grid, ex_radius, ex_out);
    }
  }
  catch (const std::exception &e)
  {
    std::cerr << "morbench: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
