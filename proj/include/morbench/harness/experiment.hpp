// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "morbench/gramians.hpp"
#include "morbench/harness/config.hpp"
#include "morbench/harness/sampling.hpp"
#include "morbench/matrix_market.hpp"
#include "morbench/morscore.hpp"
#include "morbench/norms.hpp"
#include "morbench/reducers.hpp"
#include "morbench/system.hpp"
#include "morbench/thermal_block.hpp"

namespace morbench::harness
{

struct Benchmark
{
  std::shared_ptr<const SparseSystem> system;
  std::vector<ParameterPoint> training;
  std::vector<ParameterPoint> test;
  std::string variant;
};

inline Benchmark make_benchmark(const ExperimentConfig &cfg)
{
  cfg.validate();
  Benchmark b;
  b.variant = cfg.variant_label();
  if (cfg.system_dir)
  {
    b.system = std::make_shared<const SparseSystem>(mm::read_system(*cfg.system_dir));
    ParameterPoint theta = cfg.theta.value_or(ParameterPoint(Vector::Zero(b.system->parameters())));
    b.system->check_parameter(theta);
    b.training = {theta};
    b.test = {theta};
    return b;
  }
  b.system = std::make_shared<const SparseSystem>(thermal::build(cfg.block));
  b.training = sample_training(cfg.variant, cfg.block);
  b.test = sample_test(cfg.variant, cfg.seed, cfg.test_samples, cfg.block);
  if (cfg.variant != thermal::Variant::Fixed && !disjoint(b.training, b.test))
  {
    throw Error("training and test parameter samples intersect");
  }
  return b;
}

// Parameter-averaged training Gramians; a Gramian that could not be built carries its error.
struct TrainingGramians
{
  std::optional<GramianSet> wc, wo, wz;
  std::string wc_error, wo_error, wz_error;
};

inline TrainingGramians train(const SparseSystem &sys, std::span<const ParameterPoint> sample,
                              const SimGrid &grid)
{
  TrainingGramians g;
  auto attempt = [&](GramianKind kind, std::optional<GramianSet> &slot, std::string &error) {
    try
    {
      slot = parametric_average(kind, sys, sample, grid);
    }
    catch (const Error &e)
    {
      error = e.what();
    }
  };
  attempt(GramianKind::WC, g.wc, g.wc_error);
  attempt(GramianKind::WO, g.wo, g.wo_error);
  attempt(GramianKind::WZ, g.wz, g.wz_error);
  return g;
}

// Full system in the coordinates of a projection pair, modes in truncation order.
// sigma_k = sqrt(|(V W_C V^T)_kk (U^T W_O U)_kk|) or |(V W_Z U)_kk| for cross-Gramian methods.
inline TruncationModes projection_coordinates(const ProjectionPair &p, const TrainingGramians &g,
                                              const Matrix &B, const Matrix &C, bool cross)
{
  const Index r = p.rank();
  TruncationModes m{Vector(r), p.V * B, C * p.U, std::nullopt};
  if (g.wz)
  {
    m.WZ_hat = p.V * (g.wz->matrix * p.U);
  }
  if (cross)
  {
    if (!m.WZ_hat)
    {
      throw InvalidArgument("cross Gramian unavailable: " + g.wz_error);
    }
    m.sigma = m.WZ_hat->diagonal().cwiseAbs();
    return m;
  }
  if (!g.wc || !g.wo)
  {
    throw InvalidArgument("controllability/observability Gramian unavailable");
  }
  const Matrix vw = p.V * g.wc->matrix;
  const Matrix wu = g.wo->matrix * p.U;
  for (Index k = 0; k < r; ++k)
  {
    const double c = vw.row(k).dot(p.V.row(k));
    const double o = p.U.col(k).dot(wu.col(k));
    m.sigma(k) = std::sqrt(std::abs(c * o));
  }
  return m;
}

struct MethodModel
{
  Method method;
  std::optional<std::string> failure;
  ProjectionPair pair;
  TruncationModes modes;
  std::optional<ReducedModel> rom;  // order min(n_max, rank)

  Index max_order() const { return rom ? rom->order : 0; }
};

namespace detail
{

inline const GramianSet &need(const std::optional<GramianSet> &g, const std::string &error,
                              const char *name)
{
  if (!g)
  {
    throw InvalidArgument(std::string(name) + " unavailable: " + error);
  }
  return *g;
}

}  // namespace detail

inline MethodModel build_method(const SparseSystem &sys, const TrainingGramians &g, Method method,
                                Index tsvd_rank, Index n_max)
{
  MethodModel out{method, std::nullopt, {}, {}, std::nullopt};
  try
  {
    auto wc = [&]() -> const GramianSet & { return detail::need(g.wc, g.wc_error, "W_C"); };
    auto wo = [&]() -> const GramianSet & { return detail::need(g.wo, g.wo_error, "W_O"); };
    auto wz = [&]() -> const GramianSet & { return detail::need(g.wz, g.wz_error, "W_Z"); };
    const bool cross = uses_cross_gramian(method);
    switch (method.reducer)
    {
      case Reducer::PM:
        out.pair = pm(method.flavor == Flavor::WC ? wc() : wo(), tsvd_rank);
        break;
      case Reducer::AB:
        out.pair = cross ? ab_wx(wz(), tsvd_rank) : ab_wcwo(wc(), wo(), tsvd_rank);
        break;
      case Reducer::DS:
        out.pair = cross ? ds(wz(), tsvd_rank) : ds(wc(), wo(), tsvd_rank);
        break;
      case Reducer::BT:
      case Reducer::BG:
      {
        const auto bal = cross ? balance_wx(sys, wz(), tsvd_rank)
                               : balance_wcwo(sys, wc(), wo(), tsvd_rank, g.wz ? &*g.wz : nullptr);
        if (method.reducer == Reducer::BT)
        {
          out.pair = bal.projections;
          out.modes = truncation_modes(bal);
        }
        else
        {
          const auto order = balanced_gains_order(bal);
          out.pair = balanced_gains_pair(bal);
          out.modes = truncation_modes(bal, order);
        }
        break;
      }
    }
    if (method.reducer != Reducer::BT && method.reducer != Reducer::BG)
    {
      out.modes = projection_coordinates(out.pair, g, sys.B(), sys.C(), cross);
    }
    out.rom = reduce(sys, out.pair, std::min(n_max, out.pair.rank()), token(method));
  }
  catch (const Error &e)
  {
    out.failure = e.what();
    out.rom.reset();
  }
  return out;
}

struct TestCase
{
  ParameterPoint theta;
  Matrix input;                             // M x K
  std::shared_ptr<const Matrix> reference;  // full-model output, Q x K
};

// One (test parameter, method, order) cell of the sweep.
struct OrderRecord
{
  bool built = false;   // ROM assembled and spectrum computed
  bool stable = false;  // built and spectral abscissa < 0
  double abscissa = std::numeric_limits<double>::quiet_NaN();
  std::string failure;
  std::vector<std::optional<NormEvaluation>> evals;  // per selected norm, nullopt = failed cell
  std::shared_ptr<const Matrix> reference;           // trajectory the ROM was scored against
  double seconds = 0.0;
};

inline OrderRecord evaluate_order(const SparseSystem &sys, const MethodModel &model,
                                  const TestCase &test, Index n, std::span<const NormId> norms,
                                  const SimGrid &grid)
{
  const auto start = std::chrono::steady_clock::now();
  OrderRecord rec;
  rec.reference = test.reference;
  Matrix y_rom;
  if (model.failure)
  {
    rec.failure = *model.failure;
  }
  else if (n > model.max_order())
  {
    rec.failure = "order exceeds projection rank " + std::to_string(model.pair.rank());
  }
  else
  {
    try
    {
      const auto rom = truncate(*model.rom, n);
      rec.abscissa = spectral_abscissa(rom.system.E(), rom.system.assemble(test.theta));
      rec.built = true;
      rec.stable = rec.abscissa < 0.0;
      if (rec.stable)
      {
        y_rom = simulate(rom.system, test.theta, test.input, Vector::Zero(n), grid).values;
      }
    }
    catch (const Error &e)
    {
      rec.failure = e.what();
      rec.stable = false;
    }
  }
  const bool valid = rec.stable && y_rom.size() > 0;
  const Matrix &y_cmp = valid ? y_rom : *test.reference;
  for (auto id : norms)
  {
    try
    {
      const ErrorContext ctx{*test.reference, y_cmp, grid.dt, model.modes, n, sys.states(), valid};
      if (model.failure && !is_signal_norm(id))
      {
        throw InvalidArgument("method failed: " + *model.failure);
      }
      rec.evals.emplace_back(evaluate(ctx, id));
    }
    catch (const Error &)
    {
      rec.evals.emplace_back(std::nullopt);
    }
  }
  rec.seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; results go to caller-owned slots.
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F &&fn)
{
  if (jobs <= 1 || count <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
    {
      fn(i);
    }
    return;
  }
  std::mutex lock;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;)
    {
      std::size_t i = 0;
      {
        std::lock_guard<std::mutex> guard(lock);
        if (next >= count || failure)
        {
          return;
        }
        i = next++;
      }
      try
      {
        fn(i);
      }
      catch (...)
      {
        std::lock_guard<std::mutex> guard(lock);
        if (!failure)
        {
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, count); ++t)
  {
    pool.emplace_back(worker);
  }
  for (auto &t : pool)
  {
    t.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

struct GraphEntry
{
  Method method;
  NormId norm;
  Composition composition;
  std::optional<ErrorGraph> graph;  // nullopt when a cell of the graph failed
  double mu = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult
{
  ExperimentConfig config;
  Benchmark benchmark;
  TrainingGramians gramians;
  std::vector<MethodModel> models;                         // per selected method
  std::vector<TestCase> tests;
  std::vector<std::vector<std::vector<OrderRecord>>> records;  // [test][method][order - 1]
  std::vector<GraphEntry> graphs;
  std::vector<MORscoreTable> tables;                       // per emitted composition

  // Unstable or failed orders of one method at one test parameter.
  double unstable_count(std::size_t test, std::size_t method) const
  {
    double c = 0.0;
    for (const auto &r : records[test][method])
    {
      c += r.stable ? 0.0 : 1.0;
    }
    return c;
  }
};

namespace detail
{

inline std::optional<ErrorGraph> compose_graph(const ExperimentResult &res, std::size_t mi,
                                               std::size_t ni, Composition mode)
{
  const auto &cfg = res.config;
  ErrorGraph g;
  g.n_max = cfg.n_max;
  g.method = token(cfg.methods[mi]);
  g.norm = std::string(label(cfg.norms[ni]));
  g.variant = res.benchmark.variant;
  g.composition = std::string(label(mode));
  std::vector<NormEvaluation> evals(res.tests.size());
  for (Index n = 1; n <= cfg.n_max; ++n)
  {
    for (std::size_t t = 0; t < res.tests.size(); ++t)
    {
      const auto &cell = res.records[t][mi][static_cast<std::size_t>(n - 1)].evals[ni];
      if (!cell)
      {
        return std::nullopt;
      }
      evals[t] = *cell;
    }
    g.points.push_back(GraphPoint{n, compose_relative(evals, mode)});
  }
  return g;
}

}  // namespace detail

// Error graphs and score tables from the records of a finished sweep.
inline void score(ExperimentResult &res, MachinePrecision prec = {})
{
  const auto &cfg = res.config;
  res.graphs.clear();
  res.tables.clear();
  for (auto mode : cfg.compositions())
  {
    MORscoreTable table;
    table.variant = res.benchmark.variant;
    table.composition = std::string(label(mode));
    table.norms = cfg.norms;
    table.precision = prec;
    table.n_max = cfg.n_max;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
    {
      table.rows.push_back(row_label(cfg.methods[mi]));
      std::vector<double> row;
      for (std::size_t ni = 0; ni < cfg.norms.size(); ++ni)
      {
        GraphEntry e{cfg.methods[mi], cfg.norms[ni], mode, detail::compose_graph(res, mi, ni, mode)};
        if (e.graph)
        {
          e.mu = morscore(*e.graph, prec);
        }
        row.push_back(e.mu);
        res.graphs.push_back(std::move(e));
      }
      table.mu.push_back(std::move(row));
      std::vector<double> counts;
      for (std::size_t t = 0; t < res.tests.size(); ++t)
      {
        counts.push_back(res.unstable_count(t, mi));
      }
      table.unstable.push_back(aggregate_unstable(counts, mode));
    }
    res.tables.push_back(std::move(table));
  }
}

// Training, reduction, test sweep and scoring. Per-cell failures are recorded, not thrown;
// a failing full model is a hard error.
inline ExperimentResult run_experiment(const ExperimentConfig &cfg)
{
  ExperimentResult res;
  res.config = cfg;
  res.benchmark = make_benchmark(cfg);
  const SparseSystem &sys = *res.benchmark.system;

  res.gramians = train(sys, res.benchmark.training, cfg.grid);
  res.models.resize(cfg.methods.size());
  parallel_for(cfg.methods.size(), cfg.jobs, [&](std::size_t i) {
    res.models[i] = build_method(sys, res.gramians, cfg.methods[i], cfg.tsvd_rank, cfg.n_max);
  });

  const auto &thetas = res.benchmark.test;
  res.tests.resize(thetas.size());
  parallel_for(thetas.size(), cfg.jobs, [&](std::size_t t) {
    TestCase tc{thetas[t], random_input(sys.inputs(), cfg.grid.steps, cfg.seed, t), nullptr};
    tc.reference = std::make_shared<const Matrix>(
      simulate(sys, tc.theta, tc.input, Vector::Zero(sys.states()), cfg.grid).values);
    if (!tc.reference->allFinite())
    {
      throw Divergence("full model diverges at theta = " + tc.theta.str());
    }
    res.tests[t] = std::move(tc);
  });

  const std::size_t nm = cfg.methods.size();
  res.records.assign(thetas.size(), std::vector<std::vector<OrderRecord>>(nm));
  parallel_for(thetas.size() * nm, cfg.jobs, [&](std::size_t job) {
    const std::size_t t = job / nm;
    const std::size_t m = job % nm;
    auto &slot = res.records[t][m];
    slot.reserve(static_cast<std::size_t>(cfg.n_max));
    for (Index n = 1; n <= cfg.n_max; ++n)
    {
      slot.push_back(evaluate_order(sys, res.models[m], res.tests[t], n, cfg.norms, cfg.grid));
    }
  });

  score(res);
  return res;
}

}  // namespace morbench::harness
