#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cpbo/bench.hpp"
#include "cpbo/config.hpp"
#include "cpbo/loop.hpp"

namespace cpbo {

// Per-evaluation trace CSV. All reals are written with 17 significant digits
// so a re-read reproduces the record numerics exactly.
inline void emit_trace(const RunRecord& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_trace: cannot write " + path);
  const Eigen::Index d = rec.iters.empty() ? 0 : rec.iters.front().x.size();
  out << "iteration";
  for (Eigen::Index k = 1; k <= d; ++k) out << ",x_" << k;
  out << ",y,best_so_far,y_dagger,beta,flat_landscape,duration_s\n";
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rec.iters.size(); ++i) {
    const IterationLog& it = rec.iters[i];
    best = std::min(best, it.y);
    out << (i + 1);
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << detail::format_double(it.x[k]);
    out << ',' << detail::format_double(it.y);
    out << ',' << detail::format_double(best);
    out << ',' << detail::format_double(it.y_dagger);
    out << ',' << detail::format_double(it.beta);
    out << ',' << (it.flat_landscape ? 1 : 0);
    out << ',' << detail::format_double(it.duration_s);
    out << '\n';
  }
  if (!out) throw std::runtime_error("emit_trace: write failed for " + path);
}

struct TraceRow {
  int iteration = 0;
  Eigen::VectorXd x;
  double y = 0.0;
  double best_so_far = 0.0;
  double y_dagger = 0.0;
  double beta = 0.0;
  bool flat_landscape = false;
  double duration_s = 0.0;
};

inline std::vector<TraceRow> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_trace: missing header in " + path);
  std::size_t ncols = 1;
  for (char c : line) ncols += (c == ',');
  if (ncols < 8) throw std::runtime_error("read_trace: bad header in " + path);
  const Eigen::Index d = static_cast<Eigen::Index>(ncols) - 7;

  const auto parse_cell = [&](const std::string& cell) -> double {
    if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
    return detail::parse_double(cell);
  };

  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != ncols) throw std::runtime_error("read_trace: ragged row in " + path);
    TraceRow r;
    r.iteration = static_cast<int>(detail::parse_int(cells[0]));
    r.x.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) r.x[k] = parse_cell(cells[static_cast<std::size_t>(1 + k)]);
    r.y = parse_cell(cells[static_cast<std::size_t>(1 + d)]);
    r.best_so_far = parse_cell(cells[static_cast<std::size_t>(2 + d)]);
    r.y_dagger = parse_cell(cells[static_cast<std::size_t>(3 + d)]);
    r.beta = parse_cell(cells[static_cast<std::size_t>(4 + d)]);
    r.flat_landscape = cells[static_cast<std::size_t>(5 + d)] == "1";
    r.duration_s = parse_cell(cells[static_cast<std::size_t>(6 + d)]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// Problem binding for studies: objective, domain, optimum for regret, and an
// optional per-seed pool factory for the pool scenario.
struct Problem {
  SearchSpace space;
  ObjectiveFn objective;
  double f_star = 0.0;
  std::function<PoolSet(std::uint64_t seed)> make_pool;  // empty for sampling
};

enum class SweepParam { beta, n_unlabeled, sampler_kind, pool_subset, zeta };

inline const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::beta: return "beta";
    case SweepParam::n_unlabeled: return "n_unlabeled";
    case SweepParam::sampler_kind: return "sampler_kind";
    case SweepParam::pool_subset: return "pool_subset";
    default: return "zeta";
  }
}

inline SweepParam sweep_param_from_string(const std::string& s) {
  if (s == "beta") return SweepParam::beta;
  if (s == "n_unlabeled") return SweepParam::n_unlabeled;
  if (s == "sampler_kind") return SweepParam::sampler_kind;
  if (s == "pool_subset") return SweepParam::pool_subset;
  if (s == "zeta") return SweepParam::zeta;
  throw std::invalid_argument("unknown sweep parameter: " + s);
}

// Exactly one swept parameter; seeds are assigned positionally
// (seed_i = base seed + i) so extending repeats never perturbs earlier runs.
struct StudySpec {
  RunConfig base;
  SweepParam param = SweepParam::beta;
  std::vector<std::string> values;
  int repeats = 20;
  std::string out_dir;
  int threads = 0;  // 0 = hardware concurrency
};

inline RunConfig apply_sweep(RunConfig cfg, SweepParam param, const std::string& value) {
  switch (param) {
    case SweepParam::beta:
      cfg.learn_beta = false;
      cfg.beta = detail::parse_double(value);
      break;
    case SweepParam::n_unlabeled:
      cfg.n_unlabeled = static_cast<int>(detail::parse_int(value));
      break;
    case SweepParam::sampler_kind:
      cfg.sampler = sampler_from_string(value);
      break;
    case SweepParam::pool_subset:
      cfg.pool_subset = static_cast<int>(detail::parse_int(value));
      break;
    case SweepParam::zeta:
      cfg.zeta = detail::parse_double(value);
      break;
  }
  return cfg;
}

struct AggregateRow {
  std::string sweep_value;
  int iteration = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  int count = 0;
};

struct StudyResult {
  std::vector<AggregateRow> rows;
  std::vector<std::string> failures;  // "<value>/<seed>: message"
  std::vector<RunRecord> records;     // completed runs, value-major then seed
};

// Run the jobs on up to n_threads workers. Results land in pre-assigned
// slots, so scheduling order cannot change any output.
inline void run_parallel(std::vector<std::function<void()>>& jobs, int n_threads) {
  if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads <= 1 || jobs.size() <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      jobs[i]();
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(n_threads, static_cast<int>(jobs.size()));
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

inline void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write aggregate CSV: " + path);
  out << "sweep_value,iteration,mean_regret,stderr_regret,count\n";
  for (const auto& r : rows)
    out << r.sweep_value << ',' << r.iteration << ',' << detail::format_double(r.mean_regret)
        << ',' << detail::format_double(r.stderr_regret) << ',' << r.count << '\n';
}

// Sweep-value x seed grid of runs with per-run trace CSVs and one aggregate
// CSV (mean regret and standard error of the mean per iteration). Failed runs
// are recorded and skipped; aggregates carry the completed count.
inline StudyResult run_study(const StudySpec& spec, const Problem& problem) {
  if (spec.repeats < 2) throw std::invalid_argument("run_study: repeats must be >= 2");
  if (spec.values.empty()) throw std::invalid_argument("run_study: no sweep values");
  if (!spec.out_dir.empty()) std::filesystem::create_directories(spec.out_dir);

  struct Slot {
    std::optional<RunRecord> record;
    std::string error;
  };
  const std::size_t total = spec.values.size() * static_cast<std::size_t>(spec.repeats);
  std::vector<Slot> slots(total);
  std::vector<std::function<void()>> jobs;
  jobs.reserve(total);

  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    for (int r = 0; r < spec.repeats; ++r) {
      const std::size_t slot = vi * static_cast<std::size_t>(spec.repeats) +
                               static_cast<std::size_t>(r);
      jobs.push_back([&, vi, r, slot]() {
        try {
          RunConfig cfg = apply_sweep(spec.base, spec.param, spec.values[vi]);
          cfg.seed = spec.base.seed + static_cast<std::uint64_t>(r);
          RunRecord rec;
          if (cfg.scenario == Scenario::pool) {
            if (!problem.make_pool)
              throw std::invalid_argument("pool scenario study without a pool factory");
            const PoolSet pool = problem.make_pool(cfg.seed);
            rec = run(cfg, problem.space, problem.objective, pool);
          } else {
            rec = run(cfg, problem.space, problem.objective);
          }
          if (!spec.out_dir.empty()) {
            std::ostringstream name;
            name << "trace_" << to_string(spec.param) << "_" << spec.values[vi] << "_seed"
                 << cfg.seed << ".csv";
            emit_trace(rec, (std::filesystem::path(spec.out_dir) / name.str()).string());
          }
          slots[slot].record = std::move(rec);
        } catch (const std::exception& e) {
          slots[slot].error = e.what();
        }
      });
    }
  }
  run_parallel(jobs, spec.threads);

  StudyResult result;
  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    std::vector<const RunRecord*> done;
    for (int r = 0; r < spec.repeats; ++r) {
      Slot& s = slots[vi * static_cast<std::size_t>(spec.repeats) + static_cast<std::size_t>(r)];
      if (s.record) {
        done.push_back(&*s.record);
        result.records.push_back(*s.record);
      } else {
        result.failures.push_back(spec.values[vi] + "/seed" +
                                  std::to_string(spec.base.seed + static_cast<std::uint64_t>(r)) +
                                  ": " + s.error);
      }
    }
    if (done.empty()) continue;
    std::size_t len = 0;
    for (const auto* rec : done) len = std::max(len, rec->iters.size());
    for (std::size_t j = 0; j < len; ++j) {
      double sum = 0.0;
      int count = 0;
      std::vector<double> regrets;
      for (const auto* rec : done) {
        if (j >= rec->iters.size()) continue;
        const std::vector<double> trace = rec->best_trace();
        regrets.push_back(trace[j] - problem.f_star);
        sum += regrets.back();
        ++count;
      }
      AggregateRow row;
      row.sweep_value = spec.values[vi];
      row.iteration = static_cast<int>(j + 1);
      row.count = count;
      row.mean_regret = sum / count;
      if (count >= 2) {
        double ss = 0.0;
        for (double g : regrets) ss += (g - row.mean_regret) * (g - row.mean_regret);
        row.stderr_regret = std::sqrt(ss / (count - 1)) / std::sqrt(static_cast<double>(count));
      }
      result.rows.push_back(std::move(row));
    }
  }
  if (!spec.out_dir.empty())
    write_aggregate_csv(result.rows,
                        (std::filesystem::path(spec.out_dir) / "aggregate.csv").string());
  for (const auto& f : result.failures) std::cerr << "run_study: failed run " << f << "\n";
  return result;
}

}  // namespace cpbo
