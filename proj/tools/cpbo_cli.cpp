// Experiment runner: single runs, parameter-sweep studies, pool validation.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpbo/cpbo.hpp"

namespace {

struct CommonOpts {
  cpbo::RunConfig cfg;
  std::string benchmark = "branin";
  std::string pool_csv;
  int pool_size = 1000;
  std::optional<std::uint64_t> pool_seed;
  std::string classifier = "label_propagation";
  std::string scenario = "sampling";
  std::string sampler = "truncnorm";
  std::string beta_mode = "learned";
  int pool_subset = 0;
};

void add_config_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--benchmark", o.benchmark, "Objective name (see list-benchmarks)");
  cmd->add_option("--pool-csv", o.pool_csv,
                  "CSV pool (feature columns + value column); implies --scenario pool");
  cmd->add_option("--scenario", o.scenario, "sampling | pool")
      ->check(CLI::IsMember({"sampling", "pool"}));
  cmd->add_option("--classifier", o.classifier,
                  "label_propagation | label_spreading | nadaraya_watson_control | random_search")
      ->check(CLI::IsMember({"label_propagation", "lp", "label_spreading", "ls",
                             "nadaraya_watson_control", "nw", "random_search", "random"}));
  cmd->add_option("--zeta", o.cfg.zeta, "Threshold ratio in (0,1)");
  cmd->add_option("--n-unlabeled", o.cfg.n_unlabeled, "Unlabeled points per iteration (sampling)");
  cmd->add_option("--pool-subset", o.pool_subset, "Unlabeled subset size drawn from the pool");
  cmd->add_option("--alpha", o.cfg.alpha, "Label-spreading clamp factor in (0,1)");
  cmd->add_option("--beta-mode", o.beta_mode, "learned | fixed")
      ->check(CLI::IsMember({"learned", "fixed"}));
  cmd->add_option("--beta", o.cfg.beta, "Fixed kernel width (also the learned-search start)");
  cmd->add_option("--max-prop-iters", o.cfg.max_prop_iters, "Propagation iteration cap");
  cmd->add_option("--prop-tol", o.cfg.prop_tol, "Propagation convergence tolerance");
  cmd->add_option("--n-starts", o.cfg.n_starts, "Multi-start count for the acquisition");
  cmd->add_option("--iterations", o.cfg.iterations, "Optimization iterations T");
  cmd->add_option("--n-init", o.cfg.n_init, "Initial design size");
  cmd->add_option("--seed", o.cfg.seed, "Random seed");
  cmd->add_option("--sampler", o.sampler, "truncnorm | uniform | halton | sobol")
      ->check(CLI::IsMember({"truncnorm", "uniform", "halton", "sobol"}));
  cmd->add_option("--truncnorm-stddev", o.cfg.truncnorm_stddev,
                  "Per-dimension sd of the truncated-normal sampler");
  cmd->add_option("--tie-tol", o.cfg.tie_tol, "Acquisition tie / flatness tolerance");
  cmd->add_option("--pool-size", o.pool_size, "Synthetic pool size (pool scenario)");
  cmd->add_option("--pool-seed", o.pool_seed, "Seed for synthetic pool generation (default: seed)");
  cmd->set_config("--config", "", "Flat key=value config file; flags take precedence");
}

void finalize_config(CommonOpts& o) {
  o.cfg.scenario = cpbo::scenario_from_string(o.scenario);
  o.cfg.classifier = cpbo::classifier_from_string(o.classifier);
  o.cfg.sampler = cpbo::sampler_from_string(o.sampler);
  o.cfg.learn_beta = o.beta_mode == "learned";
  if (o.pool_subset > 0) o.cfg.pool_subset = o.pool_subset;
  if (!o.pool_csv.empty()) o.cfg.scenario = cpbo::Scenario::pool;
  o.cfg.validate();
}

// Problem binding: CSV pool (value column is the objective, looked up by
// candidate index) or a named synthetic benchmark.
cpbo::Problem make_problem(const CommonOpts& o) {
  cpbo::Problem problem{cpbo::SearchSpace::unit_cube(1), nullptr, 0.0, nullptr};
  if (!o.pool_csv.empty()) {
    auto csv = std::make_shared<cpbo::PoolCsv>(cpbo::load_pool_csv(o.pool_csv));
    problem.space = cpbo::pool_bounding_box(*csv);
    problem.f_star = csv->min_value();
    problem.make_pool = [csv](std::uint64_t) { return csv->pool(); };
    // index-free objective: exact-match lookup over the candidate rows
    auto index = std::make_shared<std::unordered_map<std::string, double>>();
    for (Eigen::Index i = 0; i < csv->X.rows(); ++i) {
      std::string key(reinterpret_cast<const char*>(csv->X.row(i).data()),
                      sizeof(double) * static_cast<std::size_t>(csv->X.cols()));
      (*index)[key] = csv->y[i];
    }
    problem.objective = [csv, index](const Eigen::VectorXd& x) {
      const Eigen::RowVectorXd row = x.transpose();
      std::string key(reinterpret_cast<const char*>(row.data()),
                      sizeof(double) * static_cast<std::size_t>(row.size()));
      const auto it = index->find(key);
      if (it == index->end())
        throw std::invalid_argument("pool objective queried off-pool point");
      return it->second;
    };
    return problem;
  }
  const cpbo::Benchmark& b = cpbo::find_benchmark(o.benchmark);
  problem.space = b.space;
  problem.objective = b.objective;
  problem.f_star = b.known_optimum_value;
  if (o.cfg.scenario == cpbo::Scenario::pool) {
    const int pool_size = o.pool_size;
    const cpbo::SearchSpace space = b.space;
    const std::optional<std::uint64_t> pool_seed = o.pool_seed;
    problem.make_pool = [space, pool_size, pool_seed](std::uint64_t run_seed) {
      cpbo::Rng rng(pool_seed.value_or(run_seed));
      return cpbo::PoolSet(cpbo::sample_uniform(space, pool_size, rng));
    };
  }
  return problem;
}

int cmd_run(const CommonOpts& o, const std::string& trace_path) {
  const cpbo::Problem problem = make_problem(o);
  cpbo::RunRecord rec;
  if (o.cfg.scenario == cpbo::Scenario::pool) {
    const cpbo::PoolSet pool = problem.make_pool(o.cfg.seed);
    rec = cpbo::run(o.cfg, problem.space, problem.objective, pool);
  } else {
    rec = cpbo::run(o.cfg, problem.space, problem.objective);
  }
  if (!trace_path.empty()) cpbo::emit_trace(rec, trace_path);

  std::cout << "evaluations: " << rec.iters.size() << "\n";
  std::cout << "best value:  " << cpbo::detail::format_double(rec.best_y) << "\n";
  std::cout << "best point: ";
  for (Eigen::Index k = 0; k < rec.best_x.size(); ++k)
    std::cout << ' ' << cpbo::detail::format_double(rec.best_x[k]);
  std::cout << "\n";
  std::cout << "simple regret: "
            << cpbo::detail::format_double(rec.best_y - problem.f_star) << "\n";
  if (rec.pool_exhausted) std::cout << "note: pool exhausted, run truncated\n";
  return 0;
}

int cmd_study(const CommonOpts& o, const std::string& sweep, const std::string& values_csv,
              int repeats, const std::string& out_dir, int threads) {
  cpbo::StudySpec spec;
  spec.base = o.cfg;
  spec.param = cpbo::sweep_param_from_string(sweep);
  spec.repeats = repeats;
  spec.out_dir = out_dir;
  spec.threads = threads;
  std::stringstream ss(values_csv);
  std::string v;
  while (std::getline(ss, v, ',')) spec.values.push_back(cpbo::detail::trim(v));

  const cpbo::Problem problem = make_problem(o);
  const cpbo::StudyResult result = cpbo::run_study(spec, problem);
  std::cout << "study complete: " << result.records.size() << " runs, "
            << result.failures.size() << " failures; aggregate written to " << out_dir
            << "/aggregate.csv\n";
  return result.failures.empty() ? 0 : 2;
}

int cmd_import_pool(const std::string& path, const std::vector<double>& lower,
                    const std::vector<double>& upper) {
  const cpbo::PoolCsv csv = cpbo::load_pool_csv(path);
  if (!lower.empty() || !upper.empty()) {
    if (lower.size() != upper.size() ||
        static_cast<Eigen::Index>(lower.size()) != csv.X.cols())
      throw std::invalid_argument("--lower/--upper must both be given with one value per feature");
    const cpbo::SearchSpace space(
        Eigen::Map<const Eigen::VectorXd>(lower.data(), static_cast<Eigen::Index>(lower.size())),
        Eigen::Map<const Eigen::VectorXd>(upper.data(), static_cast<Eigen::Index>(upper.size())));
    cpbo::validate_pool_bounds(csv, space, path);
  }
  std::cout << "pool: " << csv.X.rows() << " candidates, " << csv.X.cols() << " features\n";
  for (Eigen::Index k = 0; k < csv.X.cols(); ++k)
    std::cout << "  " << csv.feature_names[static_cast<std::size_t>(k)] << ": ["
              << csv.X.col(k).minCoeff() << ", " << csv.X.col(k).maxCoeff() << "]\n";
  std::cout << "  " << csv.value_name << ": [" << csv.y.minCoeff() << ", " << csv.y.maxCoeff()
            << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-ratio Bayesian optimization with graph-based semi-supervised classifiers"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  std::string trace_path;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute a single optimization run");
  add_config_flags(run_cmd, run_opts);
  run_cmd->add_option("--trace", trace_path, "Write the per-evaluation trace CSV here");

  CommonOpts study_opts;
  std::string sweep = "beta", values_csv, out_dir = "study_out";
  int repeats = 20, threads = 0;
  CLI::App* study_cmd = app.add_subcommand("study", "Sweep one parameter over repeated seeded runs");
  add_config_flags(study_cmd, study_opts);
  study_cmd->add_option("--sweep", sweep, "beta | n_unlabeled | sampler_kind | pool_subset | zeta")
      ->required();
  study_cmd->add_option("--values", values_csv, "Comma-separated sweep values")->required();
  study_cmd->add_option("--repeats", repeats, "Seeded repeats per value (>= 2)");
  study_cmd->add_option("--out", out_dir, "Output directory for trace and aggregate CSVs");
  study_cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");

  std::string pool_path;
  std::vector<double> lower, upper;
  CLI::App* import_cmd = app.add_subcommand("import-pool", "Validate a pool CSV and print a summary");
  import_cmd->add_option("csv", pool_path, "Pool CSV path")->required();
  import_cmd->add_option("--lower", lower, "Expected lower bounds (per feature)");
  import_cmd->add_option("--upper", upper, "Expected upper bounds (per feature)");

  CLI::App* list_cmd = app.add_subcommand("list-benchmarks", "List built-in objectives");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      finalize_config(run_opts);
      return cmd_run(run_opts, trace_path);
    }
    if (study_cmd->parsed()) {
      finalize_config(study_opts);
      return cmd_study(study_opts, sweep, values_csv, repeats, out_dir, threads);
    }
    if (import_cmd->parsed()) return cmd_import_pool(pool_path, lower, upper);
    if (list_cmd->parsed()) {
      for (const auto& b : cpbo::benchmarks()) {
        std::cout << b.name << "  d=" << b.space.dims() << "  domain=";
        for (Eigen::Index k = 0; k < b.space.dims(); ++k)
          std::cout << "[" << b.space.lower[k] << "," << b.space.upper[k] << "]";
        std::cout << "  f*=" << b.known_optimum_value << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
