#include "dmgd/experiment.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dmgd/stats.hpp"

namespace dmgd {

std::string to_string(ExperimentScale s) {
  return s == ExperimentScale::desk ? "desk" : "paper";
}

ExperimentScale parse_experiment_scale(const std::string& s) {
  if (s == "desk") return ExperimentScale::desk;
  if (s == "paper") return ExperimentScale::paper;
  throw std::runtime_error("unknown scale '" + s + "'");
}

std::vector<ExperimentCase> experiment_cases(ExperimentScale scale) {
  if (scale == ExperimentScale::desk) return {{5, 10}};
  return {{10, 50}, {20, 100}};
}

RunConfig figure1_config(const ExperimentCase& problem, Algorithm algorithm,
                         int dsgd_T, std::uint64_t seed,
                         std::uint64_t samples_per_node) {
  RunConfig cfg;
  cfg.algorithm = algorithm;
  cfg.theta = 0.51;
  cfg.topology = GraphKind::ring;
  cfg.nodes = problem.nodes;
  cfg.objective = ObjectiveKind::ar_logistic;
  cfg.dim = problem.dim;
  cfg.seed = seed;
  cfg.dsgd_T = algorithm == Algorithm::dsgd_t ? dsgd_T : 1;
  const std::uint64_t per_iter =
      algorithm == Algorithm::dsgd_t ? static_cast<std::uint64_t>(dsgd_T) : 1;
  if (samples_per_node % per_iter != 0)
    throw std::invalid_argument(
        "figure1: sample budget must be divisible by every T");
  cfg.iterations = static_cast<long long>(samples_per_node / per_iter);
  cfg.config_text = cfg.canonical_text();
  cfg.validate();
  return cfg;
}

namespace {

struct Arm {
  std::string label;
  Algorithm algorithm;
  int T;
};

const std::vector<Arm>& arms() {
  static const std::vector<Arm> a = {
      {"dmgd", Algorithm::dmgd, 1},     {"mcgd", Algorithm::mcgd, 1},
      {"dsgd_1", Algorithm::dsgd_t, 1}, {"dsgd_2", Algorithm::dsgd_t, 2},
      {"dsgd_4", Algorithm::dsgd_t, 4}, {"dsgd_8", Algorithm::dsgd_t, 8},
      {"dsgd_16", Algorithm::dsgd_t, 16}};
  return a;
}

void run_parallel(std::vector<std::function<void()>>& tasks, int jobs) {
  if (jobs < 1) jobs = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      tasks[i]();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<Figure1Result> figure1_experiment(
    ExperimentScale scale, const std::vector<std::uint64_t>& seeds,
    const std::string& out_dir, std::uint64_t samples_per_node, int jobs) {
  if (seeds.empty())
    throw std::invalid_argument("figure1: at least one seed required");
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::vector<Figure1Result> results;
  for (const ExperimentCase& problem : experiment_cases(scale)) {
    Figure1Result res;
    res.problem = problem;
    res.algorithms.resize(arms().size());
    for (std::size_t a = 0; a < arms().size(); ++a) {
      res.algorithms[a].label = arms()[a].label;
      res.algorithms[a].final_errors.resize(seeds.size());
    }

    std::vector<std::function<void()>> tasks;
    for (std::size_t a = 0; a < arms().size(); ++a) {
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        tasks.emplace_back([&, a, s] {
          const Arm& arm = arms()[a];
          const RunConfig cfg = figure1_config(
              problem, arm.algorithm, arm.T, seeds[s], samples_per_node);
          const RunResult r = run(cfg);
          const MetricRow& last = r.record.final_row();
          res.algorithms[a].final_errors[s] = last.objective_error;
          res.algorithms[a].samples_per_node = last.samples_per_node;
          if (!out_dir.empty()) {
            std::ostringstream name;
            name << "m" << problem.nodes << "_n" << problem.dim << "_"
                 << arm.label << "_seed" << seeds[s] << ".csv";
            emit_csv(r.record,
                     (std::filesystem::path(out_dir) / name.str()).string());
          }
        });
      }
    }
    run_parallel(tasks, jobs);

    std::ostringstream table;
    table << "# m=" << problem.nodes << " n=" << problem.dim
          << " samples_per_node=" << samples_per_node
          << " seeds=" << seeds.size() << "\n";
    table << std::left << std::setw(10) << "algorithm" << std::setw(18)
          << "samples_per_node" << "median_final_objective_error\n";
    for (auto& alg : res.algorithms) {
      alg.median_final_error = median(alg.final_errors);
      table << std::left << std::setw(10) << alg.label << std::setw(18)
            << alg.samples_per_node << format_g17(alg.median_final_error)
            << "\n";
    }
    res.table_text = table.str();
    if (!out_dir.empty()) {
      std::ostringstream name;
      name << "m" << problem.nodes << "_n" << problem.dim
           << "_comparison.txt";
      const auto path = std::filesystem::path(out_dir) / name.str();
      std::ofstream f(path, std::ios::binary);
      if (!f)
        throw std::runtime_error("figure1: cannot write " + path.string());
      f << res.table_text;
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace dmgd
