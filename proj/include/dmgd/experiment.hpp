#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmgd/runner.hpp"

namespace dmgd {

enum class ExperimentScale { desk, paper };

std::string to_string(ExperimentScale s);
ExperimentScale parse_experiment_scale(const std::string& s);

// One problem size within a comparison experiment.
struct ExperimentCase {
  int nodes = 5;
  int dim = 10;
};

std::vector<ExperimentCase> experiment_cases(ExperimentScale scale);

struct AlgorithmSummary {
  std::string label;                 // e.g. "dmgd", "dsgd_4"
  std::uint64_t samples_per_node = 0;
  std::vector<double> final_errors;  // one per seed
  double median_final_error = 0.0;
};

struct Figure1Result {
  ExperimentCase problem;
  std::vector<AlgorithmSummary> algorithms;
  std::string table_text;
};

// Builds the run configuration shared by every arm of the comparison: an
// AR-logistic workload on a ring of `nodes` with q = 0.51 stepsizes. Only
// the algorithm tag and iteration budget differ between arms.
RunConfig figure1_config(const ExperimentCase& problem, Algorithm algorithm,
                         int dsgd_T, std::uint64_t seed,
                         std::uint64_t samples_per_node);

// Runs DMGD, centralized MCGD, and DSGD-T for T in {1,2,4,8,16} at a fixed
// per-node sample budget, one run per seed. Writes one CSV per algorithm
// and seed plus a comparison table into out_dir (skipped when out_dir is
// empty). `jobs` caps the number of concurrently running seeded runs.
std::vector<Figure1Result> figure1_experiment(
    ExperimentScale scale, const std::vector<std::uint64_t>& seeds,
    const std::string& out_dir, std::uint64_t samples_per_node = 128,
    int jobs = 1);

}  // namespace dmgd
