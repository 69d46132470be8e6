#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "dmgd/config.hpp"
#include "dmgd/graph.hpp"
#include "dmgd/metrics.hpp"
#include "dmgd/mixing.hpp"
#include "dmgd/optimizer.hpp"
#include "dmgd/workload.hpp"

namespace dmgd {

enum class Algorithm { dmgd, zo_dmgd, dsgd_t, mcgd };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

enum class ChainKind { lazy_path, lazy_ring, lazy_complete, uniform };

std::string to_string(ChainKind c);
ChainKind parse_chain_kind(const std::string& s);

enum class ObjectiveKind { quadratic, ar_logistic };

std::string to_string(ObjectiveKind o);
ObjectiveKind parse_objective_kind(const std::string& s);

// Named component chains: lazy random walks on small standard graphs plus
// the uniform-row (i.i.d.) chain.
FiniteMarkovChain build_chain(ChainKind kind, int states);

// Fully resolved run description. All fields have config-file keys; see
// canonical_text() for the exact serialization that is fingerprinted.
struct RunConfig {
  Algorithm algorithm = Algorithm::dmgd;
  long long iterations = 1000;
  double theta = 0.51;
  double rho = 0.6;
  double delta0 = 1.0;
  int dsgd_T = 1;

  GraphKind topology = GraphKind::ring;
  int nodes = 5;
  double edge_prob = 0.0;

  ObjectiveKind objective = ObjectiveKind::quadratic;
  int dim = 10;
  int components = 4;           // quadratic only
  ChainKind chain = ChainKind::lazy_path;  // quadratic only
  double center_scale = 0.1;    // quadratic only
  double clip_factor = 10.0;    // ar_logistic only
  int ref_samples_per_node = 4000;  // ar_logistic only

  std::uint64_t seed = 1;
  long long cadence = 10;
  double x0_fill = 0.0;

  // Raw config text when loaded from a file, else the canonical
  // serialization; its SHA-256 is the run fingerprint.
  std::string config_text;

  std::string canonical_text() const;
  std::string fingerprint() const;

  StepSchedule schedule() const;
  void validate() const;

  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
};

// Assembled pieces of a configured run.
struct RunSetup {
  std::unique_ptr<Workload> workload;
  MixingMatrix W;       // identity-like 1x1 for mcgd is not needed; unused
  bool has_mixing = false;
};

RunSetup build_run_setup(const RunConfig& cfg);

struct RunResult {
  RunRecord record;
  NodeStateMatrix final_state;
  double wall_seconds = 0.0;  // reported on the CLI, never in the CSV
};

// Executes the configured algorithm for the configured iteration budget and
// records metrics at k = 0, k = 1, every cadence-th iteration, and the final
// iterate. Bit-reproducible for identical config text.
RunResult run(const RunConfig& cfg);

}  // namespace dmgd
