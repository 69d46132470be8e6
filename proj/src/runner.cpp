#include "dmgd/runner.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dmgd/markov.hpp"
#include "dmgd/objective.hpp"
#include "dmgd/sha256.hpp"

namespace dmgd {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::dmgd: return "dmgd";
    case Algorithm::zo_dmgd: return "zo_dmgd";
    case Algorithm::dsgd_t: return "dsgd_t";
    case Algorithm::mcgd: return "mcgd";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "dmgd") return Algorithm::dmgd;
  if (s == "zo_dmgd") return Algorithm::zo_dmgd;
  if (s == "dsgd_t") return Algorithm::dsgd_t;
  if (s == "mcgd") return Algorithm::mcgd;
  throw std::runtime_error("unknown algorithm '" + s + "'");
}

std::string to_string(ChainKind c) {
  switch (c) {
    case ChainKind::lazy_path: return "lazy_path";
    case ChainKind::lazy_ring: return "lazy_ring";
    case ChainKind::lazy_complete: return "lazy_complete";
    case ChainKind::uniform: return "uniform";
  }
  return "?";
}

ChainKind parse_chain_kind(const std::string& s) {
  if (s == "lazy_path") return ChainKind::lazy_path;
  if (s == "lazy_ring") return ChainKind::lazy_ring;
  if (s == "lazy_complete") return ChainKind::lazy_complete;
  if (s == "uniform") return ChainKind::uniform;
  throw std::runtime_error("unknown chain kind '" + s + "'");
}

std::string to_string(ObjectiveKind o) {
  switch (o) {
    case ObjectiveKind::quadratic: return "quadratic";
    case ObjectiveKind::ar_logistic: return "ar_logistic";
  }
  return "?";
}

ObjectiveKind parse_objective_kind(const std::string& s) {
  if (s == "quadratic") return ObjectiveKind::quadratic;
  if (s == "ar_logistic") return ObjectiveKind::ar_logistic;
  throw std::runtime_error("unknown objective '" + s + "'");
}

std::string RunConfig::canonical_text() const {
  std::ostringstream out;
  out << "algorithm=" << to_string(algorithm) << '\n';
  out << "iterations=" << iterations << '\n';
  out << "theta=" << format_g17(theta) << '\n';
  if (algorithm == Algorithm::zo_dmgd) {
    out << "rho=" << format_g17(rho) << '\n';
    out << "delta0=" << format_g17(delta0) << '\n';
  }
  if (algorithm == Algorithm::dsgd_t) out << "T=" << dsgd_T << '\n';
  out << "topology=" << to_string(topology) << '\n';
  out << "nodes=" << nodes << '\n';
  if (topology == GraphKind::erdos_renyi)
    out << "edge_prob=" << format_g17(edge_prob) << '\n';
  out << "objective=" << to_string(objective) << '\n';
  out << "dim=" << dim << '\n';
  if (objective == ObjectiveKind::quadratic) {
    out << "components=" << components << '\n';
    out << "chain=" << to_string(chain) << '\n';
    out << "center_scale=" << format_g17(center_scale) << '\n';
  } else {
    out << "clip_factor=" << format_g17(clip_factor) << '\n';
    out << "ref_samples_per_node=" << ref_samples_per_node << '\n';
  }
  out << "seed=" << seed << '\n';
  out << "cadence=" << cadence << '\n';
  out << "x0=" << format_g17(x0_fill) << '\n';
  return out.str();
}

std::string RunConfig::fingerprint() const {
  return Sha256::hash(config_text.empty() ? canonical_text() : config_text);
}

StepSchedule RunConfig::schedule() const {
  StepSchedule sched;
  sched.theta = theta;
  sched.rho = rho;
  sched.delta0 = delta0;
  sched.validate(algorithm == Algorithm::zo_dmgd);
  return sched;
}

void RunConfig::validate() const {
  schedule();
  if (iterations < 0) throw std::runtime_error("config: iterations >= 0");
  if (nodes < 1) throw std::runtime_error("config: nodes >= 1");
  if (dim < 1) throw std::runtime_error("config: dim >= 1");
  if (cadence < 1) throw std::runtime_error("config: cadence >= 1");
  if (algorithm == Algorithm::dsgd_t && dsgd_T < 1)
    throw std::runtime_error("config: T >= 1 for dsgd_t");
  if (objective == ObjectiveKind::quadratic && components < 1)
    throw std::runtime_error("config: components >= 1");
  if (objective == ObjectiveKind::ar_logistic && ref_samples_per_node < 1)
    throw std::runtime_error("config: ref_samples_per_node >= 1");
}

RunConfig RunConfig::from_text(const std::string& text) {
  KeyValueConfig kv = KeyValueConfig::parse(text);
  RunConfig cfg;
  cfg.algorithm = parse_algorithm(kv.get_string("algorithm", "dmgd"));
  cfg.iterations = kv.get_int("iterations");
  cfg.theta = kv.get_real("theta", 0.51);
  cfg.rho = kv.get_real("rho", 0.6);
  cfg.delta0 = kv.get_real("delta0", 1.0);
  cfg.dsgd_T = static_cast<int>(kv.get_int("T", 1));
  const auto topo = parse_graph_kind(kv.get_string("topology", "ring"));
  if (!topo) throw std::runtime_error("config: unknown topology");
  cfg.topology = *topo;
  cfg.nodes = static_cast<int>(kv.get_int("nodes"));
  cfg.edge_prob = kv.get_real("edge_prob", 0.0);
  cfg.objective =
      parse_objective_kind(kv.get_string("objective", "quadratic"));
  cfg.dim = static_cast<int>(kv.get_int("dim"));
  cfg.components = static_cast<int>(kv.get_int("components", 4));
  cfg.chain = parse_chain_kind(kv.get_string("chain", "lazy_path"));
  cfg.center_scale = kv.get_real("center_scale", 0.1);
  cfg.clip_factor = kv.get_real("clip_factor", 10.0);
  cfg.ref_samples_per_node =
      static_cast<int>(kv.get_int("ref_samples_per_node", 4000));
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 1));
  cfg.cadence = kv.get_int("cadence", 10);
  cfg.x0_fill = kv.get_real("x0", 0.0);
  kv.reject_unknown();
  cfg.config_text = text;
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str());
}

FiniteMarkovChain build_chain(ChainKind kind, int states) {
  switch (kind) {
    case ChainKind::lazy_path:
      return build_random_walk_chain(build_graph(GraphKind::path, states, 0));
    case ChainKind::lazy_ring:
      return build_random_walk_chain(build_graph(GraphKind::ring, states, 0));
    case ChainKind::lazy_complete:
      return build_random_walk_chain(
          build_graph(GraphKind::complete, states, 0));
    case ChainKind::uniform:
      return build_uniform_chain(states);
  }
  throw std::logic_error("unreachable chain kind");
}

RunSetup build_run_setup(const RunConfig& cfg) {
  RunSetup setup;
  if (cfg.algorithm != Algorithm::mcgd) {
    const CommGraph g =
        build_graph(cfg.topology, cfg.nodes, cfg.seed, cfg.edge_prob);
    setup.W = metropolis_weights(g);
    setup.has_mixing = true;
  }
  if (cfg.objective == ObjectiveKind::quadratic) {
    FiniteMarkovChain chain = build_chain(cfg.chain, cfg.components);
    auto quad = make_random_quadratic(
        cfg.nodes, cfg.components, cfg.dim, cfg.seed,
        chain.pi_star.transpose(), cfg.center_scale);
    auto wl = std::make_unique<FiniteChainWorkload>(quad, std::move(chain),
                                                    cfg.seed);
    wl->set_reference_value(quad->optimum_value());
    setup.workload = std::move(wl);
  } else {
    ArLogisticWorkload::Options opt;
    opt.nodes = cfg.nodes;
    opt.dim = cfg.dim;
    opt.seed = cfg.seed;
    opt.clip_radius_factor = cfg.clip_factor;
    opt.reference_samples_per_node = cfg.ref_samples_per_node;
    setup.workload = std::make_unique<ArLogisticWorkload>(opt);
  }
  return setup;
}

RunResult run(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunSetup setup = build_run_setup(cfg);
  Workload& wl = *setup.workload;
  const StepSchedule sched = cfg.schedule();

  NodeStateMatrix state = NodeStateMatrix::initialize(
      cfg.nodes, Eigen::VectorXd::Constant(cfg.dim, cfg.x0_fill));

  std::vector<Rng> sphere_rngs;
  if (cfg.algorithm == Algorithm::zo_dmgd)
    for (int i = 0; i < cfg.nodes; ++i)
      sphere_rngs.emplace_back(cfg.seed, static_cast<std::uint64_t>(i),
                               StreamPurpose::sphere);

  RunResult result;
  result.record.config_sha256 = cfg.fingerprint();
  std::uint64_t samples_per_node = 0;

  auto record_row = [&](long long k) {
    MetricRow row;
    row.k = k;
    row.gamma = sched.gamma(k);
    row.consensus_error = consensus_error(state);
    const Eigen::VectorXd xbar = state.row_mean();
    row.grad_norm = wl.mean_gradient(xbar).norm();
    row.objective_error = wl.objective_value(xbar) - wl.reference_value();
    row.samples_per_node = samples_per_node;
    row.wall_ms = 0;  // deterministic output; timing reported separately
    result.record.push(row);
  };

  record_row(0);
  for (long long k = 0; k < cfg.iterations; ++k) {
    const double gamma = sched.gamma(k);
    try {
      switch (cfg.algorithm) {
        case Algorithm::dmgd:
          dmgd_step(state, setup.W, wl, gamma);
          samples_per_node += 1;
          break;
        case Algorithm::zo_dmgd:
          zo_dmgd_step(state, setup.W, wl, gamma, sched.delta(k),
                       sphere_rngs);
          samples_per_node += 1;
          break;
        case Algorithm::dsgd_t:
          dsgd_t_step(state, setup.W, wl, gamma, cfg.dsgd_T);
          samples_per_node += static_cast<std::uint64_t>(cfg.dsgd_T);
          break;
        case Algorithm::mcgd: {
          Eigen::VectorXd x = state.x.row(0).transpose();
          mcgd_step(x, wl, gamma);
          for (int i = 0; i < cfg.nodes; ++i) state.x.row(i) = x.transpose();
          ++state.k;
          samples_per_node += 1;
          break;
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("run failed at iteration " +
                               std::to_string(k) + ": " + e.what());
    }
    const long long done = k + 1;
    if (done == 1 || done % cfg.cadence == 0 || done == cfg.iterations)
      record_row(done);
  }

  result.final_state = std::move(state);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace dmgd
