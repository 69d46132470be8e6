// Command-line front end: mixing-matrix validation, chain spectra,
// simulator runs, the figure-1 comparison experiment, and gradient checks.
//
// Exit codes: 0 success, 1 validation failure, 2 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dmgd/experiment.hpp"
#include "dmgd/markov.hpp"
#include "dmgd/matrix_io.hpp"
#include "dmgd/mixing.hpp"
#include "dmgd/objective.hpp"
#include "dmgd/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<long long> cadence;
};

// Seed precedence: --seed flag, then DMGD_SIM_SEED, then the config file.
std::optional<std::uint64_t> effective_seed(const CommonOpts& opts) {
  if (opts.seed) return opts.seed;
  if (const char* env = std::getenv("DMGD_SIM_SEED"))
    return std::stoull(env);
  return std::nullopt;
}

dmgd::KeyValueConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return dmgd::KeyValueConfig::parse(ss.str());
}

int cmd_validate_mixing(const CommonOpts& opts) {
  dmgd::KeyValueConfig kv = load_config(opts.config_path);
  const auto topo = dmgd::parse_graph_kind(kv.get_string("topology", "path"));
  if (!topo) throw std::runtime_error("config: unknown topology");
  const int nodes = static_cast<int>(kv.get_int("nodes"));
  const double edge_prob = kv.get_real("edge_prob", 0.0);
  const std::uint64_t seed =
      effective_seed(opts).value_or(kv.get_int("seed", 1));
  const std::string matrix_path = kv.get_string("matrix", "");
  kv.reject_unknown();

  const dmgd::CommGraph g = dmgd::build_graph(*topo, nodes, seed, edge_prob);
  const dmgd::MixingMatrix mm =
      matrix_path.empty()
          ? dmgd::metropolis_weights(g)
          : dmgd::wrap_mixing_matrix(dmgd::load_matrix(matrix_path));
  const dmgd::MixingReport rep = dmgd::validate_mixing(mm, g);
  for (const auto& c : rep.checks)
    std::cout << c.name << ": " << (c.pass ? "PASS" : "FAIL")
              << " (violation " << dmgd::format_g17(c.violation) << ")\n";
  std::cout << "lambda2: " << dmgd::format_g17(mm.lambda2) << "\n";
  return rep.all_pass() ? kExitOk : kExitValidation;
}

int cmd_chain_spectra(const CommonOpts& opts) {
  dmgd::KeyValueConfig kv = load_config(opts.config_path);
  const std::string matrix_path = kv.get_string("matrix", "");
  const std::string chain_kind = kv.get_string("chain", "");
  const int states = static_cast<int>(kv.get_int("states", 0));
  kv.reject_unknown();

  Eigen::MatrixXd H;
  if (!matrix_path.empty()) {
    H = dmgd::load_matrix(matrix_path);
  } else if (!chain_kind.empty()) {
    H = dmgd::build_chain(dmgd::parse_chain_kind(chain_kind), states).H;
  } else {
    throw std::runtime_error("config: need matrix=PATH or chain=KIND");
  }

  const dmgd::ChainReport rep = dmgd::validate_chain(H);
  for (const auto& c : rep.checks)
    std::cout << c.name << ": " << (c.pass ? "PASS" : "FAIL")
              << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
  if (!rep.all_pass()) return kExitValidation;

  const dmgd::FiniteMarkovChain chain = dmgd::build_explicit_chain(H);
  std::cout << "pi_star:";
  for (int i = 0; i < chain.states(); ++i)
    std::cout << ' ' << dmgd::format_g17(chain.pi_star(i));
  std::cout << "\nlambda2_abs: " << dmgd::format_g17(chain.lambda2_abs)
            << "\nlambda_min: " << dmgd::format_g17(chain.lambda_min)
            << "\nlambda_hat: " << dmgd::format_g17(chain.lambda_hat)
            << "\nC_H_fit: "
            << dmgd::format_g17(dmgd::fit_deviation_constant(chain)) << "\n";
  return kExitOk;
}

int cmd_run(const CommonOpts& opts) {
  dmgd::RunConfig cfg = dmgd::RunConfig::from_file(opts.config_path);
  if (const auto seed = effective_seed(opts)) {
    cfg.seed = *seed;
    cfg.config_text = cfg.canonical_text();
  }
  if (opts.cadence) {
    cfg.cadence = *opts.cadence;
    cfg.config_text = cfg.canonical_text();
  }
  cfg.validate();
  const dmgd::RunResult result = dmgd::run(cfg);
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    const auto path =
        std::filesystem::path(opts.out_dir) / "metrics.csv";
    dmgd::emit_csv(result.record, path.string());
    std::cerr << "wrote " << path.string() << "\n";
  } else {
    std::cout << dmgd::record_to_csv(result.record);
  }
  const dmgd::MetricRow& last = result.record.final_row();
  std::cerr << "final k=" << last.k
            << " objective_error=" << dmgd::format_g17(last.objective_error)
            << " grad_norm=" << dmgd::format_g17(last.grad_norm)
            << " wall_s=" << result.wall_seconds << "\n";
  return kExitOk;
}

int cmd_figure1(const CommonOpts& opts) {
  dmgd::KeyValueConfig kv = load_config(opts.config_path);
  const auto scale =
      dmgd::parse_experiment_scale(kv.get_string("scale", "desk"));
  const int seed_count = static_cast<int>(kv.get_int("seed_count", 5));
  const std::uint64_t first_seed =
      effective_seed(opts).value_or(kv.get_int("seed", 1));
  const std::uint64_t budget = static_cast<std::uint64_t>(
      kv.get_int("samples_per_node", 128));
  kv.reject_unknown();
  if (seed_count < 1) throw std::runtime_error("config: seed_count >= 1");

  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < seed_count; ++s) seeds.push_back(first_seed + s);
  const auto results = dmgd::figure1_experiment(scale, seeds, opts.out_dir,
                                                budget, opts.jobs);
  for (const auto& res : results) std::cout << res.table_text;
  return kExitOk;
}

int cmd_gradcheck(const CommonOpts& opts) {
  int probes = 100, dim = 10, components = 4, nodes = 3;
  std::uint64_t seed = effective_seed(opts).value_or(1);
  if (!opts.config_path.empty()) {
    dmgd::KeyValueConfig kv = load_config(opts.config_path);
    probes = static_cast<int>(kv.get_int("probes", probes));
    dim = static_cast<int>(kv.get_int("dim", dim));
    components = static_cast<int>(kv.get_int("components", components));
    nodes = static_cast<int>(kv.get_int("nodes", nodes));
    seed = effective_seed(opts).value_or(kv.get_int("seed", 1));
    kv.reject_unknown();
  }

  const auto quad = dmgd::make_random_quadratic(
      nodes, components, dim, seed,
      Eigen::VectorXd::Constant(components, 1.0 / components));
  const auto qres = dmgd::gradient_check(*quad, probes, seed);
  std::cout << "quadratic: " << (qres.pass ? "PASS" : "FAIL")
            << " worst_rel=" << dmgd::format_g17(qres.worst_rel) << "\n";
  const auto lres = dmgd::logistic_gradient_check(probes, dim, seed);
  std::cout << "logistic: " << (lres.pass ? "PASS" : "FAIL")
            << " worst_rel=" << dmgd::format_g17(lres.worst_rel) << "\n";
  return qres.pass && lres.pass ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Decentralized Markov-chain gradient descent simulator.\n"
      "Config files are flat key=value lines with '#' comments.\n\n"
      "run config keys: algorithm (dmgd|zo_dmgd|dsgd_t|mcgd), iterations,\n"
      "  theta, rho, delta0, T, topology (path|ring|complete|erdos_renyi),\n"
      "  nodes, edge_prob, objective (quadratic|ar_logistic), dim,\n"
      "  components, chain (lazy_path|lazy_ring|lazy_complete|uniform),\n"
      "  center_scale, clip_factor, ref_samples_per_node, seed, cadence, x0\n"
      "figure1 config keys: scale (desk|paper), seed, seed_count,\n"
      "  samples_per_node\n"
      "validate-mixing config keys: topology, nodes, edge_prob, seed,\n"
      "  matrix (optional whitespace matrix file)\n"
      "chain-spectra config keys: matrix=PATH or chain=KIND with states=M\n"
      "gradcheck config keys: probes, nodes, components, dim, seed"};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "Path to key=value config");
  app.add_option("--out", opts.out_dir, "Output directory for CSV files");
  app.add_option("--seed", opts.seed,
                 "Seed override (wins over DMGD_SIM_SEED and config)");
  app.add_option("--jobs", opts.jobs, "Max concurrent seeded runs");
  app.add_option("--cadence", opts.cadence, "Metric recording cadence");

  auto* validate = app.add_subcommand(
      "validate-mixing", "Check a mixing matrix against Definition 1");
  auto* spectra = app.add_subcommand(
      "chain-spectra", "Validate a Markov chain and report its spectrum");
  auto* runcmd =
      app.add_subcommand("run", "Execute one configured optimizer run");
  auto* figure1 = app.add_subcommand(
      "figure1", "DMGD vs MCGD vs DSGD-T comparison at a fixed budget");
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Analytic gradients vs central finite differences");
  for (auto* sub : {validate, spectra, runcmd, figure1, gradcheck})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(validate) || app.got_subcommand(spectra) ||
        app.got_subcommand(runcmd) || app.got_subcommand(figure1)) {
      if (opts.config_path.empty())
        throw std::runtime_error("--config is required for this subcommand");
    }
    if (app.got_subcommand(validate)) return cmd_validate_mixing(opts);
    if (app.got_subcommand(spectra)) return cmd_chain_spectra(opts);
    if (app.got_subcommand(runcmd)) return cmd_run(opts);
    if (app.got_subcommand(figure1)) return cmd_figure1(opts);
    if (app.got_subcommand(gradcheck)) return cmd_gradcheck(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
