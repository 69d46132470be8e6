#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmgd/matrix_io.hpp"
#include "dmgd/optimizer.hpp"
#include "dmgd/workload.hpp"

namespace dmgd {

// Average distance of the node iterates from their mean:
// (1/m) sum_i ||x(i) - xbar||_2.
inline double consensus_error(const NodeStateMatrix& s) {
  const Eigen::VectorXd xbar = s.row_mean();
  double acc = 0.0;
  for (int i = 0; i < s.nodes(); ++i)
    acc += (s.x.row(i).transpose() - xbar).norm();
  return acc / s.nodes();
}

// ||grad f(xbar)||_2; for streaming workloads the gradient is a frozen-batch
// estimate whose sample count the workload reports.
inline double grad_norm_at_mean(const NodeStateMatrix& s, const Workload& w) {
  return w.mean_gradient(s.row_mean()).norm();
}

struct MetricRow {
  long long k = 0;
  double gamma = 0.0;
  double consensus_error = 0.0;
  double grad_norm = 0.0;
  double objective_error = 0.0;
  std::uint64_t samples_per_node = 0;
  std::uint64_t wall_ms = 0;
};

// Per-run metrics stream. Rows are strictly increasing in k and the sample
// counter never decreases.
struct RunRecord {
  std::string config_sha256;
  std::vector<MetricRow> rows;

  void push(MetricRow row) {
    if (!rows.empty()) {
      if (row.k <= rows.back().k)
        throw std::logic_error("run record: rows must be increasing in k");
      if (row.samples_per_node < rows.back().samples_per_node)
        throw std::logic_error("run record: sample counter decreased");
    }
    rows.push_back(row);
  }

  const MetricRow& final_row() const {
    if (rows.empty()) throw std::logic_error("run record: empty");
    return rows.back();
  }
};

inline constexpr const char* kCsvHeader =
    "k,gamma,consensus_error,grad_norm,objective_error,samples_per_node,"
    "wall_ms";

inline std::string record_to_csv(const RunRecord& r) {
  std::string out = "# config_sha256=" + r.config_sha256 + "\n";
  out += kCsvHeader;
  out += '\n';
  for (const auto& row : r.rows) {
    out += std::to_string(row.k);
    out += ',';
    out += format_g17(row.gamma);
    out += ',';
    out += format_g17(row.consensus_error);
    out += ',';
    out += format_g17(row.grad_norm);
    out += ',';
    out += format_g17(row.objective_error);
    out += ',';
    out += std::to_string(row.samples_per_node);
    out += ',';
    out += std::to_string(row.wall_ms);
    out += '\n';
  }
  return out;
}

inline void emit_csv(const RunRecord& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
  f << record_to_csv(r);
  if (!f) throw std::runtime_error("emit_csv: write failed on " + path);
}

inline RunRecord parse_csv(const std::string& text) {
  RunRecord r;
  std::istringstream lines(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (line.rfind("# config_sha256=", 0) == 0) {
      r.config_sha256 = line.substr(std::string("# config_sha256=").size());
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader)
        throw std::runtime_error("parse_csv: unexpected header: " + line);
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    MetricRow row;
    char comma;
    if (!(ls >> row.k >> comma >> row.gamma >> comma >> row.consensus_error >>
          comma >> row.grad_norm >> comma >> row.objective_error >> comma >>
          row.samples_per_node >> comma >> row.wall_ms))
      throw std::runtime_error("parse_csv: malformed row: " + line);
    r.push(row);
  }
  if (!header_seen) throw std::runtime_error("parse_csv: missing header");
  return r;
}

inline RunRecord load_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_csv: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace dmgd
