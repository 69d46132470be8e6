#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dmgd {

// Formats a double with 17 significant digits (round-trip exact).
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Plain-text matrix format: one row per line, space-separated decimals.
inline std::string matrix_to_text(
    const Eigen::Ref<const Eigen::MatrixXd>& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out += ' ';
      out += format_g17(M(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void save_matrix(const std::string& path,
                        const Eigen::Ref<const Eigen::MatrixXd>& M) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_matrix: cannot open " + path);
  f << matrix_to_text(M);
  if (!f) throw std::runtime_error("save_matrix: write failed on " + path);
}

inline Eigen::MatrixXd parse_matrix_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof())
      throw std::runtime_error("parse_matrix_text: malformed line: " + line);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("parse_matrix_text: empty input");
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols)
      throw std::runtime_error("parse_matrix_text: ragged rows");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return M;
}

inline Eigen::MatrixXd load_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_matrix: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_matrix_text(ss.str());
}

// Trajectory dump: one state index per line.
inline void save_trajectory(const std::string& path,
                            const std::vector<int>& states) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_trajectory: cannot open " + path);
  for (int s : states) f << s << '\n';
  if (!f) throw std::runtime_error("save_trajectory: write failed on " + path);
}

// Binary batch format: one text header line "rows cols\n" followed by
// row-major little-endian 64-bit floats.
inline void save_batch(const std::string& path,
                       const Eigen::Ref<const Eigen::MatrixXd>& M) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_batch: cannot open " + path);
  f << M.rows() << ' ' << M.cols() << '\n';
  std::vector<double> row(static_cast<std::size_t>(M.cols()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      row[static_cast<std::size_t>(j)] = M(i, j);
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!f) throw std::runtime_error("save_batch: write failed on " + path);
}

inline Eigen::MatrixXd load_batch(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_batch: cannot open " + path);
  std::string header;
  if (!std::getline(f, header))
    throw std::runtime_error("load_batch: missing header in " + path);
  std::istringstream hs(header);
  Eigen::Index rows = 0, cols = 0;
  if (!(hs >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("load_batch: malformed header in " + path);
  Eigen::MatrixXd M(rows, cols);
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (Eigen::Index i = 0; i < rows; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!f) throw std::runtime_error("load_batch: truncated data in " + path);
    for (Eigen::Index j = 0; j < cols; ++j)
      M(i, j) = row[static_cast<std::size_t>(j)];
  }
  return M;
}

}  // namespace dmgd
