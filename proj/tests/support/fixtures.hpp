#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "snnfra/core.hpp"

namespace fixture {

inline std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t d, std::mt19937_64& gen,
                                                    double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows)
    for (auto& v : r) v = u(gen);
  return rows;
}

inline snnfra::DenseMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  snnfra::DenseMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline std::vector<std::vector<double>> to_rows(const snnfra::DenseMatrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return rows;
}

/// Dataset of random samples with ids d<i>/t<i>.
inline snnfra::PairDataset random_pairs(std::size_t n, std::size_t d, snnfra::Label label, std::mt19937_64& gen,
                                        const std::string& prefix = "p") {
  snnfra::PairDataset ds(d);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    snnfra::PairSample s;
    s.drug = prefix + "d" + std::to_string(i);
    s.target = prefix + "t" + std::to_string(i);
    s.features.resize(d);
    for (auto& v : s.features) v = u(gen);
    s.label = label;
    ds.add(std::move(s));
  }
  return ds;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("snnfra-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
