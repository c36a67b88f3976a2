#include "snnfra/neighbors.hpp"

#include <algorithm>
#include <numeric>

#include "snnfra/error.hpp"
#include "snnfra/parallel.hpp"

namespace snnfra {

namespace {

// Selects the k best (distance, index) pairs of one row, self excluded.
void select_row(std::span<const double> row_distances, std::size_t self, std::size_t k,
                std::vector<std::pair<double, std::size_t>>& scratch, std::size_t* out_idx, double* out_dist) {
  scratch.clear();
  for (std::size_t j = 0; j < row_distances.size(); ++j)
    if (j != self) scratch.emplace_back(row_distances[j], j);
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
  for (std::size_t r = 0; r < k; ++r) {
    out_dist[r] = scratch[r].first;
    out_idx[r] = scratch[r].second;
  }
}

}  // namespace

DenseMatrix pairwise_distances(const DenseMatrix& points) {
  const std::size_t n = points.rows();
  require(n > 0, "pairwise_distances: empty point set");
  DenseMatrix dist(n, n);
  const auto ln = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < ln; ++i) {
    const auto a = points.row(static_cast<std::size_t>(i));
    auto out = dist.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < n; ++j) out[j] = (j == static_cast<std::size_t>(i)) ? 0.0 : euclidean(a, points.row(j));
  }
  return dist;
}

NeighborTable knn_table(const DenseMatrix& distances, std::size_t k) {
  const std::size_t n = distances.rows();
  require(distances.cols() == n, "knn_table: distance matrix must be square");
  require(k >= 1 && k < n, "knn_table: k must satisfy 1 <= k <= n-1 (k=" + std::to_string(k) +
                               ", n=" + std::to_string(n) + ")");
  NeighborTable t{n, k, std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
  const auto ln = static_cast<long long>(n);
#pragma omp parallel
  {
    std::vector<std::pair<double, std::size_t>> scratch;
    scratch.reserve(n);
#pragma omp for schedule(static)
    for (long long i = 0; i < ln; ++i) {
      const auto r = static_cast<std::size_t>(i);
      select_row(distances.row(r), r, k, scratch, t.indices.data() + r * k, t.distances.data() + r * k);
    }
  }
  return t;
}

NeighborTable knn_table_blocked(const DenseMatrix& points, std::size_t k, std::size_t block_rows) {
  const std::size_t n = points.rows();
  require(n > 0, "knn_table_blocked: empty point set");
  require(k >= 1 && k < n, "knn_table_blocked: k must satisfy 1 <= k <= n-1 (k=" + std::to_string(k) +
                               ", n=" + std::to_string(n) + ")");
  require(block_rows > 0, "knn_table_blocked: block_rows must be positive");
  NeighborTable t{n, k, std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
  for (std::size_t start = 0; start < n; start += block_rows) {
    const std::size_t stop = std::min(n, start + block_rows);
    const auto lb = static_cast<long long>(start), le = static_cast<long long>(stop);
#pragma omp parallel
    {
      std::vector<double> row(n);
      std::vector<std::pair<double, std::size_t>> scratch;
      scratch.reserve(n);
#pragma omp for schedule(dynamic, 8)
      for (long long i = lb; i < le; ++i) {
        const auto r = static_cast<std::size_t>(i);
        const auto a = points.row(r);
        for (std::size_t j = 0; j < n; ++j) row[j] = (j == r) ? 0.0 : euclidean(a, points.row(j));
        select_row(row, r, k, scratch, t.indices.data() + r * k, t.distances.data() + r * k);
      }
    }
  }
  return t;
}

std::size_t snn_overlap(const NeighborTable& table, std::size_t x, std::size_t y) {
  require(x < table.n && y < table.n, "snn_overlap: index out of range");
  require(x != y, "snn_overlap: x and y must differ");
  std::vector<std::size_t> a(table.neighbors(x).begin(), table.neighbors(x).end());
  std::vector<std::size_t> b(table.neighbors(y).begin(), table.neighbors(y).end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t count = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

SharedNeighborIndex::SharedNeighborIndex(const NeighborTable& table) : table_(table), in_degree_(table.n, 0) {
  for (std::size_t p : table.indices) ++in_degree_[p];
}

std::vector<std::size_t> SharedNeighborIndex::shared_set(std::size_t i) const {
  require(i < table_.n, "shared_set: index out of range");
  std::vector<std::size_t> out;
  for (std::size_t p : table_.neighbors(i))
    if (in_degree_[p] >= 2) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> shared_nn_set(const NeighborTable& table, std::size_t i) {
  return SharedNeighborIndex(table).shared_set(i);
}

}  // namespace snnfra
