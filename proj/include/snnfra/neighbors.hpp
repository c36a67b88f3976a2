#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "snnfra/core.hpp"

namespace snnfra {

/// k nearest other rows per row: ascending distance, ties by smaller index,
/// the row itself never listed.
struct NeighborTable {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // n * k
  std::vector<double> distances;     // n * k

  std::span<const std::size_t> neighbors(std::size_t i) const { return {indices.data() + i * k, k}; }
  std::span<const double> neighbor_distances(std::size_t i) const { return {distances.data() + i * k, k}; }
};

/// Symmetric Euclidean distance matrix with zero diagonal. Rows are computed
/// in parallel; each entry depends only on its two rows, so the result is
/// bitwise identical for any thread count.
DenseMatrix pairwise_distances(const DenseMatrix& points);

NeighborTable knn_table(const DenseMatrix& distances, std::size_t k);

/// Same table as knn_table(pairwise_distances(points), k) but only ever holds
/// block_rows x n distances at a time.
NeighborTable knn_table_blocked(const DenseMatrix& points, std::size_t k, std::size_t block_rows = 1024);

/// |NN_k(x) ∩ NN_k(y)|.
std::size_t snn_overlap(const NeighborTable& table, std::size_t x, std::size_t y);

/// Answers shared-neighbor queries in O(k) each after an O(nk) pass.
///
/// p ∈ NN_k(i) lies in some NN_k(i) ∩ NN_k(r) with r != i exactly when p
/// appears in at least two neighbor lists (row i supplies one, and p never
/// lists itself), so the union over r reduces to an in-degree test.
class SharedNeighborIndex {
 public:
  explicit SharedNeighborIndex(const NeighborTable& table);

  /// ⋃_{r≠i} (NN_k(i) ∩ NN_k(r)), ascending.
  std::vector<std::size_t> shared_set(std::size_t i) const;

  std::size_t in_degree(std::size_t p) const { return in_degree_[p]; }

 private:
  NeighborTable table_;
  std::vector<std::size_t> in_degree_;
};

std::vector<std::size_t> shared_nn_set(const NeighborTable& table, std::size_t i);

}  // namespace snnfra
