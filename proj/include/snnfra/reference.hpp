#pragma once

// Straightforward single-threaded versions of the parallel kernels. They
// share no code paths with the optimized implementations beyond the kernel
// and connectives, and exist to be compared against in tests and benchmarks.

#include "snnfra/core.hpp"
#include "snnfra/fuzzyrough.hpp"
#include "snnfra/io.hpp"
#include "snnfra/neighbors.hpp"

namespace snnfra::reference {

DenseMatrix pairwise_distances(const DenseMatrix& points);

/// Full sort of every row of the distance matrix.
NeighborTable knn_table(const DenseMatrix& points, std::size_t k);

/// Builds every (positive group, candidate group) decision table explicitly
/// and evaluates upper_approximation row by row.
FruaScoreTable averaged_frua(const PairDataset& positives, const PairDataset& candidates,
                             const SimilarityKernel& kernel, const Connectives& connectives,
                             const FruaOptions& options);

}  // namespace snnfra::reference
