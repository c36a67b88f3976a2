#pragma once

#include <cstdint>
#include <vector>

#include "snnfra/core.hpp"
#include "snnfra/io.hpp"

namespace snnfra {

/// One positive sample per approved interaction, in interaction order.
PairDataset build_positive_samples(const InteractionSet& interactions, const FeatureMatrix& drugs,
                                   const FeatureMatrix& targets);

struct CandidateOptions {
  std::size_t k = 11;
  std::size_t k_min = 2;
  std::size_t k_max = 10;
  std::size_t block_rows = 1024;
  std::size_t entity_pca_components = 0;  // 0: neighbors and medoids on the normalized features
  std::uint64_t seed = 0;
};

struct CandidatePool {
  PairDataset positives;
  PairDataset candidates;               // label negative
  std::vector<PairKey> provenance;      // per candidate: the interaction that first produced it
  std::vector<std::vector<std::size_t>> drug_reps;    // per drug row; empty for drugs without interactions
  std::vector<std::vector<std::size_t>> target_reps;  // per target row
};

/// For every approved (i, j): the medoid representatives of i's shared-neighbor
/// set are paired with those of j's. The union over interactions, deduplicated
/// by key in interaction order and stripped of approved pairs, is the pool.
///
/// Neighbor tables are built once per side. Representatives are computed once
/// per interacting entity, in parallel, and merged in interaction order, so
/// the pool does not depend on the thread count.
CandidatePool generate_candidates(const InteractionSet& interactions, const FeatureMatrix& drugs,
                                  const FeatureMatrix& targets, const CandidateOptions& options);

/// positives then candidates. Throws DuplicatePair on a shared key.
PairDataset assemble_training_pool(const PairDataset& positives, const PairDataset& candidates);

}  // namespace snnfra
