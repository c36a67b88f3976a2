#pragma once

#include <cstdint>
#include <vector>

#include "snnfra/core.hpp"
#include "snnfra/io.hpp"

namespace snnfra {

struct ThresholdPolicy {
  double t_p = 0.8;
  double t_q = 0.2;

  /// 0 <= t_q <= t_p <= 1, else InvalidInput.
  void validate() const;
};

/// Candidate indices per outcome, each ascending.
struct Partition {
  std::vector<std::size_t> promoted;
  std::vector<std::size_t> retained;
  std::vector<std::size_t> discarded;
};

/// score >= t_p promotes, else score <= t_q retains, else the candidate is
/// dropped. Scores are matched to candidates by key.
Partition threshold_partition(const FruaScoreTable& scores, const PairDataset& candidates,
                              const ThresholdPolicy& policy);

struct BalancedDataset {
  PairDataset data;
  std::vector<std::uint8_t> synthetic;  // per sample
  Label minority = Label::positive;
  std::size_t minority_seeds = 0;        // real minority samples ADASYN drew from
  std::vector<std::size_t> generated;    // g_i per minority seed, in dataset order
  std::vector<std::pair<std::size_t, std::size_t>> parents;  // per synthetic sample: (x_i, x_z) rows of the input
  bool uniform_fallback = false;
};

/// Adaptive synthetic oversampling of the minority class. Synthetic samples
/// are appended after the input samples; their drug id is "syn<N>:<drug>" and
/// their target id the parent's. Each minority seed draws from its own
/// substream.
BalancedDataset adasyn(const PairDataset& dataset, double beta, std::size_t k, std::uint64_t seed);

/// threshold_partition, then ADASYN on (positives ∪ promoted) against the
/// retained candidates. Promoted samples become positive and keep their scores.
BalancedDataset balance(const PairDataset& positives, const PairDataset& candidates, const FruaScoreTable& scores,
                        const ThresholdPolicy& policy, double beta, std::size_t k, std::uint64_t seed);

}  // namespace snnfra
