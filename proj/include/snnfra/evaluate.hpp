#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "snnfra/core.hpp"

namespace snnfra {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Rates whose denominator is zero are reported as 0 and flagged.
struct MetricsReport {
  double auc = 0.0;
  double f1 = 0.0;
  double g_mean = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  Confusion confusion;
  bool sensitivity_undefined = false;
  bool specificity_undefined = false;
  bool f1_undefined = false;
  bool auc_undefined = false;
};

/// Labels and predictions in {0,1}.
MetricsReport confusion_and_rates(std::span<const int> labels, std::span<const int> predictions);

/// Mann-Whitney statistic with average ranks: the probability that a random
/// positive outscores a random negative, ties counted one half. Throws
/// Undefined when either class is absent.
double roc_auc(std::span<const int> labels, std::span<const double> scores);

/// confusion_and_rates at `threshold` plus roc_auc (flagged, 0, when undefined).
MetricsReport evaluate_scores(std::span<const int> labels, std::span<const double> scores, double threshold = 0.5);

/// Component-wise mean of the rates; confusions are summed.
MetricsReport mean_report(const std::vector<MetricsReport>& reports);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;  // per sample; npos for samples that never enter a test fold
  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Stratified seeded folds. Each class is shuffled and dealt round-robin,
/// continuing where the previous class stopped so fold sizes differ by at
/// most one. Samples with `eligible[i] == 0` (when given) are kept out of
/// every test fold and always train. Throws InvalidInput when a class has
/// fewer eligible samples than k.
FoldAssignment stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed,
                                std::span<const std::uint8_t> eligible = {});

/// Scores for `test` from a model trained on `train`.
using ScoringFn = std::function<std::vector<double>(const PairDataset& train, const PairDataset& test)>;

struct CvResult {
  FoldAssignment folds;
  std::vector<MetricsReport> per_fold;
  MetricsReport mean;
};

/// `synthetic[i] != 0` keeps sample i in training only.
CvResult k_fold_cv(const PairDataset& data, std::size_t k, const ScoringFn& fn, std::uint64_t seed,
                   std::span<const std::uint8_t> synthetic = {});

struct HoldoutSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Stratified: round(ratio * n_c) samples of each class train. Synthetic
/// samples (when flagged) always train.
HoldoutSplit holdout_split(const PairDataset& data, double ratio, std::uint64_t seed,
                           std::span<const std::uint8_t> synthetic = {});

/// Samples at the given indices, in that order.
PairDataset subset(const PairDataset& data, std::span<const std::size_t> indices);

}  // namespace snnfra
