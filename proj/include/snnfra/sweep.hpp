#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snnfra/config.hpp"
#include "snnfra/evaluate.hpp"
#include "snnfra/io.hpp"
#include "snnfra/learners.hpp"
#include "snnfra/resample.hpp"

namespace snnfra {

/// Seed names shared by the pipeline stages and the sweep, so one sweep row
/// reproduces the corresponding direct run.
namespace streams {
inline constexpr const char* balance = "balance";
inline constexpr const char* holdout = "holdout";
inline constexpr const char* train = "train";
inline constexpr const char* cv = "cv";
}  // namespace streams

struct HoldoutResult {
  HoldoutSplit split;
  MetricsReport metrics;
  std::vector<double> test_scores;
};

/// Stratified holdout of a balanced dataset (synthetic samples train only),
/// fit on the train side, metrics on the test side.
HoldoutResult run_holdout(const BalancedDataset& balanced, const ClassifierSpec& spec, double ratio,
                          std::uint64_t seed);

struct SweepOptions {
  ThresholdPolicy base;
  SweepParam param = SweepParam::tq;
  double beta = 1.0;
  std::size_t adasyn_k = 5;
  ClassifierSpec classifier;
  double holdout_ratio = 0.7;
  std::uint64_t seed = 0;
};

struct SweepRow {
  double threshold = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  double gmean = 0.0;
  double runtime_s = 0.0;
  std::string error;  // empty on success; metrics are 0 otherwise
};

/// balance -> holdout -> train -> metrics once per threshold, which replaces
/// t_q (or t_p) of the base policy. Failures are recorded in the row. Rows
/// come back sorted by threshold.
std::vector<SweepRow> threshold_sweep(const PairDataset& positives, const PairDataset& candidates,
                                      const FruaScoreTable& scores, const std::vector<double>& thresholds,
                                      const SweepOptions& options);

/// `threshold,auc,f1,gmean,runtime_s,error`.
std::string render_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace snnfra
