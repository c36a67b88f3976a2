#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snnfra/config.hpp"
#include "snnfra/core.hpp"
#include "snnfra/learners.hpp"

namespace snnfra {

enum class GridMetric { auc, f1, gmean };

GridMetric parse_grid_metric(const std::string& s);

/// Cartesian product of the [grid] lists over the base spec, in the order
/// max_depth, min_samples_leaf, min_samples_split, n_estimators,
/// learning_rate (last varies fastest). Empty lists keep the base value.
std::vector<ClassifierSpec> expand_grid(const ClassifierSpec& base, const RunConfig& config);

struct GridCell {
  ClassifierSpec spec;
  double score = 0.0;  // NaN when the cell failed
  std::string error;
};

struct GridResult {
  std::vector<GridCell> cells;
  std::size_t best = 0;
};

/// Mean CV metric per cell. A cell whose parameters are rejected records
/// its error instead of aborting; the best cell is the first one with the
/// highest score. Throws InvalidInput if no cell could be evaluated.
GridResult grid_search(const PairDataset& data, const std::vector<ClassifierSpec>& cells, std::size_t folds,
                       GridMetric metric, std::uint64_t seed, std::span<const std::uint8_t> synthetic = {});

}  // namespace snnfra
