#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snnfra/core.hpp"
#include "snnfra/learners.hpp"

namespace snnfra {

struct PcaModel {
  std::vector<double> mean;                 // d
  DenseMatrix components;                   // q x d, orthonormal rows
  std::vector<double> explained_variance;   // q, nonincreasing
  std::vector<double> singular_values;      // q
  std::size_t n_seen = 0;
  double total_variance = 0.0;              // sum of per-feature sample variances

  std::size_t dim() const noexcept { return mean.size(); }
  std::size_t components_count() const noexcept { return components.rows(); }
  double explained_variance_ratio() const;
};

/// Mean-augmented incremental SVD. Each partial_fit stacks the previous
/// components scaled by their singular values, the centered batch and one
/// mean-correction row, then keeps the top q right singular vectors.
class IncrementalPca {
 public:
  explicit IncrementalPca(std::size_t q) : q_(q) {}

  void partial_fit(const DenseMatrix& batch);
  const PcaModel& model() const noexcept { return model_; }

 private:
  std::size_t q_;
  PcaModel model_;
  std::vector<double> m2_;  // running sum of squared deviations per feature
};

/// Fits over consecutive row batches of `batch_size`; a trailing batch
/// shorter than q is merged into the one before it.
PcaModel ipca_fit(const DenseMatrix& matrix, std::size_t q, std::size_t batch_size);
DenseMatrix ipca_transform(const PcaModel& model, const DenseMatrix& matrix);
DenseMatrix ipca_inverse_transform(const PcaModel& model, const DenseMatrix& reduced);

/// Smallest q whose cumulative explained variance reaches `fraction` of the
/// total, capped at `cap` and at the number of fitted components.
std::size_t components_for_variance(const PcaModel& model, double fraction, std::size_t cap);
PcaModel truncate_components(const PcaModel& model, std::size_t q);

std::string render_pca_model(const PcaModel& model);
PcaModel parse_pca_model(const std::vector<std::string>& lines);

struct ImportanceOptions {
  std::size_t minority_groups = 1;
  ForestParams forest;
  std::uint64_t seed = 0;
};

/// Splits each class into groups of roughly the minority-group size, fits one
/// forest per (positive group, negative group) pair and averages their
/// impurity-decrease importances. Result is nonnegative and sums to 1 unless
/// no forest found any split, in which case it is all zero.
std::vector<double> rf_feature_importance(const DenseMatrix& features, const std::vector<int>& labels,
                                          const ImportanceOptions& options);

/// Indices of the k largest importances (ties to the lower index), ascending.
std::vector<std::size_t> select_top_k_features(const std::vector<double>& importances, std::size_t k);

}  // namespace snnfra
