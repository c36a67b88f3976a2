#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace snnfra {

using EntityId = std::string;

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  void append_row(std::span<const double> values);

  /// Rows in the given order; indices may repeat.
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;
  DenseMatrix select_cols(std::span<const std::size_t> indices) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Per-column min, max and population variance.
struct FeatureStats {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> variance;

  static FeatureStats compute(const DenseMatrix& values);
  std::size_t size() const noexcept { return min.size(); }
};

struct FeatureMatrix {
  std::vector<EntityId> ids;
  DenseMatrix values;
  std::vector<std::string> feature_names;
  FeatureStats stats;

  FeatureMatrix() = default;
  /// Validates shape, id uniqueness and finiteness, then computes stats.
  FeatureMatrix(std::vector<EntityId> ids, DenseMatrix values, std::vector<std::string> feature_names);

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t dim() const noexcept { return values.cols(); }
  std::span<const double> row(std::size_t i) const { return values.row(i); }

  /// Row index for an id, if present.
  std::optional<std::size_t> find(const EntityId& id) const;

 private:
  std::unordered_map<EntityId, std::size_t> index_;
};

enum class Label : int { negative = 0, positive = 1, unannotated = 2 };

struct PairKey {
  EntityId drug;
  EntityId target;
  friend bool operator==(const PairKey&, const PairKey&) = default;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& key) const noexcept;
};

struct PairSample {
  EntityId drug;
  EntityId target;
  std::vector<double> features;
  Label label = Label::unannotated;
  std::optional<double> frua_score;

  PairKey key() const { return {drug, target}; }
};

struct ClassCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t unannotated = 0;
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Ordered samples sharing one dimension; (drug, target) keys are unique.
class PairDataset {
 public:
  PairDataset() = default;
  explicit PairDataset(std::size_t dim) : dim_(dim) {}

  /// Throws DuplicatePair on a repeated key, InvalidInput on a dimension mismatch.
  void add(PairSample sample);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  const ClassCounts& class_counts() const noexcept { return counts_; }

  const PairSample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<PairSample>& samples() const noexcept { return samples_; }
  bool contains(const PairKey& key) const { return keys_.contains(key); }
  std::optional<std::size_t> find(const PairKey& key) const;

  void set_score(std::size_t i, double score);

  DenseMatrix feature_matrix() const;
  std::vector<int> binary_labels() const;

 private:
  std::size_t dim_ = 0;
  bool dim_fixed_ = false;
  std::vector<PairSample> samples_;
  std::unordered_map<PairKey, std::size_t, PairKeyHash> keys_;
  ClassCounts counts_;
};

struct GroupSplit {
  std::vector<std::size_t> group_of;  // sample index -> group index
  std::size_t group_count = 0;
  std::uint64_t seed = 0;

  /// Sample indices per group, each ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

/// Columns mapped to [0, 1]; constant columns become 0.
FeatureMatrix min_max_normalize(const FeatureMatrix& matrix);

/// drug_row ++ target_row.
PairSample concat_pair(std::span<const double> drug_row, std::span<const double> target_row, EntityId drug,
                       EntityId target, Label label);

/// Seeded shuffle, then round-robin assignment into group_count groups.
GroupSplit split_into_groups(std::size_t n_samples, std::size_t group_count, std::uint64_t seed);

}  // namespace snnfra
