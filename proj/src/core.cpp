#include "snnfra/core.hpp"

#include <cmath>
#include <numeric>

#include "snnfra/error.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, "DenseMatrix data size does not match shape");
}

void DenseMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  require(values.size() == cols_, "append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] < rows_, "select_rows: index out of range");
    std::copy_n(data_.begin() + indices[i] * cols_, cols_, out.data_.begin() + i * cols_);
  }
  return out;
}

DenseMatrix DenseMatrix::select_cols(std::span<const std::size_t> indices) const {
  DenseMatrix out(rows_, indices.size());
  for (std::size_t j : indices) require(j < cols_, "select_cols: index out of range");
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
  return out;
}

FeatureStats FeatureStats::compute(const DenseMatrix& values) {
  const std::size_t n = values.rows();
  const std::size_t d = values.cols();
  FeatureStats s;
  s.min.assign(d, 0.0);
  s.max.assign(d, 0.0);
  s.variance.assign(d, 0.0);
  if (n == 0) return s;
  for (std::size_t j = 0; j < d; ++j) {
    double lo = values(0, j), hi = values(0, j), sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = values(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = values(i, j) - mean;
      ss += dv * dv;
    }
    s.min[j] = lo;
    s.max[j] = hi;
    s.variance[j] = ss / static_cast<double>(n);
  }
  return s;
}

FeatureMatrix::FeatureMatrix(std::vector<EntityId> ids_in, DenseMatrix values_in, std::vector<std::string> names)
    : ids(std::move(ids_in)), values(std::move(values_in)), feature_names(std::move(names)) {
  require(ids.size() == values.rows(), "FeatureMatrix: id count differs from row count");
  require(feature_names.size() == values.cols(), "FeatureMatrix: feature name count differs from column count");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) fail(ErrorCode::InvalidInput, "FeatureMatrix: empty id at row " + std::to_string(i));
    if (!index_.emplace(ids[i], i).second) fail(ErrorCode::DuplicateId, "duplicate id '" + ids[i] + "'");
  }
  for (std::size_t i = 0; i < values.rows(); ++i)
    for (std::size_t j = 0; j < values.cols(); ++j)
      if (!std::isfinite(values(i, j)))
        fail(ErrorCode::InvalidValue,
             "non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
  stats = FeatureStats::compute(values);
}

std::optional<std::size_t> FeatureMatrix::find(const EntityId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PairKeyHash::operator()(const PairKey& key) const noexcept {
  return static_cast<std::size_t>(fnv1a64(key.target, fnv1a64(key.drug) ^ 0x1f));
}

void PairDataset::add(PairSample sample) {
  if (!dim_fixed_ && samples_.empty() && dim_ == 0) dim_ = sample.features.size();
  dim_fixed_ = true;
  require(sample.features.size() == dim_, "PairDataset: sample dimension " + std::to_string(sample.features.size()) +
                                              " differs from dataset dimension " + std::to_string(dim_));
  auto key = sample.key();
  if (keys_.contains(key)) fail(ErrorCode::DuplicatePair, "duplicate pair (" + key.drug + ", " + key.target + ")");
  keys_.emplace(std::move(key), samples_.size());
  switch (sample.label) {
    case Label::positive: ++counts_.positive; break;
    case Label::negative: ++counts_.negative; break;
    case Label::unannotated: ++counts_.unannotated; break;
  }
  samples_.push_back(std::move(sample));
}

std::optional<std::size_t> PairDataset::find(const PairKey& key) const {
  auto it = keys_.find(key);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

void PairDataset::set_score(std::size_t i, double score) {
  require(i < samples_.size(), "set_score: index out of range");
  if (!(score >= 0.0 && score <= 1.0)) fail(ErrorCode::InvalidValue, "score outside [0,1]");
  samples_[i].frua_score = score;
}

DenseMatrix PairDataset::feature_matrix() const {
  DenseMatrix m(samples_.size(), dim_);
  for (std::size_t i = 0; i < samples_.size(); ++i)
    std::copy(samples_[i].features.begin(), samples_[i].features.end(), m.row(i).begin());
  return m;
}

std::vector<int> PairDataset::binary_labels() const {
  std::vector<int> y(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].label == Label::unannotated)
      fail(ErrorCode::InvalidInput, "binary_labels: unannotated sample at index " + std::to_string(i));
    y[i] = samples_[i].label == Label::positive ? 1 : 0;
  }
  return y;
}

std::vector<std::vector<std::size_t>> GroupSplit::members() const {
  std::vector<std::vector<std::size_t>> out(group_count);
  for (std::size_t i = 0; i < group_of.size(); ++i) out[group_of[i]].push_back(i);
  return out;
}

FeatureMatrix min_max_normalize(const FeatureMatrix& matrix) {
  if (matrix.values.rows() == 0 || matrix.values.cols() == 0)
    fail(ErrorCode::InvalidInput, "min_max_normalize: empty matrix");
  const auto& st = matrix.stats;
  DenseMatrix out = matrix.values;
  for (std::size_t j = 0; j < out.cols(); ++j) {
    const double lo = st.min[j];
    const double range = st.max[j] - lo;
    for (std::size_t i = 0; i < out.rows(); ++i) {
      if (range > 0.0) {
        // max/min guard against rounding just outside [0, 1]
        out(i, j) = std::min(1.0, std::max(0.0, (out(i, j) - lo) / range));
      } else {
        out(i, j) = 0.0;
      }
    }
  }
  return FeatureMatrix(matrix.ids, std::move(out), matrix.feature_names);
}

PairSample concat_pair(std::span<const double> drug_row, std::span<const double> target_row, EntityId drug,
                       EntityId target, Label label) {
  require(!drug_row.empty() && !target_row.empty(), "concat_pair: zero-dimensional side");
  PairSample s;
  s.drug = std::move(drug);
  s.target = std::move(target);
  s.features.reserve(drug_row.size() + target_row.size());
  s.features.insert(s.features.end(), drug_row.begin(), drug_row.end());
  s.features.insert(s.features.end(), target_row.begin(), target_row.end());
  s.label = label;
  return s;
}

GroupSplit split_into_groups(std::size_t n_samples, std::size_t group_count, std::uint64_t seed) {
  require(group_count >= 1, "split_into_groups: group_count must be at least 1");
  require(group_count <= n_samples, "split_into_groups: group_count " + std::to_string(group_count) +
                                        " exceeds sample count " + std::to_string(n_samples));
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  GroupSplit split;
  split.group_of.assign(n_samples, 0);
  split.group_count = group_count;
  split.seed = seed;
  for (std::size_t p = 0; p < n_samples; ++p) split.group_of[order[p]] = p % group_count;
  return split;
}

}  // namespace snnfra
