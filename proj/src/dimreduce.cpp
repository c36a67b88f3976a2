#include "snnfra/dimreduce.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "snnfra/error.hpp"
#include "snnfra/io.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const DenseMatrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

double PcaModel::explained_variance_ratio() const {
  if (total_variance <= 0.0) return 0.0;
  return std::accumulate(explained_variance.begin(), explained_variance.end(), 0.0) / total_variance;
}

void IncrementalPca::partial_fit(const DenseMatrix& batch) {
  const std::size_t b = batch.rows();
  const std::size_t d = batch.cols();
  require(b > 0, "partial_fit: empty batch");
  require(q_ >= 1 && q_ <= d, "ipca: q=" + std::to_string(q_) + " must satisfy 1 <= q <= d=" + std::to_string(d));
  if (model_.n_seen == 0) {
    require(b >= q_, "ipca: first batch has " + std::to_string(b) + " rows, fewer than q=" + std::to_string(q_));
    model_.mean.assign(d, 0.0);
    m2_.assign(d, 0.0);
  }
  require(model_.mean.size() == d, "ipca: batch dimension differs from fitted dimension");

  const auto x = view(batch);
  const Eigen::RowVectorXd batch_mean = x.colwise().mean();
  const Eigen::Map<const Eigen::RowVectorXd> prev_mean(model_.mean.data(), static_cast<Eigen::Index>(d));
  const double n_prev = static_cast<double>(model_.n_seen);
  const double n_batch = static_cast<double>(b);
  const double n_total = n_prev + n_batch;

  RowMatrix centered = x.rowwise() - batch_mean;

  // Chan et al. merge of per-feature mean / sum of squares.
  const Eigen::RowVectorXd batch_m2 = centered.array().square().colwise().sum();
  const Eigen::RowVectorXd delta = batch_mean - prev_mean;
  Eigen::RowVectorXd new_mean = prev_mean + delta * (n_batch / n_total);
  for (std::size_t f = 0; f < d; ++f)
    m2_[f] += batch_m2[static_cast<Eigen::Index>(f)] +
              delta[static_cast<Eigen::Index>(f)] * delta[static_cast<Eigen::Index>(f)] * n_prev * n_batch / n_total;

  Eigen::MatrixXd stacked;
  if (model_.n_seen == 0) {
    stacked = centered;
  } else {
    const std::size_t q_prev = model_.components.rows();
    stacked.resize(static_cast<Eigen::Index>(q_prev + b + 1), static_cast<Eigen::Index>(d));
    const auto comps = view(model_.components);
    for (std::size_t r = 0; r < q_prev; ++r)
      stacked.row(static_cast<Eigen::Index>(r)) = model_.singular_values[r] * comps.row(static_cast<Eigen::Index>(r));
    stacked.middleRows(static_cast<Eigen::Index>(q_prev), static_cast<Eigen::Index>(b)) = centered;
    stacked.row(static_cast<Eigen::Index>(q_prev + b)) = std::sqrt(n_prev * n_batch / n_total) * (prev_mean - batch_mean);
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  const std::size_t q = std::min<std::size_t>(q_, static_cast<std::size_t>(s.size()));

  model_.components = DenseMatrix(q, d);
  model_.singular_values.assign(q, 0.0);
  model_.explained_variance.assign(q, 0.0);
  for (std::size_t r = 0; r < q; ++r) {
    const auto col = v.col(static_cast<Eigen::Index>(r));
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    const double sign = col[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t f = 0; f < d; ++f) model_.components(r, f) = sign * col[static_cast<Eigen::Index>(f)];
    const double sv = s[static_cast<Eigen::Index>(r)];
    model_.singular_values[r] = sv;
    model_.explained_variance[r] = n_total > 1.0 ? sv * sv / (n_total - 1.0) : 0.0;
  }
  for (std::size_t f = 0; f < d; ++f) model_.mean[f] = new_mean[static_cast<Eigen::Index>(f)];
  model_.n_seen += b;
  double total = 0.0;
  for (double m2 : m2_) total += m2;
  model_.total_variance = n_total > 1.0 ? total / (n_total - 1.0) : 0.0;
}

PcaModel ipca_fit(const DenseMatrix& matrix, std::size_t q, std::size_t batch_size) {
  const std::size_t n = matrix.rows();
  const std::size_t d = matrix.cols();
  require(q >= 1 && q <= d, "ipca_fit: q=" + std::to_string(q) + " exceeds dimension d=" + std::to_string(d));
  require(batch_size >= q, "ipca_fit: batch_size must be at least q");
  require(n >= q, "ipca_fit: fewer rows than components");

  std::vector<std::pair<std::size_t, std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) batches.emplace_back(start, std::min(n, start + batch_size));
  if (batches.size() > 1 && batches.back().second - batches.back().first < q) {
    batches[batches.size() - 2].second = n;
    batches.pop_back();
  }

  IncrementalPca pca(q);
  std::vector<std::size_t> rows;
  for (auto [start, stop] : batches) {
    rows.resize(stop - start);
    std::iota(rows.begin(), rows.end(), start);
    pca.partial_fit(matrix.select_rows(rows));
  }
  return pca.model();
}

DenseMatrix ipca_transform(const PcaModel& model, const DenseMatrix& matrix) {
  const std::size_t d = model.dim();
  require(matrix.cols() == d, "ipca_transform: matrix has " + std::to_string(matrix.cols()) +
                                  " columns, model expects " + std::to_string(d));
  const std::size_t q = model.components_count();
  DenseMatrix out(matrix.rows(), q);
  const auto ln = static_cast<long long>(matrix.rows());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < ln; ++i) {
    const auto r = static_cast<std::size_t>(i);
    const auto x = matrix.row(r);
    for (std::size_t c = 0; c < q; ++c) {
      const auto comp = model.components.row(c);
      double acc = 0.0;
      for (std::size_t f = 0; f < d; ++f) acc += (x[f] - model.mean[f]) * comp[f];
      out(r, c) = acc;
    }
  }
  return out;
}

DenseMatrix ipca_inverse_transform(const PcaModel& model, const DenseMatrix& reduced) {
  const std::size_t q = model.components_count();
  const std::size_t d = model.dim();
  require(reduced.cols() == q, "ipca_inverse_transform: width must equal component count");
  DenseMatrix out(reduced.rows(), d);
  for (std::size_t r = 0; r < reduced.rows(); ++r)
    for (std::size_t f = 0; f < d; ++f) {
      double acc = model.mean[f];
      for (std::size_t c = 0; c < q; ++c) acc += reduced(r, c) * model.components(c, f);
      out(r, f) = acc;
    }
  return out;
}

std::size_t components_for_variance(const PcaModel& model, double fraction, std::size_t cap) {
  const std::size_t q = std::min(cap, model.components_count());
  require(q >= 1, "components_for_variance: model has no components");
  if (model.total_variance <= 0.0) return 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    acc += model.explained_variance[i];
    if (acc >= fraction * model.total_variance) return i + 1;
  }
  return q;
}

PcaModel truncate_components(const PcaModel& model, std::size_t q) {
  require(q >= 1 && q <= model.components_count(), "truncate_components: q out of range");
  PcaModel out = model;
  std::vector<std::size_t> keep(q);
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  out.components = model.components.select_rows(keep);
  out.explained_variance.resize(q);
  out.singular_values.resize(q);
  return out;
}

std::string render_pca_model(const PcaModel& model) {
  auto row = [](const char* tag, std::span<const double> values) {
    std::string s = tag;
    for (double v : values) s += "," + format_double(v);
    return s + "\n";
  };
  std::string out = "# pca-model v1\n";
  out += "n_seen," + std::to_string(model.n_seen) + "\n";
  out += "total_variance," + format_double(model.total_variance) + "\n";
  out += row("mean", model.mean);
  for (std::size_t r = 0; r < model.components_count(); ++r) out += row("component", model.components.row(r));
  out += row("explained_variance", model.explained_variance);
  out += row("singular_values", model.singular_values);
  return out;
}

PcaModel parse_pca_model(const std::vector<std::string>& lines) {
  if (lines.empty() || lines[0] != "# pca-model v1") fail(ErrorCode::FormatError, "pca model: missing version line");
  PcaModel model;
  std::vector<double> comp_values;
  std::size_t comp_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_csv_line(lines[i]);
    const std::string tag = cells[0];
    std::vector<double> values;
    if (tag == "n_seen") {
      model.n_seen = static_cast<std::size_t>(parse_double(cells.at(1), i, 1));
      continue;
    }
    for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(parse_double(cells[c], i, c));
    if (tag == "total_variance") {
      model.total_variance = values.at(0);
    } else if (tag == "mean") {
      model.mean = std::move(values);
    } else if (tag == "component") {
      comp_values.insert(comp_values.end(), values.begin(), values.end());
      ++comp_rows;
    } else if (tag == "explained_variance") {
      model.explained_variance = std::move(values);
    } else if (tag == "singular_values") {
      model.singular_values = std::move(values);
    } else {
      fail(ErrorCode::FormatError, "pca model: unknown row tag '" + tag + "'");
    }
  }
  if (comp_rows == 0 || comp_values.size() != comp_rows * model.mean.size())
    fail(ErrorCode::FormatError, "pca model: component rows do not match mean dimension");
  model.components = DenseMatrix(comp_rows, model.mean.size(), std::move(comp_values));
  return model;
}

std::vector<double> rf_feature_importance(const DenseMatrix& features, const std::vector<int>& labels,
                                          const ImportanceOptions& options) {
  require(features.rows() == labels.size(), "rf_feature_importance: label count mismatch");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  require(!pos.empty() && !neg.empty(), "rf_feature_importance: dataset must contain both classes");

  const bool pos_minor = pos.size() <= neg.size();
  const auto& minor = pos_minor ? pos : neg;
  const auto& major = pos_minor ? neg : pos;
  const std::size_t g_minor = std::clamp<std::size_t>(options.minority_groups, 1, minor.size());
  const double group_size = static_cast<double>(minor.size()) / static_cast<double>(g_minor);
  const std::size_t g_major =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(static_cast<double>(major.size()) / group_size)), 1,
                              major.size());

  const auto minor_groups = split_into_groups(minor.size(), g_minor, Rng::substream(options.seed, "minor")).members();
  const auto major_groups = split_into_groups(major.size(), g_major, Rng::substream(options.seed, "major")).members();

  const std::size_t d = features.cols();
  std::vector<double> total(d, 0.0);
  std::size_t pair_index = 0;
  for (const auto& ga : minor_groups) {
    for (const auto& gb : major_groups) {
      std::vector<std::size_t> rows;
      for (std::size_t i : ga) rows.push_back(minor[i]);
      for (std::size_t i : gb) rows.push_back(major[i]);
      std::sort(rows.begin(), rows.end());
      std::vector<int> y(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) y[r] = labels[rows[r]];
      ForestParams fp = options.forest;
      fp.seed = Rng::substream(options.seed, pair_index++);
      const ForestModel forest = fit_forest(features.select_rows(rows), y, fp);
      const auto imp = forest.feature_importances();
      for (std::size_t f = 0; f < d; ++f) total[f] += imp[f];
    }
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0)
    for (double& v : total) v /= sum;
  return total;
}

std::vector<std::size_t> select_top_k_features(const std::vector<double>& importances, std::size_t k) {
  require(k <= importances.size(), "select_top_k_features: k=" + std::to_string(k) + " exceeds feature count " +
                                       std::to_string(importances.size()));
  std::vector<std::size_t> order(importances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importances[a] > importances[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace snnfra
