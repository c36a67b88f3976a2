#include "snnfra/fuzzyrough.hpp"

#include <algorithm>
#include <cmath>

#include "snnfra/error.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

void check_unit(double a, double b, const char* what) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
    fail(ErrorCode::InvalidInput, std::string(what) + ": arguments must lie in [0,1]");
}

// Indiscernibility over all features of two rows, unchecked.
inline double relation(const double* x, const double* y, const std::size_t* subset, std::size_t p,
                       const SimilarityKernel& kernel, const Connectives& conn) {
  double acc = kernel(subset[0], x[subset[0]], y[subset[0]]);
  if (conn.t_norm == TNormKind::lukasiewicz) {
    for (std::size_t i = 1; i < p && acc > 0.0; ++i) {
      const std::size_t f = subset[i];
      acc = std::max(0.0, acc + kernel(f, x[f], y[f]) - 1.0);
    }
  } else {
    for (std::size_t i = 1; i < p && acc > 0.0; ++i) {
      const std::size_t f = subset[i];
      acc = std::min(acc, kernel(f, x[f], y[f]));
    }
  }
  return acc;
}

}  // namespace

double lukasiewicz_t(double a, double b) {
  check_unit(a, b, "lukasiewicz_t");
  return Connectives{TNormKind::lukasiewicz}.t(a, b);
}

double lukasiewicz_i(double a, double b) {
  check_unit(a, b, "lukasiewicz_i");
  return std::min(1.0, 1.0 - a + b);
}

SimilarityKernel::SimilarityKernel(KernelKind kind, FeatureStats stats) : kind_(kind), stats_(std::move(stats)) {
  const std::size_t d = stats_.size();
  scale_.assign(d, 0.0);
  for (std::size_t f = 0; f < d; ++f) {
    const double range = std::abs(stats_.max[f] - stats_.min[f]);
    const double var = stats_.variance[f];
    switch (kind_) {
      case KernelKind::linear: scale_[f] = range > 0.0 ? 1.0 / range : 0.0; break;
      case KernelKind::gaussian: scale_[f] = var > 0.0 ? 1.0 / (2.0 * var) : 0.0; break;
      case KernelKind::triangular: scale_[f] = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0; break;
    }
  }
}

SimilarityKernel SimilarityKernel::fit(KernelKind kind, const DenseMatrix& universe) {
  return SimilarityKernel(kind, FeatureStats::compute(universe));
}

double feature_similarity(double xf, double yf, const SimilarityKernel& kernel, std::size_t f) {
  require(f < kernel.dim(), "feature_similarity: feature index out of range");
  require(std::isfinite(xf) && std::isfinite(yf), "feature_similarity: non-finite input");
  return kernel(f, xf, yf);
}

DecisionTable::DecisionTable(DenseMatrix rows_in, std::vector<int> decision_in, std::vector<std::size_t> subset)
    : rows(std::move(rows_in)), decision(std::move(decision_in)), feature_subset(std::move(subset)) {
  require(rows.rows() == decision.size(), "DecisionTable: decision count differs from row count");
  for (int d : decision) require(d == 0 || d == 1, "DecisionTable: decisions must be 0 or 1");
  if (feature_subset.empty())
    for (std::size_t f = 0; f < rows.cols(); ++f) feature_subset.push_back(f);
  for (std::size_t f : feature_subset) require(f < rows.cols(), "DecisionTable: feature subset out of range");
}

double indiscernibility(std::span<const double> x, std::span<const double> y, const DecisionTable& table,
                        const SimilarityKernel& kernel, const Connectives& connectives) {
  require(!table.feature_subset.empty(), "indiscernibility: empty attribute subset");
  require(x.size() == table.rows.cols() && y.size() == table.rows.cols(),
          "indiscernibility: vector dimension differs from table");
  require(kernel.dim() == table.rows.cols(), "indiscernibility: kernel dimension differs from table");
  return relation(x.data(), y.data(), table.feature_subset.data(), table.feature_subset.size(), kernel, connectives);
}

double upper_approximation(std::span<const double> x, const DecisionTable& table, int concept_label,
                           const SimilarityKernel& kernel, const Connectives& connectives) {
  require(table.size() > 0, "upper_approximation: empty table");
  if (std::find(table.decision.begin(), table.decision.end(), concept_label) == table.decision.end())
    fail(ErrorCode::EmptyConcept, "upper_approximation: no row carries label " + std::to_string(concept_label));
  double sup = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const double member = table.decision[r] == concept_label ? 1.0 : 0.0;
    sup = std::max(sup, connectives.t(indiscernibility(x, table.rows.row(r), table, kernel, connectives), member));
  }
  return sup;
}

double lower_approximation(std::span<const double> x, const DecisionTable& table, int concept_label,
                           const SimilarityKernel& kernel, const Connectives& connectives) {
  require(table.size() > 0, "lower_approximation: empty table");
  double inf = 1.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const double member = table.decision[r] == concept_label ? 1.0 : 0.0;
    inf = std::min(inf, Connectives::implicator(indiscernibility(x, table.rows.row(r), table, kernel, connectives), member));
  }
  return inf;
}

FruaOptions default_groups(std::size_t positives, std::size_t candidates, std::size_t max_rows, std::uint64_t seed) {
  require(max_rows > 0, "default_groups: max_rows must be positive");
  FruaOptions o;
  o.m_groups = std::max<std::size_t>(1, (positives + max_rows - 1) / max_rows);
  o.n_groups = std::max<std::size_t>(1, (candidates + max_rows - 1) / max_rows);
  o.seed = seed;
  return o;
}

SimilarityKernel fit_scoring_kernel(KernelKind kind, const PairDataset& positives, const PairDataset& candidates) {
  require(positives.dim() == candidates.dim() || candidates.empty() || positives.empty(),
          "fit_scoring_kernel: dimension mismatch");
  DenseMatrix all = positives.feature_matrix();
  for (const auto& s : candidates.samples()) all.append_row(s.features);
  return SimilarityKernel::fit(kind, all);
}

FruaScoreTable averaged_frua(const PairDataset& positives, const PairDataset& candidates,
                             const SimilarityKernel& kernel, const Connectives& connectives,
                             const FruaOptions& options) {
  const std::size_t np = positives.size();
  const std::size_t nc = candidates.size();
  const std::size_t d = positives.dim();
  require(np > 0, "averaged_frua: no positive samples");
  require(nc == 0 || candidates.dim() == d, "averaged_frua: positives and candidates differ in dimension");
  require(kernel.dim() == d, "averaged_frua: kernel dimension differs from samples");
  require(d > 0, "averaged_frua: zero-dimensional samples");
  require(options.m_groups >= 1 && options.m_groups <= np, "averaged_frua: m must satisfy 1 <= m <= |positives|");
  require(nc == 0 || (options.n_groups >= 1 && options.n_groups <= nc),
          "averaged_frua: n must satisfy 1 <= n <= |candidates|");

  FruaScoreTable out;
  out.m_used = options.m_groups;
  out.keys.reserve(nc);
  for (const auto& s : candidates.samples()) out.keys.push_back(s.key());
  out.degrees.assign(nc, 0.0);
  if (nc == 0) return out;

  // Candidate-group membership does not change any candidate's degree (each
  // table's concept rows are its positive group), but it fixes which tables
  // exist; it is drawn for parity with the grouped formulation.
  const auto pos_groups = split_into_groups(np, options.m_groups, Rng::substream(options.seed, "positive-groups")).members();
  (void)split_into_groups(nc, options.n_groups, Rng::substream(options.seed, "candidate-groups"));

  const DenseMatrix pos = positives.feature_matrix();
  std::vector<std::size_t> subset(d);
  for (std::size_t f = 0; f < d; ++f) subset[f] = f;

  const double m = static_cast<double>(pos_groups.size());
  const auto lnc = static_cast<long long>(nc);
#pragma omp parallel for schedule(dynamic, 32)
  for (long long ci = 0; ci < lnc; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    const double* x = candidates[c].features.data();
    double total = 0.0;
    for (const auto& group : pos_groups) {
      double sup = 0.0;
      for (std::size_t p : group) {
        const double r = connectives.t(relation(x, pos.row(p).data(), subset.data(), d, kernel, connectives), 1.0);
        if (r > sup) {
          sup = r;
          if (sup >= 1.0) break;
        }
      }
      total += sup;
    }
    out.degrees[c] = std::clamp(total / m, 0.0, 1.0);
  }
  return out;
}

}  // namespace snnfra
