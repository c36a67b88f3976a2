#include "snnfra/grid.hpp"

#include <cmath>
#include <limits>

#include "snnfra/error.hpp"
#include "snnfra/evaluate.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

TreeParams& tree_of(ClassifierSpec& s) {
  switch (s.kind) {
    case ClassifierKind::decision_tree: return s.tree;
    case ClassifierKind::random_forest: return s.forest.tree;
    default: return s.boost.base_tree;
  }
}

template <class T, class Apply>
void expand(std::vector<ClassifierSpec>& specs, const std::vector<T>& values, Apply apply) {
  if (values.empty()) return;
  std::vector<ClassifierSpec> next;
  next.reserve(specs.size() * values.size());
  for (const auto& s : specs)
    for (const T& v : values) {
      ClassifierSpec c = s;
      apply(c, v);
      next.push_back(std::move(c));
    }
  specs = std::move(next);
}

}  // namespace

GridMetric parse_grid_metric(const std::string& s) {
  if (s == "auc") return GridMetric::auc;
  if (s == "f1") return GridMetric::f1;
  if (s == "gmean") return GridMetric::gmean;
  fail(ErrorCode::ConfigError, "unknown grid metric '" + s + "' (expected auc, f1 or gmean)");
}

std::vector<ClassifierSpec> expand_grid(const ClassifierSpec& base, const RunConfig& config) {
  std::vector<ClassifierSpec> specs{base};
  expand(specs, config.grid_max_depth, [](ClassifierSpec& c, std::size_t v) { tree_of(c).max_depth = v; });
  expand(specs, config.grid_min_samples_leaf,
         [](ClassifierSpec& c, std::size_t v) { tree_of(c).min_samples_leaf = v; });
  expand(specs, config.grid_min_samples_split,
         [](ClassifierSpec& c, std::size_t v) { tree_of(c).min_samples_split = v; });
  expand(specs, config.grid_n_estimators, [](ClassifierSpec& c, std::size_t v) {
    c.forest.n_estimators = v;
    c.boost.n_estimators = v;
  });
  expand(specs, config.grid_learning_rate, [](ClassifierSpec& c, double v) { c.boost.learning_rate = v; });
  return specs;
}

GridResult grid_search(const PairDataset& data, const std::vector<ClassifierSpec>& cells, std::size_t folds,
                       GridMetric metric, std::uint64_t seed, std::span<const std::uint8_t> synthetic) {
  require(!cells.empty(), "grid_search: empty grid");
  GridResult out;
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    GridCell cell{cells[c], std::numeric_limits<double>::quiet_NaN(), {}};
    try {
      const ClassifierSpec& spec = cells[c];
      spec.tree.validate();
      spec.forest.tree.validate();
      spec.boost.base_tree.validate();
      require(spec.forest.n_estimators >= 1 && spec.boost.n_estimators >= 1, "n_estimators must be positive");
      require(spec.boost.learning_rate > 0.0, "learning_rate must be positive");
      const std::uint64_t fit_seed = Rng::substream(seed, "grid-fit");
      const CvResult cv = k_fold_cv(
          data, folds,
          [&](const PairDataset& train, const PairDataset& test) {
            return fit_classifier(spec, train.feature_matrix(), train.binary_labels(), fit_seed)
                .predict_proba(test.feature_matrix());
          },
          seed, synthetic);
      switch (metric) {
        case GridMetric::auc: cell.score = cv.mean.auc; break;
        case GridMetric::f1: cell.score = cv.mean.f1; break;
        case GridMetric::gmean: cell.score = cv.mean.g_mean; break;
      }
    } catch (const Error& e) {
      cell.error = e.what();
    }
    if (!std::isnan(cell.score) && cell.score > best) {
      best = cell.score;
      out.best = c;
      any = true;
    }
    out.cells.push_back(std::move(cell));
  }
  if (!any) fail(ErrorCode::InvalidInput, "grid_search: every cell failed; first error: " + out.cells[0].error);
  return out;
}

}  // namespace snnfra
