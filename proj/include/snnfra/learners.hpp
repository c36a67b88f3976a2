#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "snnfra/config.hpp"
#include "snnfra/core.hpp"

namespace snnfra {

enum class MaxFeatures { sqrt, all };

struct TreeParams {
  std::size_t max_depth = 9;
  std::size_t min_samples_leaf = 1;
  std::size_t min_samples_split = 6;
  MaxFeatures max_features = MaxFeatures::all;

  void validate() const;
};

struct ForestParams {
  std::size_t n_estimators = 200;
  TreeParams tree{20, 3, 8, MaxFeatures::sqrt};
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct BoostParams {
  std::size_t n_estimators = 500;
  double learning_rate = 1.0;
  TreeParams base_tree{3, 1, 2, MaxFeatures::all};
  std::uint64_t seed = 0;
};

/// 1 - sum p_c^2 over (possibly weighted) class counts.
double gini_impurity(std::span<const double> class_counts);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double proba = 0.0;  // weighted positive fraction of the training samples reaching the node
};

class TreeModel {
 public:
  TreeModel() = default;
  TreeModel(std::size_t dim, std::vector<TreeNode> nodes, std::vector<double> importance)
      : dim_(dim), nodes_(std::move(nodes)), importance_(std::move(importance)) {}

  double predict_proba(std::span<const double> x) const;
  std::vector<double> predict_proba(const DenseMatrix& x) const;

  /// Impurity decrease per feature, normalized to sum 1 (all zero for a single leaf).
  std::vector<double> feature_importances() const;
  const std::vector<double>& raw_importances() const noexcept { return importance_; }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t depth() const;

 private:
  std::size_t dim_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<double> importance_;
};

/// Greedy CART with the gini criterion. Split candidates are midpoints
/// between consecutive distinct feature values; the best impurity decrease
/// wins with ties going to the lower feature index, then the lower threshold.
/// Node growth stops at max_depth, when the node is pure, or when it holds
/// fewer than min_samples_split samples. Each node draws its feature order
/// from a stream keyed by its path from the root, so raising max_depth only
/// refines an existing tree.
///
/// `weights` (optional) scales each sample's contribution; zero-weight samples
/// are ignored.
TreeModel fit_tree(const DenseMatrix& x, const std::vector<int>& y, const TreeParams& params, std::uint64_t seed,
                   std::span<const double> weights = {});

class ForestModel {
 public:
  ForestModel() = default;
  explicit ForestModel(std::vector<TreeModel> trees) : trees_(std::move(trees)) {}

  double predict_proba(std::span<const double> x) const;
  std::vector<double> predict_proba(const DenseMatrix& x) const;
  /// Mean of per-tree normalized importances, renormalized.
  std::vector<double> feature_importances() const;
  const std::vector<TreeModel>& trees() const noexcept { return trees_; }

 private:
  std::vector<TreeModel> trees_;
};

ForestModel fit_forest(const DenseMatrix& x, const std::vector<int>& y, const ForestParams& params);

class BoostModel {
 public:
  BoostModel() = default;
  BoostModel(std::vector<TreeModel> trees, std::vector<double> alphas)
      : trees_(std::move(trees)), alphas_(std::move(alphas)) {}

  /// sum_t alpha_t * h_t(x) with h_t in {-1, +1}.
  double decision_function(std::span<const double> x) const;
  /// Logistic of twice the margin.
  double predict_proba(std::span<const double> x) const;
  std::vector<double> predict_proba(const DenseMatrix& x) const;

  const std::vector<TreeModel>& trees() const noexcept { return trees_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }

  // Audit trail of the fit; not serialized.
  std::vector<double> errors;
  std::vector<double> weight_sums;

 private:
  std::vector<TreeModel> trees_;
  std::vector<double> alphas_;
};

/// AdaBoost with random undersampling of the majority class each round.
/// Round t draws (weighted, without replacement) as many majority samples as
/// there are minority samples, fits the base tree on that subset with its
/// boosting weights, measures the weighted error on the full set and
/// reweights. Stops early on zero error or error >= 0.5.
BoostModel fit_rusboost(const DenseMatrix& x, const std::vector<int>& y, const BoostParams& params);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::random_forest;
  TreeParams tree;
  ForestParams forest;
  BoostParams boost;

  std::string describe() const;
};

/// Builds the spec described by the [classifier] section of a config.
ClassifierSpec classifier_from_config(const RunConfig& config);

class Classifier {
 public:
  using Model = std::variant<TreeModel, ForestModel, BoostModel>;

  Classifier() = default;
  explicit Classifier(Model model) : model_(std::move(model)) {}

  double predict_proba(std::span<const double> x) const;
  std::vector<double> predict_proba(const DenseMatrix& x) const;
  const Model& model() const noexcept { return model_; }

 private:
  Model model_;
};

Classifier fit_classifier(const ClassifierSpec& spec, const DenseMatrix& x, const std::vector<int>& y,
                          std::uint64_t seed);

/// Versioned text form: every node's feature, threshold, children and leaf
/// probability, with doubles printed to round-trip exactly.
std::string render_model(const Classifier& classifier);
Classifier parse_model(const std::vector<std::string>& lines);

}  // namespace snnfra
