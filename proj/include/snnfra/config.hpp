#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace snnfra {

enum class KernelKind { linear, gaussian, triangular };
enum class TNormKind { lukasiewicz, minimum };
enum class ClassifierKind { decision_tree, random_forest, rusboost };
enum class SweepParam { tq, tp };

/// Every tunable of a pipeline run. Parsed from an INI-style file:
///
///   [section]
///   key = value        ; or # comments
///
/// Unknown sections or keys are rejected.
struct RunConfig {
  // [general]
  std::uint64_t seed = 42;
  std::string run_name;  // empty: timestamp

  // [input] (relative paths resolve against the config file's directory)
  std::filesystem::path drugs;
  std::filesystem::path targets;
  std::filesystem::path interactions;

  // [neighbors]
  std::size_t k_neighbors = 11;
  std::size_t block_size = 1024;
  std::size_t entity_pca_components = 0;  // 0: raw normalized features

  // [clustering]
  std::size_t kmedoids_k_min = 2;
  std::size_t kmedoids_k_max = 10;

  // [pca]
  std::size_t pca_components = 0;  // 0: smallest q reaching pca_variance, capped at pca_max_components
  std::size_t pca_batch_size = 512;
  double pca_variance = 0.95;
  std::size_t pca_max_components = 128;

  // [fuzzy]
  KernelKind similarity_kernel = KernelKind::linear;
  TNormKind tnorm = TNormKind::lukasiewicz;
  std::size_t m_groups = 0;  // 0: ceil(|positives| / max_group_rows)
  std::size_t n_groups = 0;  // 0: ceil(|candidates| / max_group_rows)
  std::size_t max_group_rows = 2000;

  // [sampling]
  double t_p = 0.8;
  double t_q = 0.2;
  double adasyn_beta = 1.0;
  std::size_t adasyn_k = 5;

  // [features]
  std::size_t select_top_k = 0;  // 0: no selection
  std::size_t importance_groups = 1;

  // [classifier]
  ClassifierKind classifier = ClassifierKind::random_forest;
  std::size_t max_depth = 20;
  std::size_t min_samples_leaf = 3;
  std::size_t min_samples_split = 8;
  std::size_t n_estimators = 0;  // 0: 200 for rf, 500 for rusboost
  double learning_rate = 1.0;
  std::string max_features = "sqrt";  // sqrt | all
  bool bootstrap = true;

  // [grid] empty lists leave the [classifier] value fixed
  std::vector<std::size_t> grid_max_depth;
  std::vector<std::size_t> grid_min_samples_leaf;
  std::vector<std::size_t> grid_min_samples_split;
  std::vector<std::size_t> grid_n_estimators;
  std::vector<double> grid_learning_rate;
  std::string grid_metric = "auc";  // auc | f1 | gmean

  // [evaluate]
  std::size_t cv_folds = 5;
  double holdout_ratio = 0.7;
  std::vector<double> sweep_thresholds;
  SweepParam sweep_param = SweepParam::tq;

  /// Checks the invariants (0 <= t_q <= t_p <= 1, positive counts, ratio in (0,1)).
  void validate() const;

  /// Applies `section.key=value`.
  void set(const std::string& dotted_key, const std::string& value);

  /// Stable text form of every computation-relevant key (paths and run name excluded).
  std::string canonical() const;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

std::string to_string(KernelKind k);
std::string to_string(TNormKind k);
std::string to_string(ClassifierKind k);
KernelKind parse_kernel(const std::string& s);
ClassifierKind parse_classifier(const std::string& s);

}  // namespace snnfra
