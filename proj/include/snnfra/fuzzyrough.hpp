#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "snnfra/config.hpp"
#include "snnfra/core.hpp"
#include "snnfra/io.hpp"

namespace snnfra {

/// max(0, a + b - 1). Throws InvalidInput outside [0,1]^2.
double lukasiewicz_t(double a, double b);
/// min(1, 1 - a + b). Throws InvalidInput outside [0,1]^2.
double lukasiewicz_i(double a, double b);

/// T-norm used to intersect per-feature similarities and inside the upper
/// approximation; the implicator is always Lukasiewicz. The identity
/// T(a, 1) = a is returned exactly rather than as a + 1 - 1, which can round.
struct Connectives {
  TNormKind t_norm = TNormKind::lukasiewicz;

  double t(double a, double b) const noexcept {
    if (t_norm == TNormKind::minimum) return std::min(a, b);
    if (b == 1.0) return a;
    if (a == 1.0) return b;
    return std::max(0.0, a + b - 1.0);
  }
  static double implicator(double a, double b) noexcept { return std::min(1.0, 1.0 - a + b); }
};

/// Per-feature fuzzy similarity. Ranges and standard deviations come from the
/// universe the kernel was fitted on; a degenerate range or sigma makes the
/// feature crisp (1 when equal, 0 otherwise).
class SimilarityKernel {
 public:
  SimilarityKernel() = default;
  SimilarityKernel(KernelKind kind, FeatureStats stats);
  static SimilarityKernel fit(KernelKind kind, const DenseMatrix& universe);

  KernelKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return stats_.size(); }
  const FeatureStats& stats() const noexcept { return stats_; }

  /// Similarity of x and y on feature f, clamped to [0,1].
  double operator()(std::size_t f, double x, double y) const noexcept {
    const double diff = std::abs(x - y);
    if (diff == 0.0) return 1.0;
    const double s = scale_[f];
    if (s <= 0.0) return 0.0;
    double v;
    switch (kind_) {
      case KernelKind::linear: v = 1.0 - diff * s; break;
      case KernelKind::gaussian: v = std::exp(-diff * diff * s); break;
      default: v = 1.0 - diff * s; break;
    }
    return std::clamp(v, 0.0, 1.0);
  }

 private:
  KernelKind kind_ = KernelKind::linear;
  FeatureStats stats_;
  // linear: 1/range; gaussian: 1/(2 sigma^2); triangular: 1/sigma. Zero when degenerate.
  std::vector<double> scale_;
};

/// feature_similarity on one feature, validating the feature index.
double feature_similarity(double xf, double yf, const SimilarityKernel& kernel, std::size_t f);

/// Conditional attributes plus a crisp decision per row, restricted to an
/// attribute subset P (all attributes when empty at construction).
struct DecisionTable {
  DenseMatrix rows;
  std::vector<int> decision;
  std::vector<std::size_t> feature_subset;

  DecisionTable() = default;
  DecisionTable(DenseMatrix rows, std::vector<int> decision, std::vector<std::size_t> subset = {});
  std::size_t size() const noexcept { return rows.rows(); }
};

/// T-norm fold of per-feature similarities over the table's attribute subset.
double indiscernibility(std::span<const double> x, std::span<const double> y, const DecisionTable& table,
                        const SimilarityKernel& kernel, const Connectives& connectives);

/// sup_y T(R(x,y), [decision(y) == concept]). Throws EmptyConcept if no row carries the label.
double upper_approximation(std::span<const double> x, const DecisionTable& table, int concept_label,
                           const SimilarityKernel& kernel, const Connectives& connectives);

/// inf_y I(R(x,y), [decision(y) == concept]). Throws InvalidInput on an empty table.
double lower_approximation(std::span<const double> x, const DecisionTable& table, int concept_label,
                           const SimilarityKernel& kernel, const Connectives& connectives);

struct FruaOptions {
  std::size_t m_groups = 1;
  std::size_t n_groups = 1;
  std::uint64_t seed = 0;
};

/// Group counts keeping every group at or below max_rows.
FruaOptions default_groups(std::size_t positives, std::size_t candidates, std::size_t max_rows, std::uint64_t seed);

/// Group-averaged upper-approximation degree of every candidate with respect
/// to the positive concept.
///
/// Positives are split into m groups and candidates into n groups. Each
/// (positive group, candidate group) pair forms one decision table; a
/// candidate's score is the mean of its degrees over the m tables its group
/// takes part in. Since the concept is crisp and T(a,1) = a, T(a,0) = 0, the
/// supremum reduces to the largest indiscernibility to any positive of the
/// table, which is what the kernel evaluates. Candidates are processed in
/// parallel and every per-candidate reduction runs in a fixed order, so the
/// result is bitwise independent of the thread count.
FruaScoreTable averaged_frua(const PairDataset& positives, const PairDataset& candidates,
                             const SimilarityKernel& kernel, const Connectives& connectives,
                             const FruaOptions& options);

/// Kernel fitted on positives and candidates together, the universe scored by averaged_frua.
SimilarityKernel fit_scoring_kernel(KernelKind kind, const PairDataset& positives, const PairDataset& candidates);

}  // namespace snnfra
