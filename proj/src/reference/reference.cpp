#include "snnfra/reference.hpp"

#include <algorithm>
#include <cmath>

#include "snnfra/error.hpp"
#include "snnfra/random.hpp"

namespace snnfra::reference {

DenseMatrix pairwise_distances(const DenseMatrix& points) {
  const std::size_t n = points.rows();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t f = 0; f < points.cols(); ++f) {
        const double d = points(i, f) - points(j, f);
        s += d * d;
      }
      out(i, j) = i == j ? 0.0 : std::sqrt(s);
    }
  return out;
}

NeighborTable knn_table(const DenseMatrix& points, std::size_t k) {
  const std::size_t n = points.rows();
  require(k >= 1 && k < n, "reference::knn_table: k must satisfy 1 <= k <= n-1");
  const DenseMatrix dist = reference::pairwise_distances(points);
  NeighborTable t{n, k, std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> row;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.emplace_back(dist(i, j), j);
    std::sort(row.begin(), row.end());
    for (std::size_t r = 0; r < k; ++r) {
      t.indices[i * k + r] = row[r].second;
      t.distances[i * k + r] = row[r].first;
    }
  }
  return t;
}

FruaScoreTable averaged_frua(const PairDataset& positives, const PairDataset& candidates,
                             const SimilarityKernel& kernel, const Connectives& connectives,
                             const FruaOptions& options) {
  const std::size_t np = positives.size();
  const std::size_t nc = candidates.size();
  require(np > 0 && options.m_groups >= 1 && options.m_groups <= np, "reference::averaged_frua: bad m");
  require(nc == 0 || (options.n_groups >= 1 && options.n_groups <= nc), "reference::averaged_frua: bad n");
  const auto pos_groups =
      split_into_groups(np, options.m_groups, Rng::substream(options.seed, "positive-groups")).members();
  const auto cand_groups =
      nc ? split_into_groups(nc, options.n_groups, Rng::substream(options.seed, "candidate-groups")).members()
         : std::vector<std::vector<std::size_t>>{};

  FruaScoreTable out;
  out.m_used = options.m_groups;
  for (const auto& s : candidates.samples()) out.keys.push_back(s.key());
  std::vector<double> sums(nc, 0.0);
  for (const auto& pg : pos_groups) {
    for (const auto& cg : cand_groups) {
      DenseMatrix rows(0, positives.dim());
      std::vector<int> decision;
      for (std::size_t p : pg) {
        rows.append_row(positives[p].features);
        decision.push_back(1);
      }
      for (std::size_t c : cg) {
        rows.append_row(candidates[c].features);
        decision.push_back(0);
      }
      const DecisionTable table(std::move(rows), std::move(decision));
      for (std::size_t c : cg)
        sums[c] += upper_approximation(candidates[c].features, table, 1, kernel, connectives);
    }
  }
  out.degrees.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) out.degrees[c] = sums[c] / static_cast<double>(pos_groups.size());
  return out;
}

}  // namespace snnfra::reference
