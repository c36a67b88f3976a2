#include "snnfra/pairgen.hpp"

#include <unordered_set>

#include "snnfra/clustering.hpp"
#include "snnfra/dimreduce.hpp"
#include "snnfra/error.hpp"
#include "snnfra/neighbors.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

DenseMatrix embedding(const FeatureMatrix& m, std::size_t components) {
  if (components == 0 || components >= m.dim()) return m.values;
  require(m.size() >= components, "generate_candidates: fewer entities than entity PCA components");
  const PcaModel model = ipca_fit(m.values, components, std::max<std::size_t>(m.size(), components));
  return ipca_transform(model, m.values);
}

// Medoid representatives (entity rows) of each entity's shared-neighbor set,
// computed only for entities flagged in `wanted`.
std::vector<std::vector<std::size_t>> representatives(const DenseMatrix& points, const std::vector<char>& wanted,
                                                      const CandidateOptions& o, std::string_view side) {
  const std::size_t n = points.rows();
  require(n >= o.k + 1, "generate_candidates: " + std::string(side) + " side needs at least k+1 entities (k=" +
                            std::to_string(o.k) + ", n=" + std::to_string(n) + ")");
  const NeighborTable table = knn_table_blocked(points, o.k, o.block_rows);
  const SharedNeighborIndex index(table);
  const std::uint64_t side_seed = Rng::substream(o.seed, side);

  std::vector<std::vector<std::size_t>> reps(n);
  const auto ln = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long li = 0; li < ln; ++li) {
    const auto i = static_cast<std::size_t>(li);
    if (!wanted[i]) continue;
    const std::vector<std::size_t> shared = index.shared_set(i);
    if (shared.empty()) continue;
    const DenseMatrix sub = points.select_rows(shared);
    const MedoidSelection sel = optimal_kmedoids_centroids(sub, o.k_min, o.k_max, Rng::substream(side_seed, i));
    for (std::size_t r : sel.rows) reps[i].push_back(shared[r]);
  }
  return reps;
}

}  // namespace

PairDataset build_positive_samples(const InteractionSet& interactions, const FeatureMatrix& drugs,
                                   const FeatureMatrix& targets) {
  PairDataset out(drugs.dim() + targets.dim());
  for (const auto& it : interactions.pairs) {
    if (it.drug >= drugs.size() || it.target >= targets.size())
      fail(ErrorCode::UnknownEntity, "build_positive_samples: interaction refers to a missing entity row");
    out.add(concat_pair(drugs.row(it.drug), targets.row(it.target), drugs.ids[it.drug], targets.ids[it.target],
                        Label::positive));
  }
  return out;
}

CandidatePool generate_candidates(const InteractionSet& interactions, const FeatureMatrix& drugs,
                                  const FeatureMatrix& targets, const CandidateOptions& options) {
  require(options.k >= 1, "generate_candidates: k must be positive");
  CandidatePool pool;
  pool.positives = build_positive_samples(interactions, drugs, targets);
  pool.candidates = PairDataset(drugs.dim() + targets.dim());

  std::vector<char> drug_wanted(drugs.size(), 0), target_wanted(targets.size(), 0);
  for (const auto& it : interactions.pairs) {
    drug_wanted[it.drug] = 1;
    target_wanted[it.target] = 1;
  }
  if (interactions.pairs.empty()) {
    pool.drug_reps.assign(drugs.size(), {});
    pool.target_reps.assign(targets.size(), {});
    return pool;
  }
  pool.drug_reps = representatives(embedding(drugs, options.entity_pca_components), drug_wanted, options, "drugs");
  pool.target_reps =
      representatives(embedding(targets, options.entity_pca_components), target_wanted, options, "targets");

  for (const auto& it : interactions.pairs) {
    const PairKey source{drugs.ids[it.drug], targets.ids[it.target]};
    for (std::size_t d : pool.drug_reps[it.drug]) {
      for (std::size_t t : pool.target_reps[it.target]) {
        PairKey key{drugs.ids[d], targets.ids[t]};
        if (pool.positives.contains(key) || pool.candidates.contains(key)) continue;
        pool.candidates.add(concat_pair(drugs.row(d), targets.row(t), std::move(key.drug), std::move(key.target),
                                        Label::negative));
        pool.provenance.push_back(source);
      }
    }
  }
  return pool;
}

PairDataset assemble_training_pool(const PairDataset& positives, const PairDataset& candidates) {
  require(positives.empty() || candidates.empty() || positives.dim() == candidates.dim(),
          "assemble_training_pool: positives and candidates differ in dimension");
  PairDataset out(positives.empty() ? candidates.dim() : positives.dim());
  for (const auto& s : positives.samples()) out.add(s);
  for (const auto& s : candidates.samples()) out.add(s);
  return out;
}

}  // namespace snnfra
