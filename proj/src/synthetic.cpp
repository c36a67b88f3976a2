#include "snnfra/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "snnfra/error.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

FeatureMatrix clustered(std::size_t n, std::size_t d, std::size_t clusters, const SyntheticSpec& spec,
                        const char* prefix, const char* feature_prefix, Rng& rng, std::vector<std::size_t>& cluster_of) {
  DenseMatrix centers(clusters, d);
  for (double& v : centers.data()) v = rng.uniform();
  const std::size_t families = (n + spec.family_size - 1) / spec.family_size;
  DenseMatrix family_centers(families, d);
  for (std::size_t g = 0; g < families; ++g)
    for (std::size_t f = 0; f < d; ++f) family_centers(g, f) = centers(g % clusters, f) + spec.spread * rng.normal();
  DenseMatrix values(n, d);
  std::vector<EntityId> ids;
  cluster_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = i / spec.family_size;
    cluster_of[i] = g % clusters;
    for (std::size_t f = 0; f < d; ++f) {
      // Features live on different scales so normalization matters.
      const double scale = 1.0 + static_cast<double>(f);
      values(i, f) = (family_centers(g, f) + spec.family_spread * rng.normal()) * scale;
    }
    char id[32];
    std::snprintf(id, sizeof id, "%s%04zu", prefix, i);
    ids.emplace_back(id);
  }
  std::vector<std::string> names;
  for (std::size_t f = 0; f < d; ++f) names.push_back(feature_prefix + std::to_string(f));
  return FeatureMatrix(std::move(ids), std::move(values), std::move(names));
}

}  // namespace

bool SyntheticData::compatible(std::size_t drug, std::size_t target) const {
  return drug_cluster[drug] % target_clusters == target_cluster[target];
}

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  require(spec.drug_clusters >= 1 && spec.target_clusters >= 1, "make_synthetic: need at least one cluster per side");
  require(spec.family_size >= 1, "make_synthetic: family_size must be positive");
  require(spec.drugs >= spec.drug_clusters && spec.targets >= spec.target_clusters,
          "make_synthetic: fewer entities than clusters");
  require(spec.interactions <= spec.drugs * spec.targets, "make_synthetic: more interactions than pairs");
  Rng rng(spec.seed);
  SyntheticData out;
  out.target_clusters = spec.target_clusters;
  out.drugs = clustered(spec.drugs, spec.drug_dim, spec.drug_clusters, spec, "D", "dfeat", rng, out.drug_cluster);
  out.targets =
      clustered(spec.targets, spec.target_dim, spec.target_clusters, spec, "T", "tfeat", rng, out.target_cluster);

  std::set<std::pair<std::size_t, std::size_t>> seen;
  const auto noisy = static_cast<std::size_t>(spec.noise_fraction * static_cast<double>(spec.interactions) + 0.5);
  std::size_t attempts = 0;
  while (out.interactions.pairs.size() < spec.interactions) {
    require(++attempts < 1000 * spec.interactions + 1000, "make_synthetic: could not place interactions");
    const std::size_t d = rng.index(spec.drugs);
    const std::size_t t = rng.index(spec.targets);
    const bool want_noise = out.interactions.pairs.size() < noisy;
    if (!want_noise && !out.compatible(d, t)) continue;
    if (want_noise && out.compatible(d, t)) continue;
    if (!seen.emplace(d, t).second) continue;
    out.interactions.pairs.push_back({d, t});
  }
  // Noise pairs were drawn first; mix them in.
  rng.shuffle(out.interactions.pairs);
  return out;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  write_feature_matrix(dir / "drugs.csv", data.drugs);
  write_feature_matrix(dir / "targets.csv", data.targets);
  write_interactions(dir / "interactions.csv", data.interactions, data.drugs, data.targets);
  write_text_atomic(dir / "config.ini", "[general]\nseed = " + std::to_string(seed) +
                                            "\n\n[input]\ndrugs = drugs.csv\ntargets = targets.csv\n"
                                            "interactions = interactions.csv\n");
}

}  // namespace snnfra
