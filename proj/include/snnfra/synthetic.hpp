#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "snnfra/core.hpp"
#include "snnfra/io.hpp"

namespace snnfra {

/// Planted drug-target fixture. Entities come in clusters, each made of
/// tight families of `family_size` members scattered around the cluster
/// center. A pair interacts when its drug cluster is compatible with its
/// target cluster (drug cluster c pairs with target cluster c mod T), except
/// for a fraction of interactions drawn uniformly as noise.
struct SyntheticSpec {
  std::size_t drugs = 200;
  std::size_t targets = 150;
  std::size_t interactions = 300;
  std::size_t drug_dim = 20;
  std::size_t target_dim = 16;
  std::size_t drug_clusters = 4;
  std::size_t target_clusters = 3;
  std::size_t family_size = 6;
  double spread = 0.12;           // family centers around their cluster center (per-feature sd)
  double family_spread = 0.01;    // members around their family center
  double noise_fraction = 0.05;   // share of interactions ignoring compatibility
  std::uint64_t seed = 7;
};

struct SyntheticData {
  FeatureMatrix drugs;    // raw (unnormalized) features
  FeatureMatrix targets;
  InteractionSet interactions;
  std::vector<std::size_t> drug_cluster;
  std::vector<std::size_t> target_cluster;

  bool compatible(std::size_t drug, std::size_t target) const;
  std::size_t target_clusters = 0;
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

/// Writes drugs.csv, targets.csv, interactions.csv and a config.ini pointing
/// at them into `dir`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir, std::uint64_t seed = 42);

}  // namespace snnfra
