#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "snnfra/core.hpp"

namespace snnfra {

struct Clustering {
  std::vector<std::size_t> medoids;     // point indices, ascending
  std::vector<std::size_t> assignment;  // point -> position in `medoids`
  double cost = 0.0;                    // sum of point-to-medoid distances
  std::vector<double> cost_history;     // cost after BUILD and after each accepted swap
};

/// Sentinel returned by calinski_harabasz when the within-cluster dispersion vanishes.
inline constexpr double kChMax = std::numeric_limits<double>::max();

/// Random restarts of the SWAP phase tried after the BUILD start.
inline constexpr std::size_t kPamRestarts = 4;

/// PAM: greedy BUILD followed by best-improvement SWAP until no swap lowers
/// the cost, Euclidean distances. SWAP is then rerun from kPamRestarts medoid
/// sets drawn from the seed, and the cheapest result wins (the BUILD start on
/// ties). `cost_history` belongs to the winning run.
Clustering kmedoids(const DenseMatrix& points, std::size_t k, std::uint64_t seed = 0);

/// [B/(k-1)] / [W/(n-k)] with mean-based dispersions. B == 0 gives 0 and
/// W == 0 (otherwise) gives kChMax.
double calinski_harabasz(const DenseMatrix& points, const Clustering& clustering);

struct MedoidSelection {
  std::vector<std::size_t> rows;  // indices into the clustered points, ascending
  std::size_t k = 0;
  double score = 0.0;
};

/// Runs kmedoids for every k in [max(2,k_min), min(k_max, n-1)] and keeps the
/// medoids of the CH-maximizing k (ties to the smaller k). Sets with n <= 2
/// return all points; sets whose distinct-point count is below 2 return the
/// first point.
MedoidSelection optimal_kmedoids_centroids(const DenseMatrix& points, std::size_t k_min, std::size_t k_max,
                                           std::uint64_t seed = 0);

}  // namespace snnfra
