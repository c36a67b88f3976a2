#include "snnfra/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "snnfra/error.hpp"
#include "snnfra/parallel.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

DenseMatrix distance_matrix(const DenseMatrix& points) {
  const std::size_t n = points.rows();
  DenseMatrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = euclidean(points.row(i), points.row(j));
  return d;
}

struct Nearest {
  std::vector<double> first;   // distance to nearest medoid
  std::vector<double> second;  // distance to second nearest medoid
  std::vector<std::size_t> owner;
};

Nearest nearest_medoids(const DenseMatrix& d, const std::vector<std::size_t>& medoids) {
  const std::size_t n = d.rows();
  Nearest out{std::vector<double>(n), std::vector<double>(n), std::vector<std::size_t>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    double best = std::numeric_limits<double>::infinity(), next = best;
    std::size_t owner = medoids.front();
    for (std::size_t m : medoids) {
      const double v = d(j, m);
      if (v < best || (v == best && m < owner)) {
        next = best;
        best = v;
        owner = m;
      } else if (v < next) {
        next = v;
      }
    }
    out.first[j] = best;
    out.second[j] = next;
    out.owner[j] = owner;
  }
  return out;
}

void assign(const DenseMatrix& d, Clustering& c) {
  const std::size_t n = d.rows();
  c.assignment.assign(n, 0);
  c.cost = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    auto self = std::find(c.medoids.begin(), c.medoids.end(), j);
    if (self != c.medoids.end()) {
      c.assignment[j] = static_cast<std::size_t>(self - c.medoids.begin());
      continue;
    }
    std::size_t best = 0;
    for (std::size_t m = 1; m < c.medoids.size(); ++m)
      if (d(j, c.medoids[m]) < d(j, c.medoids[best])) best = m;
    c.assignment[j] = best;
    c.cost += d(j, c.medoids[best]);
  }
}

// Best-improvement SWAP from the given medoids until no swap lowers the
// cost. Appends the cost after every accepted swap to `history`.
double swap_phase(const DenseMatrix& d, std::vector<std::size_t>& medoids, std::vector<double>& history) {
  const std::size_t n = d.rows();
  std::vector<char> is_medoid(n, 0);
  for (auto m : medoids) is_medoid[m] = 1;
  auto total = [](const std::vector<double>& near) {
    double s = 0.0;
    for (double v : near) s += v;
    return s;
  };
  double cost = total(nearest_medoids(d, medoids).first);
  history.push_back(cost);
  const double tol = 1e-12;
  while (medoids.size() < n) {
    const Nearest near = nearest_medoids(d, medoids);
    double best_delta = 0.0;
    std::size_t best_m = 0, best_h = 0;
    for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
      const std::size_t m = medoids[mi];
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double dh = d(j, h);
          const double keep = (near.owner[j] == m) ? near.second[j] : near.first[j];
          delta += std::min(keep, dh) - near.first[j];
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_m = mi;
          best_h = h;
        }
      }
    }
    if (!(best_delta < -tol * std::max(1.0, cost))) break;
    is_medoid[medoids[best_m]] = 0;
    medoids[best_m] = best_h;
    is_medoid[best_h] = 1;
    cost = total(nearest_medoids(d, medoids).first);
    history.push_back(cost);
  }
  return cost;
}

std::vector<std::size_t> build_phase(const DenseMatrix& d, std::size_t k) {
  const std::size_t n = d.rows();
  std::vector<std::size_t> medoids;
  std::vector<char> is_medoid(n, 0);
  std::size_t first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += d(i, j);
    if (s < best) {
      best = s;
      first = i;
    }
  }
  medoids.push_back(first);
  is_medoid[first] = 1;
  std::vector<double> nearest(n);
  for (std::size_t j = 0; j < n; ++j) nearest[j] = d(j, first);
  while (medoids.size() < k) {
    std::size_t pick = n;
    double best_gain = -1.0;
    for (std::size_t h = 0; h < n; ++h) {
      if (is_medoid[h]) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - d(j, h));
      if (gain > best_gain) {
        best_gain = gain;
        pick = h;
      }
    }
    medoids.push_back(pick);
    is_medoid[pick] = 1;
    for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(j, pick));
  }
  return medoids;
}

}  // namespace

Clustering kmedoids(const DenseMatrix& points, std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.rows();
  require(n > 0, "kmedoids: empty point set");
  require(k >= 1 && k <= n, "kmedoids: k must satisfy 1 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  const DenseMatrix d = distance_matrix(points);

  Clustering result;
  std::vector<std::size_t> medoids = build_phase(d, k);
  double cost = swap_phase(d, medoids, result.cost_history);

  // A SWAP local optimum can sit well above the global one on small sets;
  // a few restarts from seeded random medoid sets recover most of the gap.
  if (k > 1 && k < n) {
    std::vector<std::size_t> order(n);
    for (std::size_t r = 0; r < kPamRestarts; ++r) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(Rng::substream(seed, r));
      rng.shuffle(order);
      std::vector<std::size_t> start(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
      std::vector<double> history;
      const double c = swap_phase(d, start, history);
      if (c < cost - 1e-12 * std::max(1.0, cost)) {
        cost = c;
        medoids = std::move(start);
        result.cost_history = std::move(history);
      }
    }
  }

  std::sort(medoids.begin(), medoids.end());
  result.medoids = std::move(medoids);
  assign(d, result);
  return result;
}

double calinski_harabasz(const DenseMatrix& points, const Clustering& clustering) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  const std::size_t k = clustering.medoids.size();
  require(k >= 2 && k < n, "calinski_harabasz: needs 2 <= k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  require(clustering.assignment.size() == n, "calinski_harabasz: assignment size mismatch");

  std::vector<double> global(dim, 0.0);
  std::vector<std::vector<double>> centroid(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> size(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = clustering.assignment[i];
    require(c < k, "calinski_harabasz: assignment out of range");
    ++size[c];
    for (std::size_t f = 0; f < dim; ++f) {
      global[f] += points(i, f);
      centroid[c][f] += points(i, f);
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    require(size[c] > 0, "calinski_harabasz: empty cluster " + std::to_string(c));
    for (double& v : centroid[c]) v /= static_cast<double>(size[c]);
  }
  for (double& v : global) v /= static_cast<double>(n);

  double between = 0.0, within = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    between += static_cast<double>(size[c]) * squared_euclidean(centroid[c], global);
  for (std::size_t i = 0; i < n; ++i) within += squared_euclidean(points.row(i), centroid[clustering.assignment[i]]);

  // Dispersions at rounding level relative to the total are treated as zero.
  const double scale = between + within;
  const double eps = 1e-12 * scale;
  if (scale == 0.0 || between <= eps) return 0.0;
  if (within <= eps) return kChMax;
  return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

MedoidSelection optimal_kmedoids_centroids(const DenseMatrix& points, std::size_t k_min, std::size_t k_max,
                                           std::uint64_t seed) {
  const std::size_t n = points.rows();
  MedoidSelection sel;
  if (n == 0) return sel;
  if (n <= 2) {
    for (std::size_t i = 0; i < n; ++i) sel.rows.push_back(i);
    sel.k = n;
    return sel;
  }

  std::size_t distinct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i && !seen; ++j) seen = squared_euclidean(points.row(i), points.row(j)) == 0.0;
    if (!seen) ++distinct;
  }
  if (distinct < 2) {
    sel.rows = {0};
    sel.k = 1;
    return sel;
  }

  const std::size_t lo = std::max<std::size_t>(2, k_min);
  const std::size_t hi = std::min({k_max, n - 1, distinct});
  if (lo > hi) {
    for (std::size_t i = 0; i < n; ++i) sel.rows.push_back(i);
    sel.k = n;
    return sel;
  }
  double best = -1.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    const Clustering c = kmedoids(points, k, seed);
    const double score = calinski_harabasz(points, c);
    if (score > best) {
      best = score;
      sel.rows = c.medoids;
      sel.k = k;
      sel.score = score;
    }
  }
  return sel;
}

}  // namespace snnfra
