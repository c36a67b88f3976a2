#pragma once

// Deliberately naive implementations used as ground truth. They take raw
// vectors and recompute everything from scratch so they do not share code
// paths with the library under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

struct ColumnStats {
  std::vector<double> lo, hi, var;
};

inline ColumnStats column_stats(const Rows& rows) {
  const std::size_t d = rows.front().size();
  ColumnStats s{std::vector<double>(d, std::numeric_limits<double>::infinity()),
                std::vector<double>(d, -std::numeric_limits<double>::infinity()), std::vector<double>(d, 0.0)};
  for (std::size_t f = 0; f < d; ++f) {
    double mean = 0.0;
    for (const auto& r : rows) {
      s.lo[f] = std::min(s.lo[f], r[f]);
      s.hi[f] = std::max(s.hi[f], r[f]);
      mean += r[f];
    }
    mean /= static_cast<double>(rows.size());
    for (const auto& r : rows) s.var[f] += (r[f] - mean) * (r[f] - mean);
    s.var[f] /= static_cast<double>(rows.size());
  }
  return s;
}

enum class Kernel { linear, gaussian, triangular };

inline double similarity(Kernel kernel, const ColumnStats& st, std::size_t f, double x, double y) {
  const double diff = std::fabs(x - y);
  if (diff == 0.0) return 1.0;
  double v = 0.0;
  switch (kernel) {
    case Kernel::linear:
      if (st.hi[f] - st.lo[f] <= 0.0) return 0.0;
      v = 1.0 - diff / (st.hi[f] - st.lo[f]);
      break;
    case Kernel::gaussian:
      if (st.var[f] <= 0.0) return 0.0;
      v = std::exp(-(diff * diff) / (2.0 * st.var[f]));
      break;
    case Kernel::triangular:
      if (st.var[f] <= 0.0) return 0.0;
      v = 1.0 - diff / std::sqrt(st.var[f]);
      break;
  }
  return std::min(1.0, std::max(0.0, v));
}

inline double luk_t(double a, double b) { return std::max(0.0, a + b - 1.0); }
inline double luk_i(double a, double b) { return std::min(1.0, 1.0 - a + b); }

inline double relation(Kernel kernel, const ColumnStats& st, const std::vector<double>& x,
                       const std::vector<double>& y) {
  double r = 1.0;
  for (std::size_t f = 0; f < x.size(); ++f) r = luk_t(r, similarity(kernel, st, f, x[f], y[f]));
  return r;
}

inline double upper(Kernel kernel, const ColumnStats& st, const std::vector<double>& x, const Rows& rows,
                    const std::vector<int>& decision, int concept_label) {
  double sup = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const double member = decision[j] == concept_label ? 1.0 : 0.0;
    sup = std::max(sup, luk_t(relation(kernel, st, x, rows[j]), member));
  }
  return sup;
}

inline double lower(Kernel kernel, const ColumnStats& st, const std::vector<double>& x, const Rows& rows,
                    const std::vector<int>& decision, int concept_label) {
  double inf = 1.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const double member = decision[j] == concept_label ? 1.0 : 0.0;
    inf = std::min(inf, luk_i(relation(kernel, st, x, rows[j]), member));
  }
  return inf;
}

/// k nearest other points by exhaustive comparison, ties to the smaller index.
inline std::vector<std::vector<std::size_t>> knn(const Rows& pts, std::size_t k) {
  std::vector<std::vector<std::size_t>> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(),
                     [&](std::size_t a, std::size_t b) { return dist(pts[i], pts[a]) < dist(pts[i], pts[b]); });
    out[i].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

inline std::size_t overlap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t c = 0;
  for (auto x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) ++c;
  return c;
}

inline std::set<std::size_t> shared_set(const std::vector<std::vector<std::size_t>>& nn, std::size_t i) {
  std::set<std::size_t> out;
  for (std::size_t r = 0; r < nn.size(); ++r) {
    if (r == i) continue;
    for (auto p : nn[i])
      if (std::find(nn[r].begin(), nn[r].end(), p) != nn[r].end()) out.insert(p);
  }
  return out;
}

/// Cost of assigning every point to its nearest medoid.
inline double medoid_cost(const Rows& pts, const std::vector<std::size_t>& medoids) {
  double cost = 0.0;
  for (const auto& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (auto m : medoids) best = std::min(best, dist(p, pts[m]));
    cost += best;
  }
  return cost;
}

/// Best total cost over all C(n, k) medoid sets.
inline double exhaustive_medoid_cost(const Rows& pts, std::size_t k) {
  const std::size_t n = pts.size();
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<std::size_t> medoids;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) medoids.push_back(i);
    best = std::min(best, medoid_cost(pts, medoids));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

/// Calinski-Harabasz from cluster labels with mean-based dispersions.
inline double calinski_harabasz(const Rows& pts, const std::vector<std::size_t>& label, std::size_t k) {
  const std::size_t n = pts.size(), d = pts.front().size();
  std::vector<double> g(d, 0.0);
  for (const auto& p : pts)
    for (std::size_t f = 0; f < d; ++f) g[f] += p[f] / static_cast<double>(n);
  Rows centers(k, std::vector<double>(d, 0.0));
  std::vector<double> sizes(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sizes[label[i]] += 1.0;
    for (std::size_t f = 0; f < d; ++f) centers[label[i]][f] += pts[i][f];
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t f = 0; f < d; ++f) centers[c][f] /= sizes[c];
  double b = 0.0, w = 0.0;
  for (std::size_t c = 0; c < k; ++c) b += sizes[c] * std::pow(dist(centers[c], g), 2);
  for (std::size_t i = 0; i < n; ++i) w += std::pow(dist(pts[i], centers[label[i]]), 2);
  return (b / static_cast<double>(k - 1)) / (w / static_cast<double>(n - k));
}

/// Fraction of (positive, negative) pairs ordered correctly, ties one half.
inline double concordance_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return good / pairs;
}

/// Orthonormal basis of the span of the given rows (modified Gram-Schmidt).
inline Rows orthonormalize(Rows rows) {
  Rows out;
  for (auto v : rows) {
    for (const auto& u : out) {
      double dot = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * u[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (double& x : v) x /= norm;
    out.push_back(v);
  }
  return out;
}

}  // namespace oracle
