#include "snnfra/resample.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "snnfra/error.hpp"
#include "snnfra/parallel.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

// k nearest rows of `query` among `pool` (self excluded by index), ties by index.
std::vector<std::size_t> nearest(const DenseMatrix& x, std::size_t query, const std::vector<std::size_t>& pool,
                                 std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(pool.size());
  for (std::size_t p : pool)
    if (p != query) d.emplace_back(squared_euclidean(x.row(query), x.row(p)), p);
  const std::size_t kk = std::min(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
  std::vector<std::size_t> out(kk);
  for (std::size_t i = 0; i < kk; ++i) out[i] = d[i].second;
  return out;
}

}  // namespace

void ThresholdPolicy::validate() const {
  require(t_q >= 0.0 && t_q <= t_p && t_p <= 1.0, "ThresholdPolicy: need 0 <= t_q <= t_p <= 1");
}

Partition threshold_partition(const FruaScoreTable& scores, const PairDataset& candidates,
                              const ThresholdPolicy& policy) {
  policy.validate();
  std::unordered_map<PairKey, double, PairKeyHash> by_key;
  by_key.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) by_key.emplace(scores.keys[i], scores.degrees[i]);

  Partition out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto it = by_key.find(candidates[i].key());
    if (it == by_key.end())
      fail(ErrorCode::MissingScore, "threshold_partition: no score for (" + candidates[i].drug + ", " +
                                        candidates[i].target + ")");
    const double s = it->second;
    if (s >= policy.t_p)
      out.promoted.push_back(i);
    else if (s <= policy.t_q)
      out.retained.push_back(i);
    else
      out.discarded.push_back(i);
  }
  return out;
}

BalancedDataset adasyn(const PairDataset& dataset, double beta, std::size_t k, std::uint64_t seed) {
  require(k >= 1, "adasyn: K must be positive");
  require(beta >= 0.0, "adasyn: beta must be nonnegative");
  const ClassCounts counts = dataset.class_counts();
  require(counts.unannotated == 0, "adasyn: unannotated samples present");
  require(counts.positive > 0 && counts.negative > 0, "adasyn: both classes must be present");

  BalancedDataset out;
  out.data = dataset;
  out.synthetic.assign(dataset.size(), 0);
  // Ties make the positive class the minority, which leaves G = 0 anyway.
  out.minority = counts.positive <= counts.negative ? Label::positive : Label::negative;
  const std::size_t m_s = std::min(counts.positive, counts.negative);
  const std::size_t m_l = std::max(counts.positive, counts.negative);

  std::vector<std::size_t> all(dataset.size()), minority;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    all[i] = i;
    if (dataset[i].label == out.minority) minority.push_back(i);
  }
  out.minority_seeds = minority.size();
  out.generated.assign(minority.size(), 0);

  const double G = static_cast<double>(m_l - m_s) * beta;
  if (G <= 0.0) return out;

  const DenseMatrix x = dataset.feature_matrix();
  const std::size_t ms = minority.size();
  std::vector<double> r(ms, 0.0);
  std::vector<std::vector<std::size_t>> minority_nn(ms);
  const auto lms = static_cast<long long>(ms);
#pragma omp parallel for schedule(dynamic, 8)
  for (long long li = 0; li < lms; ++li) {
    const auto i = static_cast<std::size_t>(li);
    const auto nn = nearest(x, minority[i], all, k);
    std::size_t majority = 0;
    for (std::size_t p : nn) majority += dataset[p].label != out.minority;
    r[i] = nn.empty() ? 0.0 : static_cast<double>(majority) / static_cast<double>(k);
    minority_nn[i] = nearest(x, minority[i], minority, k);
  }

  double sum_r = 0.0;
  for (double v : r) sum_r += v;
  if (sum_r > 0.0) {
    for (std::size_t i = 0; i < ms; ++i) out.generated[i] = static_cast<std::size_t>(std::llround(r[i] / sum_r * G));
  } else {
    out.uniform_fallback = true;
    const auto g = static_cast<std::size_t>(std::llround(G / static_cast<double>(ms)));
    std::fill(out.generated.begin(), out.generated.end(), g);
  }

  std::size_t serial = 0;
  for (std::size_t i = 0; i < ms; ++i) {
    if (out.generated[i] == 0 || minority_nn[i].empty()) {
      if (minority_nn[i].empty()) out.generated[i] = 0;
      continue;
    }
    Rng rng(Rng::substream(seed, static_cast<std::uint64_t>(minority[i])));
    const PairSample& parent = dataset[minority[i]];
    for (std::size_t g = 0; g < out.generated[i]; ++g) {
      const std::size_t z = minority_nn[i][rng.index(minority_nn[i].size())];
      const double lambda = rng.uniform();
      const auto xi = x.row(minority[i]);
      const auto xz = x.row(z);
      PairSample s;
      s.features.resize(xi.size());
      for (std::size_t f = 0; f < xi.size(); ++f) {
        const double v = xi[f] + lambda * (xz[f] - xi[f]);
        s.features[f] = std::clamp(v, std::min(xi[f], xz[f]), std::max(xi[f], xz[f]));
      }
      s.drug = "syn" + std::to_string(serial++) + ":" + parent.drug;
      s.target = parent.target;
      s.label = out.minority;
      out.data.add(std::move(s));
      out.synthetic.push_back(1);
      out.parents.emplace_back(minority[i], z);
    }
  }
  return out;
}

BalancedDataset balance(const PairDataset& positives, const PairDataset& candidates, const FruaScoreTable& scores,
                        const ThresholdPolicy& policy, double beta, std::size_t k, std::uint64_t seed) {
  const Partition part = threshold_partition(scores, candidates, policy);
  if (part.retained.empty())
    fail(ErrorCode::EmptyNegativeClass, "balance: no candidate scored at or below t_q");
  require(!positives.empty() || !part.promoted.empty(), "balance: no positive samples");

  std::unordered_map<PairKey, double, PairKeyHash> by_key;
  for (std::size_t i = 0; i < scores.size(); ++i) by_key.emplace(scores.keys[i], scores.degrees[i]);

  PairDataset merged(positives.empty() ? candidates.dim() : positives.dim());
  for (const auto& s : positives.samples()) merged.add(s);
  for (std::size_t i : part.promoted) {
    PairSample s = candidates[i];
    s.label = Label::positive;
    s.frua_score = by_key.at(s.key());
    merged.add(std::move(s));
  }
  for (std::size_t i : part.retained) {
    PairSample s = candidates[i];
    s.label = Label::negative;
    s.frua_score = by_key.at(s.key());
    merged.add(std::move(s));
  }
  return adasyn(merged, beta, k, Rng::substream(seed, "adasyn"));
}

}  // namespace snnfra
