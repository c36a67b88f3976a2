#include "snnfra/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "snnfra/error.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

namespace {

constexpr std::size_t kNoFold = std::numeric_limits<std::size_t>::max();

}  // namespace

MetricsReport confusion_and_rates(std::span<const int> labels, std::span<const int> predictions) {
  require(labels.size() == predictions.size(), "confusion_and_rates: labels and predictions differ in length");
  MetricsReport r;
  auto& c = r.confusion;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require((labels[i] == 0 || labels[i] == 1) && (predictions[i] == 0 || predictions[i] == 1),
            "confusion_and_rates: values must be 0 or 1");
    if (labels[i] == 1)
      (predictions[i] == 1 ? c.tp : c.fn)++;
    else
      (predictions[i] == 1 ? c.fp : c.tn)++;
  }
  const auto ratio = [](std::size_t num, std::size_t den, bool& undefined) {
    undefined = den == 0;
    return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.sensitivity = ratio(c.tp, c.tp + c.fn, r.sensitivity_undefined);
  r.specificity = ratio(c.tn, c.tn + c.fp, r.specificity_undefined);
  r.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, r.f1_undefined);
  r.g_mean = std::sqrt(r.sensitivity * r.specificity);
  return r;
}

double roc_auc(std::span<const int> labels, std::span<const double> scores) {
  require(labels.size() == scores.size(), "roc_auc: labels and scores differ in length");
  const std::size_t n = labels.size();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    require(labels[i] == 0 || labels[i] == 1, "roc_auc: labels must be 0 or 1");
    require(std::isfinite(scores[i]), "roc_auc: non-finite score");
    pos += labels[i] == 1;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) fail(ErrorCode::Undefined, "roc_auc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the rank sum keeps average ranks of ties integral, so the result is exact.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_avg = static_cast<std::uint64_t>(i + 1 + j);  // ranks i+1..j
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) twice_rank_sum += twice_avg;
    i = j;
  }
  const auto p = static_cast<std::uint64_t>(pos);
  const std::uint64_t twice_u = twice_rank_sum - p * (p + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

MetricsReport evaluate_scores(std::span<const int> labels, std::span<const double> scores, double threshold) {
  require(labels.size() == scores.size(), "evaluate_scores: labels and scores differ in length");
  std::vector<int> pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= threshold ? 1 : 0;
  MetricsReport r = confusion_and_rates(labels, pred);
  try {
    r.auc = roc_auc(labels, scores);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Undefined) throw;
    r.auc = 0.0;
    r.auc_undefined = true;
  }
  return r;
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  MetricsReport m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.auc += r.auc;
    m.f1 += r.f1;
    m.g_mean += r.g_mean;
    m.sensitivity += r.sensitivity;
    m.specificity += r.specificity;
    m.confusion.tp += r.confusion.tp;
    m.confusion.fp += r.confusion.fp;
    m.confusion.tn += r.confusion.tn;
    m.confusion.fn += r.confusion.fn;
    m.auc_undefined |= r.auc_undefined;
    m.sensitivity_undefined |= r.sensitivity_undefined;
    m.specificity_undefined |= r.specificity_undefined;
    m.f1_undefined |= r.f1_undefined;
  }
  const double k = static_cast<double>(reports.size());
  m.auc /= k;
  m.f1 /= k;
  m.g_mean /= k;
  m.sensitivity /= k;
  m.specificity /= k;
  return m;
}

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

FoldAssignment stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed,
                                std::span<const std::uint8_t> eligible) {
  require(k >= 2, "stratified_folds: k must be at least 2");
  require(eligible.empty() || eligible.size() == labels.size(), "stratified_folds: eligibility mask length");
  FoldAssignment out;
  out.k = k;
  out.fold_of.assign(labels.size(), kNoFold);
  std::size_t offset = 0;
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls && (eligible.empty() || eligible[i])) members.push_back(i);
    require(members.size() >= k, "stratified_folds: class " + std::to_string(cls) + " has " +
                                     std::to_string(members.size()) + " samples, fewer than k=" + std::to_string(k));
    Rng rng(Rng::substream(seed, cls == 1 ? "folds-positive" : "folds-negative"));
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j) out.fold_of[members[j]] = (offset + j) % k;
    offset = (offset + members.size()) % k;
  }
  return out;
}

PairDataset subset(const PairDataset& data, std::span<const std::size_t> indices) {
  PairDataset out(data.dim());
  for (std::size_t i : indices) out.add(data[i]);
  return out;
}

CvResult k_fold_cv(const PairDataset& data, std::size_t k, const ScoringFn& fn, std::uint64_t seed,
                   std::span<const std::uint8_t> synthetic) {
  require(synthetic.empty() || synthetic.size() == data.size(), "k_fold_cv: synthetic mask length");
  const std::vector<int> y = data.binary_labels();
  std::vector<std::uint8_t> eligible;
  if (!synthetic.empty()) {
    eligible.resize(synthetic.size());
    for (std::size_t i = 0; i < synthetic.size(); ++i) eligible[i] = synthetic[i] ? 0 : 1;
  }
  CvResult out;
  out.folds = stratified_folds(y, k, seed, eligible);
  for (std::size_t f = 0; f < k; ++f) {
    const auto test_idx = out.folds.test_indices(f);
    const auto train_idx = out.folds.train_indices(f);
    const PairDataset test = subset(data, test_idx);
    const std::vector<double> scores = fn(subset(data, train_idx), test);
    require(scores.size() == test.size(), "k_fold_cv: scoring function returned the wrong number of scores");
    out.per_fold.push_back(evaluate_scores(test.binary_labels(), scores));
  }
  out.mean = mean_report(out.per_fold);
  return out;
}

HoldoutSplit holdout_split(const PairDataset& data, double ratio, std::uint64_t seed,
                           std::span<const std::uint8_t> synthetic) {
  require(ratio > 0.0 && ratio < 1.0, "holdout_split: ratio must lie in (0,1)");
  require(synthetic.empty() || synthetic.size() == data.size(), "holdout_split: synthetic mask length");
  const std::vector<int> y = data.binary_labels();
  HoldoutSplit out;
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (y[i] != cls) continue;
      if (!synthetic.empty() && synthetic[i])
        out.train.push_back(i);
      else
        members.push_back(i);
    }
    Rng rng(Rng::substream(seed, cls == 1 ? "holdout-positive" : "holdout-negative"));
    rng.shuffle(members);
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(members.size())));
    for (std::size_t j = 0; j < members.size(); ++j) (j < n_train ? out.train : out.test).push_back(members[j]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  require(!out.train.empty() && !out.test.empty(), "holdout_split: one side of the split is empty");
  return out;
}

}  // namespace snnfra
