#include "snnfra/sweep.hpp"

#include <algorithm>
#include <chrono>

#include "snnfra/error.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

HoldoutResult run_holdout(const BalancedDataset& balanced, const ClassifierSpec& spec, double ratio,
                          std::uint64_t seed) {
  HoldoutResult out;
  out.split = holdout_split(balanced.data, ratio, Rng::substream(seed, streams::holdout), balanced.synthetic);
  const PairDataset train = subset(balanced.data, out.split.train);
  const PairDataset test = subset(balanced.data, out.split.test);
  const Classifier model =
      fit_classifier(spec, train.feature_matrix(), train.binary_labels(), Rng::substream(seed, streams::train));
  out.test_scores = model.predict_proba(test.feature_matrix());
  out.metrics = evaluate_scores(test.binary_labels(), out.test_scores);
  return out;
}

std::vector<SweepRow> threshold_sweep(const PairDataset& positives, const PairDataset& candidates,
                                      const FruaScoreTable& scores, const std::vector<double>& thresholds,
                                      const SweepOptions& options) {
  for (double t : thresholds) require(t >= 0.0 && t <= 1.0, "threshold_sweep: thresholds must lie in [0,1]");
  std::vector<SweepRow> rows;
  rows.reserve(thresholds.size());
  for (double t : thresholds) {
    SweepRow row;
    row.threshold = t;
    const auto start = std::chrono::steady_clock::now();
    try {
      ThresholdPolicy policy = options.base;
      (options.param == SweepParam::tq ? policy.t_q : policy.t_p) = t;
      const BalancedDataset balanced =
          balance(positives, candidates, scores, policy, options.beta, options.adasyn_k,
                  Rng::substream(options.seed, streams::balance));
      const HoldoutResult h = run_holdout(balanced, options.classifier, options.holdout_ratio, options.seed);
      row.auc = h.metrics.auc;
      row.f1 = h.metrics.f1;
      row.gmean = h.metrics.g_mean;
    } catch (const Error& e) {
      row.error = e.what();
    }
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.threshold < b.threshold; });
  return rows;
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "threshold,auc,f1,gmean,runtime_s,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += format_double(r.threshold) + "," + format_score(r.auc) + "," + format_score(r.f1) + "," +
           format_score(r.gmean) + "," + format_score(r.runtime_s) + "," + err + "\n";
  }
  return out;
}

}  // namespace snnfra
