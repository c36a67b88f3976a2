#include "snnfra/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "snnfra/dimreduce.hpp"
#include "snnfra/evaluate.hpp"
#include "snnfra/fuzzyrough.hpp"
#include "snnfra/grid.hpp"
#include "snnfra/io.hpp"
#include "snnfra/learners.hpp"
#include "snnfra/pairgen.hpp"
#include "snnfra/random.hpp"
#include "snnfra/resample.hpp"
#include "snnfra/sweep.hpp"

namespace snnfra {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kStageNames[] = {"normalize", "candidates", "reduce", "score",
                                            "balance",   "train",      "evaluate", "sweep"};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Input {
  std::string name;
  fs::path path;
  std::optional<Stage> producer;
};

fs::path artifact(const RunContext& ctx, Stage producer, std::string_view file) {
  return ctx.run_dir / std::string(stage_name(producer)) / std::string(file);
}

std::vector<Input> stage_inputs(Stage stage, const RunContext& ctx) {
  const auto art = [&](Stage producer, std::string_view file) {
    return Input{std::string(stage_name(producer)) + "/" + std::string(file), artifact(ctx, producer, file), producer};
  };
  const RunConfig& c = ctx.config;
  switch (stage) {
    case Stage::normalize:
      if (c.drugs.empty() || c.targets.empty() || c.interactions.empty())
        fail(ErrorCode::ConfigError, "input.drugs, input.targets and input.interactions must all be set");
      return {{"input/drugs", c.drugs, std::nullopt},
              {"input/targets", c.targets, std::nullopt},
              {"input/interactions", c.interactions, std::nullopt}};
    case Stage::candidates:
      return {art(Stage::normalize, "drugs.csv"), art(Stage::normalize, "targets.csv"),
              art(Stage::normalize, "interactions.csv")};
    case Stage::reduce:
      return {art(Stage::normalize, "drugs.csv"), art(Stage::normalize, "targets.csv"),
              art(Stage::candidates, "positives.csv"), art(Stage::candidates, "candidates.csv")};
    case Stage::score:
      return {art(Stage::reduce, "positives.csv"), art(Stage::reduce, "candidates.csv")};
    case Stage::balance:
    case Stage::sweep:
      return {art(Stage::normalize, "drugs.csv"), art(Stage::normalize, "targets.csv"),
              art(Stage::candidates, "positives.csv"), art(Stage::candidates, "candidates.csv"),
              art(Stage::score, "scores.csv")};
    case Stage::train:
      return {art(Stage::balance, "balanced.csv")};
    case Stage::evaluate:
      return {art(Stage::balance, "balanced.csv"), art(Stage::train, "selection.json")};
  }
  return {};
}

// Earliest stage upstream of `stage` whose artifacts are missing.
std::optional<Stage> missing_upstream(Stage stage, const RunContext& ctx) {
  if (stage == Stage::normalize) return std::nullopt;
  for (const auto& in : stage_inputs(stage, ctx)) {
    if (!in.producer || fs::exists(in.path)) continue;
    const auto deeper = missing_upstream(*in.producer, ctx);
    return deeper ? deeper : in.producer;
  }
  return std::nullopt;
}

// ---- shared stage helpers ----

struct Entities {
  FeatureMatrix drugs;
  FeatureMatrix targets;
};

Entities load_entities(const RunContext& ctx) {
  return {load_feature_matrix(artifact(ctx, Stage::normalize, "drugs.csv")),
          load_feature_matrix(artifact(ctx, Stage::normalize, "targets.csv"))};
}

std::vector<std::string> pair_feature_names(const Entities& e) {
  std::vector<std::string> names;
  for (const auto& n : e.drugs.feature_names) names.push_back("drug." + n);
  for (const auto& n : e.targets.feature_names) names.push_back("target." + n);
  return names;
}

// Rebuilds concatenated feature vectors for an id-only pair table.
PairDataset with_features(const PairDataset& ids, const Entities& e) {
  PairDataset out(e.drugs.dim() + e.targets.dim());
  for (const auto& s : ids.samples()) {
    const auto d = e.drugs.find(s.drug);
    const auto t = e.targets.find(s.target);
    if (!d) fail(ErrorCode::UnknownEntity, "unknown drug '" + s.drug + "'");
    if (!t) fail(ErrorCode::UnknownEntity, "unknown target '" + s.target + "'");
    PairSample p = concat_pair(e.drugs.row(*d), e.targets.row(*t), s.drug, s.target, s.label);
    p.frua_score = s.frua_score;
    out.add(std::move(p));
  }
  return out;
}

PairDataset load_with_features(const RunContext& ctx, Stage producer, std::string_view file, const Entities& e) {
  return with_features(load_pair_dataset(artifact(ctx, producer, file)).data, e);
}

PairDataset select_features(const PairDataset& data, const std::vector<std::size_t>& features) {
  PairDataset out(features.size());
  for (const auto& s : data.samples()) {
    PairSample p = s;
    p.features.resize(features.size());
    for (std::size_t j = 0; j < features.size(); ++j) p.features[j] = s.features[features[j]];
    out.add(std::move(p));
  }
  return out;
}

PairDataset replace_features(const PairDataset& data, const DenseMatrix& values) {
  PairDataset out(values.cols());
  for (std::size_t i = 0; i < data.size(); ++i) {
    PairSample p = data[i];
    const auto row = values.row(i);
    p.features.assign(row.begin(), row.end());
    out.add(std::move(p));
  }
  return out;
}

const TreeParams& tree_of(const ClassifierSpec& s) {
  switch (s.kind) {
    case ClassifierKind::decision_tree: return s.tree;
    case ClassifierKind::random_forest: return s.forest.tree;
    default: return s.boost.base_tree;
  }
}

json spec_to_json(const ClassifierSpec& s) {
  const TreeParams& t = tree_of(s);
  json j;
  j["kind"] = to_string(s.kind);
  j["max_depth"] = t.max_depth;
  j["min_samples_leaf"] = t.min_samples_leaf;
  j["min_samples_split"] = t.min_samples_split;
  j["max_features"] = t.max_features == MaxFeatures::sqrt ? "sqrt" : "all";
  if (s.kind == ClassifierKind::random_forest) {
    j["n_estimators"] = s.forest.n_estimators;
    j["bootstrap"] = s.forest.bootstrap;
  } else if (s.kind == ClassifierKind::rusboost) {
    j["n_estimators"] = s.boost.n_estimators;
    j["learning_rate"] = s.boost.learning_rate;
  }
  return j;
}

ClassifierSpec spec_from_json(const json& j) {
  try {
    ClassifierSpec s;
    s.kind = parse_classifier(j.at("kind").get<std::string>());
    const TreeParams t{j.at("max_depth").get<std::size_t>(), j.at("min_samples_leaf").get<std::size_t>(),
                       j.at("min_samples_split").get<std::size_t>(),
                       j.at("max_features").get<std::string>() == "all" ? MaxFeatures::all : MaxFeatures::sqrt};
    switch (s.kind) {
      case ClassifierKind::decision_tree: s.tree = t; break;
      case ClassifierKind::random_forest:
        s.forest.tree = t;
        s.forest.n_estimators = j.at("n_estimators").get<std::size_t>();
        s.forest.bootstrap = j.at("bootstrap").get<bool>();
        break;
      case ClassifierKind::rusboost:
        s.boost.base_tree = t;
        s.boost.n_estimators = j.at("n_estimators").get<std::size_t>();
        s.boost.learning_rate = j.at("learning_rate").get<double>();
        break;
    }
    return s;
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("selection.json: ") + e.what());
  }
}

json metrics_json(const MetricsReport& m) {
  json j;
  j["auc"] = m.auc;
  j["f1"] = m.f1;
  j["gmean"] = m.g_mean;
  j["sensitivity"] = m.sensitivity;
  j["specificity"] = m.specificity;
  j["tp"] = m.confusion.tp;
  j["fp"] = m.confusion.fp;
  j["tn"] = m.confusion.tn;
  j["fn"] = m.confusion.fn;
  j["undefined"] = json::array();
  if (m.auc_undefined) j["undefined"].push_back("auc");
  if (m.sensitivity_undefined) j["undefined"].push_back("sensitivity");
  if (m.specificity_undefined) j["undefined"].push_back("specificity");
  if (m.f1_undefined) j["undefined"].push_back("f1");
  return j;
}

std::string metrics_row(const std::string& key, const MetricsReport& m) {
  const auto& c = m.confusion;
  return key + "," + format_score(m.auc) + "," + format_score(m.f1) + "," + format_score(m.g_mean) + "," +
         format_score(m.sensitivity) + "," + format_score(m.specificity) + "," + std::to_string(c.tp) + "," +
         std::to_string(c.fp) + "," + std::to_string(c.tn) + "," + std::to_string(c.fn) + "\n";
}

void say(const RunContext& ctx, Stage stage, const std::string& msg) {
  if (ctx.log) *ctx.log << "[" << stage_name(stage) << "] " << msg << "\n";
}

std::vector<double> default_thresholds(const RunConfig& c) {
  // 50 evenly spaced values over the range the swept threshold may take.
  std::vector<double> t(50);
  const double lo = c.sweep_param == SweepParam::tq ? 0.0 : c.t_q;
  const double hi = c.sweep_param == SweepParam::tq ? c.t_p : 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = lo + (hi - lo) * static_cast<double>(i) / 49.0;
  return t;
}

// ---- stages ----

void stage_normalize(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const FeatureMatrix drugs = load_feature_matrix(c.drugs);
  const FeatureMatrix targets = load_feature_matrix(c.targets);
  const InteractionSet interactions = load_interactions(c.interactions, drugs, targets);
  const FeatureMatrix dn = min_max_normalize(drugs);
  const FeatureMatrix tn = min_max_normalize(targets);
  write_feature_matrix(out / "drugs.csv", dn);
  write_feature_matrix(out / "targets.csv", tn);
  write_interactions(out / "interactions.csv", interactions, dn, tn);
  say(ctx, Stage::normalize,
      std::to_string(dn.size()) + " drugs, " + std::to_string(tn.size()) + " targets, " +
          std::to_string(interactions.size()) + " interactions (" + std::to_string(interactions.duplicates_removed) +
          " duplicates removed)");
}

void stage_candidates(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const Entities e = load_entities(ctx);
  const InteractionSet interactions =
      load_interactions(artifact(ctx, Stage::normalize, "interactions.csv"), e.drugs, e.targets);
  CandidateOptions o;
  o.k = c.k_neighbors;
  o.k_min = c.kmedoids_k_min;
  o.k_max = c.kmedoids_k_max;
  o.block_rows = c.block_size;
  o.entity_pca_components = c.entity_pca_components;
  o.seed = Rng::substream(c.seed, "candidates");
  const CandidatePool pool = generate_candidates(interactions, e.drugs, e.targets, o);

  PairWriteOptions ids_only;
  ids_only.features = false;
  write_pair_dataset(out / "positives.csv", pool.positives, ids_only);
  write_pair_dataset(out / "candidates.csv", pool.candidates, ids_only);
  std::string prov = "drug_id,target_id,src_drug,src_target\n";
  for (std::size_t i = 0; i < pool.candidates.size(); ++i)
    prov += pool.candidates[i].drug + "," + pool.candidates[i].target + "," + pool.provenance[i].drug + "," +
            pool.provenance[i].target + "\n";
  write_text_atomic(out / "provenance.csv", prov);

  const std::size_t space = e.drugs.size() * e.targets.size() - pool.positives.size();
  say(ctx, Stage::candidates,
      std::to_string(pool.candidates.size()) + " candidates out of " + std::to_string(space) + " unannotated pairs");
}

void stage_reduce(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const Entities e = load_entities(ctx);
  const PairDataset pos = load_with_features(ctx, Stage::candidates, "positives.csv", e);
  const PairDataset cand = load_with_features(ctx, Stage::candidates, "candidates.csv", e);
  DenseMatrix all = pos.feature_matrix();
  for (const auto& s : cand.samples()) all.append_row(s.features);
  const std::size_t d = all.cols();
  const std::size_t n = all.rows();
  require(n > 0, "reduce: no samples");
  const std::size_t q_fit =
      c.pca_components ? std::min(c.pca_components, d) : std::min({d, n, c.pca_max_components});
  PcaModel model = ipca_fit(all, q_fit, std::max(c.pca_batch_size, q_fit));
  const std::size_t q = c.pca_components ? q_fit : components_for_variance(model, c.pca_variance, c.pca_max_components);
  model = truncate_components(model, q);
  write_text_atomic(out / "pca_model.txt", render_pca_model(model));

  std::vector<std::string> names;
  for (std::size_t j = 0; j < q; ++j) names.push_back("pc" + std::to_string(j + 1));
  PairWriteOptions w;
  w.feature_names = &names;
  write_pair_dataset(out / "positives.csv", replace_features(pos, ipca_transform(model, pos.feature_matrix())), w);
  write_pair_dataset(out / "candidates.csv",
                     replace_features(cand, cand.empty() ? DenseMatrix(0, q) : ipca_transform(model, cand.feature_matrix())), w);
  say(ctx, Stage::reduce, std::to_string(d) + " features reduced to " + std::to_string(q) + " components");
}

void stage_score(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const PairDataset pos = load_pair_dataset(artifact(ctx, Stage::reduce, "positives.csv")).data;
  const PairDataset cand = load_pair_dataset(artifact(ctx, Stage::reduce, "candidates.csv")).data;
  FruaOptions o = default_groups(pos.size(), cand.size(), c.max_group_rows, Rng::substream(c.seed, "score"));
  if (c.m_groups) o.m_groups = std::min(c.m_groups, std::max<std::size_t>(1, pos.size()));
  if (c.n_groups) o.n_groups = std::min(c.n_groups, std::max<std::size_t>(1, cand.size()));
  const SimilarityKernel kernel = fit_scoring_kernel(c.similarity_kernel, pos, cand);
  const FruaScoreTable scores = averaged_frua(pos, cand, kernel, Connectives{c.tnorm}, o);
  write_score_table(out / "scores.csv", scores);
  say(ctx, Stage::score,
      std::to_string(scores.size()) + " candidates scored over " + std::to_string(o.m_groups) + "x" +
          std::to_string(o.n_groups) + " group tables");
}

void stage_balance(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const Entities e = load_entities(ctx);
  const PairDataset pos = load_with_features(ctx, Stage::candidates, "positives.csv", e);
  const PairDataset cand = load_with_features(ctx, Stage::candidates, "candidates.csv", e);
  const FruaScoreTable scores = load_score_table(artifact(ctx, Stage::score, "scores.csv"));
  const BalancedDataset b = balance(pos, cand, scores, ThresholdPolicy{c.t_p, c.t_q}, c.adasyn_beta, c.adasyn_k,
                                    Rng::substream(c.seed, streams::balance));
  const auto names = pair_feature_names(e);
  PairWriteOptions w;
  w.scores = true;
  w.synthetic = &b.synthetic;
  w.feature_names = &names;
  write_pair_dataset(out / "balanced.csv", b.data, w);

  std::string report = "drug_id,target_id,generated\n";
  std::size_t seed_index = 0;
  for (std::size_t i = 0; i < b.data.size() && seed_index < b.generated.size(); ++i) {
    if (b.synthetic[i] || b.data[i].label != b.minority) continue;
    report += b.data[i].drug + "," + b.data[i].target + "," + std::to_string(b.generated[seed_index++]) + "\n";
  }
  write_text_atomic(out / "synthesis.csv", report);
  const ClassCounts cc = b.data.class_counts();
  say(ctx, Stage::balance,
      std::to_string(cc.positive) + " positive, " + std::to_string(cc.negative) + " negative, " +
          std::to_string(b.parents.size()) + " synthetic" + (b.uniform_fallback ? " (uniform allocation)" : ""));
}

void stage_train(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const PairTable table = load_pair_dataset(artifact(ctx, Stage::balance, "balanced.csv"));
  PairDataset data = table.data;
  std::vector<std::size_t> features(data.dim());
  for (std::size_t j = 0; j < features.size(); ++j) features[j] = j;

  if (c.select_top_k > 0 && c.select_top_k < data.dim()) {
    ImportanceOptions io;
    io.minority_groups = c.importance_groups;
    io.seed = Rng::substream(c.seed, "importance");
    const auto importance = rf_feature_importance(data.feature_matrix(), data.binary_labels(), io);
    features = select_top_k_features(importance, c.select_top_k);
    std::string csv = "feature,importance,selected\n";
    for (std::size_t j = 0; j < importance.size(); ++j)
      csv += table.feature_names[j] + "," + format_double(importance[j]) + "," +
             (std::binary_search(features.begin(), features.end(), j) ? "1" : "0") + "\n";
    write_text_atomic(out / "importances.csv", csv);
    data = select_features(data, features);
  }

  const ClassifierSpec base = classifier_from_config(c);
  const std::vector<ClassifierSpec> cells = expand_grid(base, c);
  ClassifierSpec chosen = base;
  if (cells.size() > 1) {
    const GridResult g = grid_search(data, cells, c.cv_folds, parse_grid_metric(c.grid_metric),
                                     Rng::substream(c.seed, "grid"), table.synthetic);
    chosen = cells[g.best];
    std::string csv = "cell,classifier,score,error\n";
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
      std::string err = g.cells[i].error;
      std::replace(err.begin(), err.end(), ',', ';');
      csv += std::to_string(i) + "," + g.cells[i].spec.describe() + "," +
             (g.cells[i].error.empty() ? format_score(g.cells[i].score) : std::string("nan")) + "," + err + "\n";
    }
    write_text_atomic(out / "grid.csv", csv);
    say(ctx, Stage::train, "grid of " + std::to_string(cells.size()) + " cells, best " + chosen.describe());
  }

  const Classifier model = fit_classifier(chosen, data.feature_matrix(), data.binary_labels(),
                                          Rng::substream(c.seed, streams::train));
  write_text_atomic(out / "model.txt", render_model(model));

  json sel;
  sel["classifier"] = spec_to_json(chosen);
  sel["features"] = features;
  std::vector<std::string> names;
  for (std::size_t j : features) names.push_back(j < table.feature_names.size() ? table.feature_names[j] : "");
  sel["feature_names"] = names;
  write_text_atomic(out / "selection.json", sel.dump(2) + "\n");
  say(ctx, Stage::train, chosen.describe() + " on " + std::to_string(features.size()) + " features");
}

void stage_evaluate(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const PairTable table = load_pair_dataset(artifact(ctx, Stage::balance, "balanced.csv"));
  json sel;
  try {
    sel = json::parse(read_file(artifact(ctx, Stage::train, "selection.json")));
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("selection.json: ") + e.what());
  }
  const ClassifierSpec spec = spec_from_json(sel.at("classifier"));
  const auto features = sel.at("features").get<std::vector<std::size_t>>();
  for (std::size_t j : features) require(j < table.data.dim(), "selection.json: feature index out of range");

  BalancedDataset b;
  b.data = select_features(table.data, features);
  b.synthetic = table.synthetic.empty() ? std::vector<std::uint8_t>(b.data.size(), 0) : table.synthetic;

  const std::uint64_t fit_seed = Rng::substream(c.seed, streams::train);
  const CvResult cv = k_fold_cv(
      b.data, c.cv_folds,
      [&](const PairDataset& train, const PairDataset& test) {
        return fit_classifier(spec, train.feature_matrix(), train.binary_labels(), fit_seed)
            .predict_proba(test.feature_matrix());
      },
      Rng::substream(c.seed, streams::cv), b.synthetic);
  std::string cv_csv = "fold,auc,f1,gmean,sensitivity,specificity,tp,fp,tn,fn\n";
  for (std::size_t f = 0; f < cv.per_fold.size(); ++f) cv_csv += metrics_row(std::to_string(f), cv.per_fold[f]);
  cv_csv += metrics_row("mean", cv.mean);
  write_text_atomic(out / "cv.csv", cv_csv);

  const HoldoutResult h = run_holdout(b, spec, c.holdout_ratio, c.seed);
  std::string pred = "drug_id,target_id,label,score\n";
  for (std::size_t i = 0; i < h.split.test.size(); ++i) {
    const auto& s = b.data[h.split.test[i]];
    pred += s.drug + "," + s.target + "," + (s.label == Label::positive ? "1" : "0") + "," +
            format_double(h.test_scores[i]) + "\n";
  }
  write_text_atomic(out / "predictions.csv", pred);
  write_text_atomic(out / "holdout.csv", "split,auc,f1,gmean,sensitivity,specificity,tp,fp,tn,fn\n" +
                                              metrics_row("holdout", h.metrics));

  json report;
  report["classifier"] = spec.describe();
  report["cv_folds"] = c.cv_folds;
  report["cv_mean"] = metrics_json(cv.mean);
  report["holdout_ratio"] = c.holdout_ratio;
  report["holdout"] = metrics_json(h.metrics);
  report["samples"] = b.data.size();
  write_text_atomic(out / "metrics.json", report.dump(2) + "\n");
  say(ctx, Stage::evaluate,
      spec.describe() + ": cv mean auc " + format_score(cv.mean.auc) + ", holdout auc " + format_score(h.metrics.auc));
}

void stage_sweep(const RunContext& ctx, const fs::path& out) {
  const RunConfig& c = ctx.config;
  const Entities e = load_entities(ctx);
  const PairDataset pos = load_with_features(ctx, Stage::candidates, "positives.csv", e);
  const PairDataset cand = load_with_features(ctx, Stage::candidates, "candidates.csv", e);
  const FruaScoreTable scores = load_score_table(artifact(ctx, Stage::score, "scores.csv"));
  SweepOptions o;
  o.base = ThresholdPolicy{c.t_p, c.t_q};
  o.param = c.sweep_param;
  o.beta = c.adasyn_beta;
  o.adasyn_k = c.adasyn_k;
  o.classifier = classifier_from_config(c);
  o.holdout_ratio = c.holdout_ratio;
  o.seed = c.seed;
  const auto thresholds = c.sweep_thresholds.empty() ? default_thresholds(c) : c.sweep_thresholds;
  const auto rows = threshold_sweep(pos, cand, scores, thresholds, o);
  write_text_atomic(out / "sweep.csv", render_sweep_csv(rows));
  std::size_t failed = 0;
  for (const auto& r : rows) failed += !r.error.empty();
  say(ctx, Stage::sweep, std::to_string(rows.size()) + " thresholds, " + std::to_string(failed) + " failed");
}

void execute(Stage stage, const RunContext& ctx, const fs::path& out) {
  switch (stage) {
    case Stage::normalize: return stage_normalize(ctx, out);
    case Stage::candidates: return stage_candidates(ctx, out);
    case Stage::reduce: return stage_reduce(ctx, out);
    case Stage::score: return stage_score(ctx, out);
    case Stage::balance: return stage_balance(ctx, out);
    case Stage::train: return stage_train(ctx, out);
    case Stage::evaluate: return stage_evaluate(ctx, out);
    case Stage::sweep: return stage_sweep(ctx, out);
  }
}

bool up_to_date(const StageManifest& want, const fs::path& dir) {
  const fs::path manifest = dir / "manifest.json";
  if (!fs::exists(manifest)) return false;
  StageManifest have;
  try {
    have = StageManifest::parse(read_file(manifest));
  } catch (const Error&) {
    return false;
  }
  if (have.stage != want.stage || have.seed != want.seed || have.config_digest != want.config_digest ||
      have.inputs != want.inputs)
    return false;
  for (const auto& o : have.outputs) {
    const fs::path p = dir / o.name;
    if (!fs::exists(p) || file_digest(p) != o.digest) return false;
  }
  return true;
}

StageOutcome run_stage_unwrapped(Stage stage, const RunContext& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const std::string name(stage_name(stage));
  const RunConfig& c = ctx.config;

  StageManifest m;
  m.stage = name;
  m.seed = c.seed;
  m.config_digest = hex64(fnv1a64(stage_config_text(stage, c)));
  for (const auto& in : stage_inputs(stage, ctx)) {
    if (!fs::exists(in.path)) {
      if (in.producer) {
        const auto first = missing_upstream(stage, ctx).value_or(*in.producer);
        fail(ErrorCode::DependencyError, "run stage '" + std::string(stage_name(first)) + "' first (missing " +
                                             in.name + ")");
      }
      fail(ErrorCode::IoError, "input file not found: " + in.path.string());
    }
    m.inputs.push_back({in.name, file_digest(in.path)});
  }

  const fs::path dir = ctx.run_dir / name;
  if (!ctx.force && up_to_date(m, dir)) {
    say(ctx, stage, "up to date, skipped");
    return {stage, true, 0.0};
  }

  const fs::path staging = ctx.run_dir / ("." + name + ".staging");
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    execute(stage, ctx, staging);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(staging))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) m.outputs.push_back({f.filename().string(), file_digest(f)});
    write_text_atomic(staging / "manifest.json", m.render());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_atomic(staging / "timing.txt", "wall_time_s=" + format_double(seconds) + "\n");
    fs::remove_all(dir);
    fs::rename(staging, dir);
    return {stage, false, seconds};
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace

std::string_view stage_name(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

std::optional<Stage> parse_stage(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kStageNames); ++i)
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  return std::nullopt;
}

const std::vector<Stage>& pipeline_stages() {
  static const std::vector<Stage> stages{Stage::normalize, Stage::candidates, Stage::reduce,  Stage::score,
                                         Stage::balance,   Stage::train,      Stage::evaluate};
  return stages;
}

std::string StageManifest::render() const {
  json j;
  j["stage"] = stage;
  j["seed"] = seed;
  j["config_digest"] = config_digest;
  j["inputs"] = json::array();
  for (const auto& i : inputs) j["inputs"].push_back({{"name", i.name}, {"digest", i.digest}});
  j["outputs"] = json::array();
  for (const auto& o : outputs) j["outputs"].push_back({{"name", o.name}, {"digest", o.digest}});
  return j.dump(2) + "\n";
}

StageManifest StageManifest::parse(const std::string& text) {
  try {
    const json j = json::parse(text);
    StageManifest m;
    m.stage = j.at("stage").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_digest = j.at("config_digest").get<std::string>();
    for (const auto& i : j.at("inputs")) m.inputs.push_back({i.at("name"), i.at("digest")});
    for (const auto& o : j.at("outputs")) m.outputs.push_back({o.at("name"), o.at("digest")});
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("manifest: ") + e.what());
  }
}

std::string file_digest(const fs::path& path) { return hex64(fnv1a64(read_file(path))); }

std::string stage_config_text(Stage stage, const RunConfig& config) {
  std::vector<std::string_view> prefixes{"general.seed"};
  switch (stage) {
    case Stage::normalize: break;
    case Stage::candidates: prefixes.insert(prefixes.end(), {"neighbors.", "clustering."}); break;
    case Stage::reduce: prefixes.push_back("pca."); break;
    case Stage::score: prefixes.push_back("fuzzy."); break;
    case Stage::balance: prefixes.push_back("sampling."); break;
    case Stage::train:
      prefixes.insert(prefixes.end(), {"features.", "classifier.", "grid.", "evaluate.cv_folds"});
      break;
    case Stage::evaluate: prefixes.insert(prefixes.end(), {"evaluate.cv_folds", "evaluate.holdout_ratio"}); break;
    case Stage::sweep: prefixes.insert(prefixes.end(), {"sampling.", "classifier.", "evaluate."}); break;
  }
  std::string out = std::string(stage_name(stage)) + "\n";
  std::istringstream in(config.canonical());
  std::string line;
  while (std::getline(in, line))
    for (auto p : prefixes)
      if (line.starts_with(p)) {
        out += line + "\n";
        break;
      }
  return out;
}

fs::path run_root() {
  const char* env = std::getenv("SNNFRA_RUN_ROOT");
  return (env && *env) ? fs::path(env) : fs::path("runs");
}

fs::path new_run_dir(const RunConfig& config) {
  const fs::path root = run_root();
  if (!config.run_name.empty()) return root / config.run_name;
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  fs::path dir = root / stamp;
  for (int i = 2; fs::exists(dir); ++i) dir = root / (std::string(stamp) + "-" + std::to_string(i));
  return dir;
}

fs::path existing_run_dir(const RunConfig& config) {
  const fs::path root = run_root();
  if (!config.run_name.empty()) return root / config.run_name;
  std::vector<fs::path> runs;
  if (fs::exists(root))
    for (const auto& entry : fs::directory_iterator(root))
      if (entry.is_directory()) runs.push_back(entry.path());
  if (runs.empty()) fail(ErrorCode::DependencyError, "no run directory under " + root.string() + "; run stage 'normalize' first");
  return *std::max_element(runs.begin(), runs.end());
}

StageFailure::StageFailure(Stage stage, const Error& cause)
    : Error(cause.code(), "stage " + std::string(stage_name(stage)) + ": " + cause.message()), stage_(stage) {}

StageOutcome run_stage(Stage stage, const RunContext& context) {
  try {
    return run_stage_unwrapped(stage, context);
  } catch (const StageFailure&) {
    throw;
  } catch (const Error& e) {
    throw StageFailure(stage, e);
  } catch (const fs::filesystem_error& e) {
    throw StageFailure(stage, Error(ErrorCode::IoError, e.what()));
  }
}

std::vector<StageOutcome> run_pipeline(const RunContext& context) {
  std::vector<StageOutcome> outcomes;
  for (Stage s : pipeline_stages()) outcomes.push_back(run_stage(s, context));
  return outcomes;
}

int exit_code_for(const Error& error) {
  if (error.code() == ErrorCode::ConfigError) return 2;
  if (const auto* f = dynamic_cast<const StageFailure*>(&error)) return f->stage() == Stage::normalize ? 3 : 4;
  return 4;
}

}  // namespace snnfra
