#include "snnfra/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "snnfra/error.hpp"
#include "snnfra/io.hpp"
#include "snnfra/random.hpp"

namespace snnfra {

void TreeParams::validate() const {
  require(max_depth >= 1, "tree: max_depth must be at least 1");
  require(min_samples_leaf >= 1, "tree: min_samples_leaf must be at least 1");
  require(min_samples_split >= 2, "tree: min_samples_split must be at least 2");
}

double gini_impurity(std::span<const double> class_counts) {
  double total = 0.0;
  for (double c : class_counts) {
    require(c >= 0.0, "gini_impurity: negative class count");
    total += c;
  }
  require(total > 0.0, "gini_impurity: all class counts are zero");
  double sum_sq = 0.0;
  for (double c : class_counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

namespace {

double gini2(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  const double p0 = w0 / w, p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DenseMatrix& x, const std::vector<int>& y, std::span<const double> w, const TreeParams& p)
      : x_(x), y_(y), w_(w), p_(p), importance_(x.cols(), 0.0) {
    const std::size_t d = x.cols();
    max_features_ = p.max_features == MaxFeatures::all
                        ? d
                        : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  }

  TreeModel build(std::vector<std::size_t> samples, std::uint64_t seed) {
    grow(std::move(samples), 0, seed);
    return TreeModel(x_.cols(), std::move(nodes_), std::move(importance_));
  }

 private:
  int grow(std::vector<std::size_t> samples, std::size_t depth, std::uint64_t node_seed) {
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i : samples) (y_[i] == 1 ? w1 : w0) += w_[i];
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, (w0 + w1) > 0.0 ? w1 / (w0 + w1) : 0.0});

    const bool pure = w0 <= 0.0 || w1 <= 0.0;
    if (pure || depth >= p_.max_depth || samples.size() < p_.min_samples_split ||
        samples.size() < 2 * p_.min_samples_leaf)
      return id;

    const Split split = best_split(samples, w0, w1, node_seed);
    if (!split.found) return id;

    importance_[split.feature] += split.gain;
    std::vector<std::size_t> left, right;
    left.reserve(split.left_count);
    right.reserve(samples.size() - split.left_count);
    for (std::size_t i : samples) (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();

    nodes_[static_cast<std::size_t>(id)].feature = static_cast<int>(split.feature);
    nodes_[static_cast<std::size_t>(id)].threshold = split.threshold;
    const int l = grow(std::move(left), depth + 1, splitmix64(node_seed ^ 0x6c656674ULL));
    const int r = grow(std::move(right), depth + 1, splitmix64(node_seed ^ 0x72696768ULL));
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& samples, double w0, double w1, std::uint64_t node_seed) {
    const std::size_t d = x_.cols();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (max_features_ < d) {
      Rng rng(node_seed);
      rng.shuffle(order);
    }
    const double parent = (w0 + w1) * gini2(w0, w1);
    const double tol = 1e-12 * std::max(1.0, parent);

    Split best;
    std::vector<std::size_t> sorted(samples);
    std::size_t visited = 0;
    for (std::size_t f : order) {
      if (visited >= max_features_) break;
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        const double va = x_(a, f), vb = x_(b, f);
        return va < vb || (va == vb && a < b);
      });
      if (x_(sorted.front(), f) == x_(sorted.back(), f)) continue;  // constant here; does not count
      ++visited;

      double l0 = 0.0, l1 = 0.0;
      const std::size_t n = sorted.size();
      for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        const std::size_t i = sorted[pos];
        (y_[i] == 1 ? l1 : l0) += w_[i];
        const double v = x_(i, f), next = x_(sorted[pos + 1], f);
        if (v == next) continue;
        const std::size_t left_n = pos + 1;
        if (left_n < p_.min_samples_leaf || n - left_n < p_.min_samples_leaf) continue;
        const double r0 = w0 - l0, r1 = w1 - l1;
        const double gain = parent - (l0 + l1) * gini2(l0, l1) - (r0 + r1) * gini2(r0, r1);
        double threshold = v + (next - v) / 2.0;
        if (threshold >= next) threshold = v;
        const bool better =
            !best.found || gain > best.gain + tol ||
            (gain >= best.gain - tol && (f < best.feature || (f == best.feature && threshold < best.threshold)));
        if (better) best = Split{true, f, threshold, gain, left_n};
      }
    }
    if (best.found) best.gain = std::max(0.0, best.gain);
    return best;
  }

  const DenseMatrix& x_;
  const std::vector<int>& y_;
  std::span<const double> w_;
  const TreeParams& p_;
  std::size_t max_features_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<double> importance_;
};

void check_xy(const DenseMatrix& x, const std::vector<int>& y) {
  require(x.rows() > 0, "fit: empty dataset");
  require(x.rows() == y.size(), "fit: label count differs from row count");
  for (int v : y) require(v == 0 || v == 1, "fit: labels must be 0 or 1");
}

std::vector<double> normalized(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s > 0.0)
    for (double& x : v) x /= s;
  return v;
}

}  // namespace

double TreeModel::predict_proba(std::span<const double> x) const {
  require(!nodes_.empty(), "predict_proba: empty tree");
  require(x.size() == dim_, "predict_proba: feature count mismatch");
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].proba;
}

std::vector<double> TreeModel::predict_proba(const DenseMatrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_proba(x.row(r));
  return out;
}

std::vector<double> TreeModel::feature_importances() const { return normalized(importance_); }

std::size_t TreeModel::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[i].feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return best;
}

TreeModel fit_tree(const DenseMatrix& x, const std::vector<int>& y, const TreeParams& params, std::uint64_t seed,
                   std::span<const double> weights) {
  check_xy(x, y);
  params.validate();
  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(y.size(), 1.0);
    weights = unit;
  }
  require(weights.size() == y.size(), "fit_tree: weight count mismatch");
  std::vector<std::size_t> samples;
  for (std::size_t i = 0; i < y.size(); ++i) {
    require(weights[i] >= 0.0 && std::isfinite(weights[i]), "fit_tree: weights must be finite and nonnegative");
    if (weights[i] > 0.0) samples.push_back(i);
  }
  require(!samples.empty(), "fit_tree: all weights are zero");
  TreeBuilder builder(x, y, weights, params);
  return builder.build(std::move(samples), splitmix64(seed));
}

double ForestModel::predict_proba(std::span<const double> x) const {
  require(!trees_.empty(), "predict_proba: empty forest");
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict_proba(x);
  return s / static_cast<double>(trees_.size());
}

std::vector<double> ForestModel::predict_proba(const DenseMatrix& x) const {
  std::vector<double> out(x.rows());
  const auto ln = static_cast<long long>(x.rows());
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < ln; ++r) out[static_cast<std::size_t>(r)] = predict_proba(x.row(static_cast<std::size_t>(r)));
  return out;
}

std::vector<double> ForestModel::feature_importances() const {
  require(!trees_.empty(), "feature_importances: empty forest");
  std::vector<double> sum(trees_.front().dim(), 0.0);
  for (const auto& t : trees_) {
    const auto imp = t.feature_importances();
    for (std::size_t f = 0; f < sum.size(); ++f) sum[f] += imp[f];
  }
  return normalized(std::move(sum));
}

ForestModel fit_forest(const DenseMatrix& x, const std::vector<int>& y, const ForestParams& params) {
  check_xy(x, y);
  params.tree.validate();
  require(params.n_estimators >= 1, "fit_forest: n_estimators must be at least 1");
  std::vector<TreeModel> trees(params.n_estimators);
  const auto lt = static_cast<long long>(params.n_estimators);
  const std::size_t n = y.size();
#pragma omp parallel for schedule(dynamic, 1)
  for (long long t = 0; t < lt; ++t) {
    const std::uint64_t tree_seed = Rng::substream(params.seed, static_cast<std::uint64_t>(t));
    std::vector<double> w(n, 1.0);
    if (params.bootstrap) {
      std::fill(w.begin(), w.end(), 0.0);
      Rng rng = Rng::derive(tree_seed, "bootstrap");
      for (std::size_t i = 0; i < n; ++i) w[rng.index(n)] += 1.0;
    }
    trees[static_cast<std::size_t>(t)] = fit_tree(x, y, params.tree, Rng::substream(tree_seed, "tree"), w);
  }
  return ForestModel(std::move(trees));
}

double BoostModel::decision_function(std::span<const double> x) const {
  double f = 0.0;
  for (std::size_t t = 0; t < trees_.size(); ++t) f += alphas_[t] * (trees_[t].predict_proba(x) >= 0.5 ? 1.0 : -1.0);
  return f;
}

double BoostModel::predict_proba(std::span<const double> x) const {
  require(!trees_.empty(), "predict_proba: empty boosting model");
  return 1.0 / (1.0 + std::exp(-2.0 * decision_function(x)));
}

std::vector<double> BoostModel::predict_proba(const DenseMatrix& x) const {
  std::vector<double> out(x.rows());
  const auto ln = static_cast<long long>(x.rows());
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < ln; ++r) out[static_cast<std::size_t>(r)] = predict_proba(x.row(static_cast<std::size_t>(r)));
  return out;
}

BoostModel fit_rusboost(const DenseMatrix& x, const std::vector<int>& y, const BoostParams& params) {
  check_xy(x, y);
  params.base_tree.validate();
  require(params.n_estimators >= 1, "fit_rusboost: n_estimators must be at least 1");
  require(params.learning_rate > 0.0, "fit_rusboost: learning_rate must be positive");
  const std::size_t n = y.size();
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (y[i] == 1 ? pos : neg).push_back(i);
  require(!pos.empty() && !neg.empty(), "fit_rusboost: both classes must be present");
  const auto& minor = pos.size() <= neg.size() ? pos : neg;
  const auto& major = pos.size() <= neg.size() ? neg : pos;

  constexpr double kMinError = 1e-10;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<TreeModel> trees;
  std::vector<double> alphas;
  BoostModel audit;

  for (std::size_t t = 0; t < params.n_estimators; ++t) {
    Rng rng(Rng::substream(params.seed, t));
    // Efraimidis-Spirakis: the m largest log(u)/w keys form a weighted sample without replacement.
    std::vector<std::size_t> chosen;
    if (major.size() <= minor.size()) {
      chosen = major;
    } else {
      std::vector<std::pair<double, std::size_t>> keys;
      keys.reserve(major.size());
      for (std::size_t i : major) {
        const double u = 1.0 - rng.uniform();
        keys.emplace_back(w[i] > 0.0 ? std::log(u) / w[i] : -std::numeric_limits<double>::infinity(), i);
      }
      std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(minor.size()), keys.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
      for (std::size_t r = 0; r < minor.size(); ++r) chosen.push_back(keys[r].second);
    }
    std::vector<std::size_t> rows(minor);
    rows.insert(rows.end(), chosen.begin(), chosen.end());
    std::sort(rows.begin(), rows.end());
    std::vector<int> ys(rows.size());
    std::vector<double> ws(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      ys[r] = y[rows[r]];
      ws[r] = w[rows[r]];
    }
    TreeModel tree = fit_tree(x.select_rows(rows), ys, params.base_tree, rng.next(), ws);

    std::vector<double> h(n);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = tree.predict_proba(x.row(i)) >= 0.5 ? 1.0 : -1.0;
      if ((h[i] > 0.0) != (y[i] == 1)) err += w[i];
    }
    audit.errors.push_back(err);

    if (err >= 0.5) {
      if (trees.empty()) {
        trees.push_back(std::move(tree));
        alphas.push_back(params.learning_rate);
      }
      break;
    }
    const double e = std::max(err, kMinError);
    const double alpha = params.learning_rate * 0.5 * std::log((1.0 - e) / e);
    trees.push_back(std::move(tree));
    alphas.push_back(alpha);
    if (err <= 0.0) break;

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      w[i] *= std::exp(-alpha * yi * h[i]);
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
    audit.weight_sums.push_back(std::accumulate(w.begin(), w.end(), 0.0));
  }
  BoostModel model(std::move(trees), std::move(alphas));
  model.errors = std::move(audit.errors);
  model.weight_sums = std::move(audit.weight_sums);
  return model;
}

std::string ClassifierSpec::describe() const {
  std::ostringstream os;
  auto tree_str = [](const TreeParams& t) {
    return "max_depth=" + std::to_string(t.max_depth) + " min_samples_leaf=" + std::to_string(t.min_samples_leaf) +
           " min_samples_split=" + std::to_string(t.min_samples_split) +
           " max_features=" + (t.max_features == MaxFeatures::sqrt ? "sqrt" : "all");
  };
  switch (kind) {
    case ClassifierKind::decision_tree: os << "dt " << tree_str(tree); break;
    case ClassifierKind::random_forest:
      os << "rf n_estimators=" << forest.n_estimators << " " << tree_str(forest.tree)
         << " bootstrap=" << (forest.bootstrap ? "true" : "false");
      break;
    case ClassifierKind::rusboost:
      os << "rusboost n_estimators=" << boost.n_estimators << " learning_rate=" << format_double(boost.learning_rate)
         << " " << tree_str(boost.base_tree);
      break;
  }
  return os.str();
}

ClassifierSpec classifier_from_config(const RunConfig& config) {
  ClassifierSpec spec;
  spec.kind = config.classifier;
  const TreeParams tp{config.max_depth, config.min_samples_leaf, config.min_samples_split,
                      config.max_features == "all" ? MaxFeatures::all : MaxFeatures::sqrt};
  switch (spec.kind) {
    case ClassifierKind::decision_tree:
      spec.tree = tp;
      break;
    case ClassifierKind::random_forest:
      spec.forest.tree = tp;
      spec.forest.n_estimators = config.n_estimators ? config.n_estimators : 200;
      spec.forest.bootstrap = config.bootstrap;
      break;
    case ClassifierKind::rusboost:
      spec.boost.base_tree = tp;
      spec.boost.n_estimators = config.n_estimators ? config.n_estimators : 500;
      spec.boost.learning_rate = config.learning_rate;
      break;
  }
  return spec;
}

double Classifier::predict_proba(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, model_);
}

std::vector<double> Classifier::predict_proba(const DenseMatrix& x) const {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, model_);
}

Classifier fit_classifier(const ClassifierSpec& spec, const DenseMatrix& x, const std::vector<int>& y,
                          std::uint64_t seed) {
  switch (spec.kind) {
    case ClassifierKind::decision_tree: return Classifier(fit_tree(x, y, spec.tree, seed));
    case ClassifierKind::random_forest: {
      ForestParams p = spec.forest;
      p.seed = seed;
      return Classifier(fit_forest(x, y, p));
    }
    case ClassifierKind::rusboost: {
      BoostParams p = spec.boost;
      p.seed = seed;
      return Classifier(fit_rusboost(x, y, p));
    }
  }
  fail(ErrorCode::InvalidInput, "fit_classifier: unknown kind");
}

namespace {

void render_tree(std::string& out, const TreeModel& t, const double* alpha) {
  out += "tree " + std::to_string(t.nodes().size());
  if (alpha) out += " " + format_double(*alpha);
  out += "\n";
  for (const auto& n : t.nodes())
    out += std::to_string(n.feature) + " " + format_double(n.threshold) + " " + std::to_string(n.left) + " " +
           std::to_string(n.right) + " " + format_double(n.proba) + "\n";
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace

std::string render_model(const Classifier& classifier) {
  std::string out = "snnfra-model v1\n";
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, TreeModel>) {
          out += "kind dt\ndim " + std::to_string(m.dim()) + "\ntrees 1\n";
          render_tree(out, m, nullptr);
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          out += "kind rf\ndim " + std::to_string(m.trees().front().dim()) + "\ntrees " +
                 std::to_string(m.trees().size()) + "\n";
          for (const auto& t : m.trees()) render_tree(out, t, nullptr);
        } else {
          out += "kind rusboost\ndim " + std::to_string(m.trees().front().dim()) + "\ntrees " +
                 std::to_string(m.trees().size()) + "\n";
          for (std::size_t i = 0; i < m.trees().size(); ++i) render_tree(out, m.trees()[i], &m.alphas()[i]);
        }
      },
      classifier.model());
  return out;
}

Classifier parse_model(const std::vector<std::string>& lines) {
  auto bad = [](const std::string& why) { fail(ErrorCode::FormatError, "model file: " + why); };
  if (lines.size() < 4 || lines[0] != "snnfra-model v1") bad("missing version line");
  const auto kind = words(lines[1]);
  const auto dimw = words(lines[2]);
  const auto count = words(lines[3]);
  if (kind.size() != 2 || kind[0] != "kind" || dimw.size() != 2 || count.size() != 2) bad("malformed preamble");
  const std::size_t dim = std::stoul(dimw[1]);
  const std::size_t n_trees = std::stoul(count[1]);
  const bool boosted = kind[1] == "rusboost";
  std::size_t line = 4;
  std::vector<TreeModel> trees;
  std::vector<double> alphas;
  for (std::size_t t = 0; t < n_trees; ++t) {
    if (line >= lines.size()) bad("truncated");
    const auto head = words(lines[line++]);
    if (head.size() != (boosted ? 3u : 2u) || head[0] != "tree") bad("malformed tree header");
    const std::size_t n_nodes = std::stoul(head[1]);
    if (boosted) alphas.push_back(parse_double(head[2], line, 2));
    std::vector<TreeNode> nodes;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      if (line >= lines.size()) bad("truncated node list");
      const auto w = words(lines[line++]);
      if (w.size() != 5) bad("malformed node line");
      nodes.push_back(TreeNode{std::stoi(w[0]), parse_double(w[1], line, 1), std::stoi(w[2]), std::stoi(w[3]),
                               parse_double(w[4], line, 4)});
    }
    trees.emplace_back(dim, std::move(nodes), std::vector<double>(dim, 0.0));
  }
  if (kind[1] == "dt") {
    if (trees.size() != 1) bad("decision tree must hold one tree");
    return Classifier(std::move(trees.front()));
  }
  if (kind[1] == "rf") return Classifier(ForestModel(std::move(trees)));
  if (boosted) return Classifier(BoostModel(std::move(trees), std::move(alphas)));
  bad("unknown kind '" + kind[1] + "'");
  return {};
}

}  // namespace snnfra
