#include "snnfra/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "snnfra/error.hpp"
#include "snnfra/io.hpp"

namespace snnfra {

namespace {

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCode::ConfigError, msg); }

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    config_error(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    config_error(key + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v, 0, 0);
  } catch (const Error&) {
    config_error(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error(key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  for (auto& cell : split_csv_line(v)) out.push_back(trim(cell));
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define COUNT_FIELD(name, member)                                                   \
  Field {                                                                           \
    name, [](RunConfig& c, const std::string& v) { c.member = to_count(name, v); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }                 \
  }
#define REAL_FIELD(name, member)                                                   \
  Field {                                                                          \
    name, [](RunConfig& c, const std::string& v) { c.member = to_real(name, v); }, \
        [](const RunConfig& c) { return format_double(c.member); }                 \
  }
#define COUNT_LIST_FIELD(name, member)                                                            \
  Field {                                                                                         \
    name,                                                                                         \
        [](RunConfig& c, const std::string& v) {                                                  \
          c.member.clear();                                                                       \
          for (auto& s : split_list(v)) c.member.push_back(to_count(name, s));                    \
        },                                                                                        \
        [](const RunConfig& c) { return join(c.member, [](std::size_t x) { return std::to_string(x); }); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"general.seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("general.seed", v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"general.run_name", [](RunConfig& c, const std::string& v) { c.run_name = v; },
       [](const RunConfig& c) { return c.run_name; }},
      {"input.drugs", [](RunConfig& c, const std::string& v) { c.drugs = v; },
       [](const RunConfig& c) { return c.drugs.generic_string(); }},
      {"input.targets", [](RunConfig& c, const std::string& v) { c.targets = v; },
       [](const RunConfig& c) { return c.targets.generic_string(); }},
      {"input.interactions", [](RunConfig& c, const std::string& v) { c.interactions = v; },
       [](const RunConfig& c) { return c.interactions.generic_string(); }},
      COUNT_FIELD("neighbors.k", k_neighbors),
      COUNT_FIELD("neighbors.block_size", block_size),
      COUNT_FIELD("neighbors.pca_components", entity_pca_components),
      COUNT_FIELD("clustering.k_min", kmedoids_k_min),
      COUNT_FIELD("clustering.k_max", kmedoids_k_max),
      COUNT_FIELD("pca.components", pca_components),
      COUNT_FIELD("pca.batch_size", pca_batch_size),
      REAL_FIELD("pca.variance", pca_variance),
      COUNT_FIELD("pca.max_components", pca_max_components),
      {"fuzzy.kernel", [](RunConfig& c, const std::string& v) { c.similarity_kernel = parse_kernel(v); },
       [](const RunConfig& c) { return to_string(c.similarity_kernel); }},
      {"fuzzy.tnorm",
       [](RunConfig& c, const std::string& v) {
         if (v == "lukasiewicz")
           c.tnorm = TNormKind::lukasiewicz;
         else if (v == "min")
           c.tnorm = TNormKind::minimum;
         else
           config_error("fuzzy.tnorm: expected lukasiewicz|min, got '" + v + "'");
       },
       [](const RunConfig& c) { return to_string(c.tnorm); }},
      COUNT_FIELD("fuzzy.m_groups", m_groups),
      COUNT_FIELD("fuzzy.n_groups", n_groups),
      COUNT_FIELD("fuzzy.max_group_rows", max_group_rows),
      REAL_FIELD("sampling.tp", t_p),
      REAL_FIELD("sampling.tq", t_q),
      REAL_FIELD("sampling.adasyn_beta", adasyn_beta),
      COUNT_FIELD("sampling.adasyn_k", adasyn_k),
      COUNT_FIELD("features.select_top_k", select_top_k),
      COUNT_FIELD("features.importance_groups", importance_groups),
      {"classifier.type", [](RunConfig& c, const std::string& v) { c.classifier = parse_classifier(v); },
       [](const RunConfig& c) { return to_string(c.classifier); }},
      COUNT_FIELD("classifier.max_depth", max_depth),
      COUNT_FIELD("classifier.min_samples_leaf", min_samples_leaf),
      COUNT_FIELD("classifier.min_samples_split", min_samples_split),
      COUNT_FIELD("classifier.n_estimators", n_estimators),
      REAL_FIELD("classifier.learning_rate", learning_rate),
      {"classifier.max_features",
       [](RunConfig& c, const std::string& v) {
         if (v != "sqrt" && v != "all") config_error("classifier.max_features: expected sqrt|all, got '" + v + "'");
         c.max_features = v;
       },
       [](const RunConfig& c) { return c.max_features; }},
      {"classifier.bootstrap", [](RunConfig& c, const std::string& v) { c.bootstrap = to_bool("classifier.bootstrap", v); },
       [](const RunConfig& c) { return std::string(c.bootstrap ? "true" : "false"); }},
      COUNT_LIST_FIELD("grid.max_depth", grid_max_depth),
      COUNT_LIST_FIELD("grid.min_samples_leaf", grid_min_samples_leaf),
      COUNT_LIST_FIELD("grid.min_samples_split", grid_min_samples_split),
      COUNT_LIST_FIELD("grid.n_estimators", grid_n_estimators),
      {"grid.learning_rate",
       [](RunConfig& c, const std::string& v) {
         c.grid_learning_rate.clear();
         for (auto& s : split_list(v)) c.grid_learning_rate.push_back(to_real("grid.learning_rate", s));
       },
       [](const RunConfig& c) { return join(c.grid_learning_rate, [](double x) { return format_double(x); }); }},
      {"grid.metric",
       [](RunConfig& c, const std::string& v) {
         if (v != "auc" && v != "f1" && v != "gmean") config_error("grid.metric: expected auc|f1|gmean, got '" + v + "'");
         c.grid_metric = v;
       },
       [](const RunConfig& c) { return c.grid_metric; }},
      COUNT_FIELD("evaluate.cv_folds", cv_folds),
      REAL_FIELD("evaluate.holdout_ratio", holdout_ratio),
      {"evaluate.sweep_thresholds",
       [](RunConfig& c, const std::string& v) {
         c.sweep_thresholds.clear();
         for (auto& s : split_list(v)) c.sweep_thresholds.push_back(to_real("evaluate.sweep_thresholds", s));
       },
       [](const RunConfig& c) { return join(c.sweep_thresholds, [](double x) { return format_double(x); }); }},
      {"evaluate.sweep_param",
       [](RunConfig& c, const std::string& v) {
         if (v == "tq")
           c.sweep_param = SweepParam::tq;
         else if (v == "tp")
           c.sweep_param = SweepParam::tp;
         else
           config_error("evaluate.sweep_param: expected tq|tp, got '" + v + "'");
       },
       [](const RunConfig& c) { return std::string(c.sweep_param == SweepParam::tq ? "tq" : "tp"); }},
  };
  return table;
}

#undef COUNT_FIELD
#undef REAL_FIELD
#undef COUNT_LIST_FIELD

}  // namespace

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::linear: return "linear";
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::triangular: return "triangular";
  }
  return "?";
}

std::string to_string(TNormKind k) { return k == TNormKind::lukasiewicz ? "lukasiewicz" : "min"; }

std::string to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::decision_tree: return "dt";
    case ClassifierKind::random_forest: return "rf";
    case ClassifierKind::rusboost: return "rusboost";
  }
  return "?";
}

KernelKind parse_kernel(const std::string& s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "gaussian") return KernelKind::gaussian;
  if (s == "triangular") return KernelKind::triangular;
  config_error("unknown similarity kernel '" + s + "' (expected linear|gaussian|triangular)");
}

ClassifierKind parse_classifier(const std::string& s) {
  if (s == "dt") return ClassifierKind::decision_tree;
  if (s == "rf") return ClassifierKind::random_forest;
  if (s == "rusboost") return ClassifierKind::rusboost;
  config_error("unknown classifier '" + s + "' (expected dt|rf|rusboost)");
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  for (const auto& f : fields()) {
    if (dotted_key == f.key) {
      f.set(*this, trim(value));
      return;
    }
  }
  config_error("unknown key '" + dotted_key + "'");
}

void RunConfig::validate() const {
  if (!(t_q >= 0.0 && t_q <= t_p && t_p <= 1.0))
    config_error("thresholds must satisfy 0 <= tq <= tp <= 1 (tq=" + format_double(t_q) + ", tp=" + format_double(t_p) + ")");
  if (!(holdout_ratio > 0.0 && holdout_ratio < 1.0)) config_error("evaluate.holdout_ratio must lie in (0,1)");
  if (k_neighbors == 0 || block_size == 0 || pca_batch_size == 0 || max_group_rows == 0 || adasyn_k == 0 ||
      max_depth == 0 || min_samples_leaf == 0 || importance_groups == 0)
    config_error("counts must be positive");
  if (min_samples_split < 2) config_error("classifier.min_samples_split must be at least 2");
  if (cv_folds < 2) config_error("evaluate.cv_folds must be at least 2");
  if (kmedoids_k_min < 1 || kmedoids_k_min > kmedoids_k_max) config_error("clustering.k_min must lie in [1, k_max]");
  if (!(adasyn_beta >= 0.0)) config_error("sampling.adasyn_beta must be non-negative");
  if (!(learning_rate > 0.0)) config_error("classifier.learning_rate must be positive");
  if (!(pca_variance > 0.0 && pca_variance <= 1.0)) config_error("pca.variance must lie in (0,1]");
  for (double t : sweep_thresholds)
    if (!(t >= 0.0 && t <= 1.0)) config_error("sweep thresholds must lie in [0,1]");
}

std::string RunConfig::canonical() const {
  std::string out;
  // Locations are not inputs to any computation; file contents are digested separately.
  for (const auto& f : fields()) {
    const std::string_view key = f.key;
    if (key.starts_with("input.") || key == "general.run_name") continue;
    out += std::string(key) + "=" + f.get(*this) + "\n";
  }
  return out;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto comment = line.find_first_of(";#");
    std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') config_error("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) config_error("line " + std::to_string(lineno) + ": key outside of a section");
    cfg.set(section + "." + trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  for (auto* p : {&cfg.drugs, &cfg.targets, &cfg.interactions})
    if (!p->empty() && p->is_relative() && !base_dir.empty()) *p = base_dir / *p;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    for (const auto& l : read_lines(path)) text += l + "\n";
  } catch (const Error& e) {
    config_error("cannot read config " + path.string());
  }
  return parse_config(text, path.parent_path());
}

}  // namespace snnfra
