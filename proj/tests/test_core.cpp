#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "snnfra/config.hpp"
#include "snnfra/core.hpp"
#include "snnfra/error.hpp"
#include "snnfra/io.hpp"

using namespace snnfra;

namespace {

FeatureMatrix column_matrix(std::vector<double> column) {
  std::vector<EntityId> ids;
  for (std::size_t i = 0; i < column.size(); ++i) ids.push_back("e" + std::to_string(i));
  return FeatureMatrix(ids, DenseMatrix(column.size(), 1, column), {"f1"});
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an snnfra::Error");
  return ErrorCode::InvalidInput;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("min-max normalization maps columns onto the unit interval") {
  auto n = min_max_normalize(column_matrix({2, 4, 6}));
  CHECK(n.values(0, 0) == 0.0);
  CHECK(n.values(1, 0) == 0.5);
  CHECK(n.values(2, 0) == 1.0);

  n = min_max_normalize(column_matrix({5, 5, 5}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(n.values(i, 0) == 0.0);

  n = min_max_normalize(column_matrix({0.1, 0.9}));
  CHECK(n.values(0, 0) == 0.0);
  CHECK(n.values(1, 0) == 1.0);

  CHECK(code_of([] { min_max_normalize(FeatureMatrix({}, DenseMatrix(0, 0), {})); }) == ErrorCode::InvalidInput);
}

TEST_CASE("normalization is idempotent and keeps stats consistent") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto rows = fixture::random_rows(30, 6, gen, -50.0, 80.0);
    std::vector<EntityId> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("x" + std::to_string(i));
    FeatureMatrix m(ids, fixture::to_matrix(rows), {"a", "b", "c", "d", "e", "f"});
    const auto once = min_max_normalize(m);
    const auto twice = min_max_normalize(once);
    for (std::size_t i = 0; i < once.values.data().size(); ++i) {
      CHECK(once.values.data()[i] >= 0.0);
      CHECK(once.values.data()[i] <= 1.0);
      CHECK(std::abs(once.values.data()[i] - twice.values.data()[i]) <= 1e-12);
    }
    const auto fresh = FeatureStats::compute(once.values);
    for (std::size_t f = 0; f < 6; ++f) {
      CHECK(std::abs(fresh.min[f] - once.stats.min[f]) <= 1e-12);
      CHECK(std::abs(fresh.max[f] - once.stats.max[f]) <= 1e-12);
      CHECK(std::abs(fresh.variance[f] - once.stats.variance[f]) <= 1e-12);
    }
  }
}

TEST_CASE("concat_pair keeps drug features first") {
  const std::vector<double> d{0.2}, t{0.7};
  const auto s = concat_pair(d, t, "D", "T", Label::positive);
  CHECK(s.features == std::vector<double>{0.2, 0.7});
  CHECK(s.key() == PairKey{"D", "T"});

  std::vector<double> wide_d(193, 0.1), wide_t(1290, 0.3);
  CHECK(concat_pair(wide_d, wide_t, "D", "T", Label::positive).features.size() == 1483);
  wide_d.assign(881, 0.4);
  wide_t.assign(876, 0.6);
  const auto pair = concat_pair(wide_d, wide_t, "D", "T", Label::negative);
  CHECK(pair.features.size() == 1757);
  CHECK(std::equal(wide_d.begin(), wide_d.end(), pair.features.begin()));

  CHECK(code_of([&] { concat_pair({}, t, "D", "T", Label::positive); }) == ErrorCode::InvalidInput);
}

TEST_CASE("group splitting is a balanced deterministic partition") {
  auto one = split_into_groups(10, 1, 99);
  for (auto g : one.group_of) CHECK(g == 0);

  const auto a = split_into_groups(10, 3, 5);
  const auto b = split_into_groups(10, 3, 5);
  CHECK(a.group_of == b.group_of);
  std::multiset<std::size_t> sizes;
  for (const auto& m : a.members()) sizes.insert(m.size());
  CHECK(sizes == std::multiset<std::size_t>{3, 3, 4});

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 5 + seed * 3, g = 1 + seed % 7;
    const auto split = split_into_groups(n, g, seed);
    std::set<std::size_t> seen;
    std::size_t lo = n, hi = 0;
    for (const auto& m : split.members()) {
      lo = std::min(lo, m.size());
      hi = std::max(hi, m.size());
      for (auto i : m) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == n);
    CHECK(hi - lo <= 1);
  }
  CHECK(code_of([] { split_into_groups(3, 4, 0); }) == ErrorCode::InvalidInput);
}

TEST_CASE("pair datasets reject duplicate keys and tally classes") {
  PairDataset ds(2);
  ds.add({"a", "x", {0.1, 0.2}, Label::positive, {}});
  ds.add({"a", "y", {0.3, 0.4}, Label::negative, {}});
  ds.add({"b", "x", {0.5, 0.6}, Label::negative, {}});
  CHECK(ds.class_counts() == ClassCounts{1, 2, 0});
  CHECK(code_of([&] { ds.add({"a", "x", {0.0, 0.0}, Label::negative, {}}); }) == ErrorCode::DuplicatePair);
  CHECK(code_of([&] { ds.add({"c", "x", {0.0}, Label::negative, {}}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("feature matrix loading") {
  fixture::TempDir dir("core");
  write_file(dir / "ok.csv", "id,f1,f2\nDB1,1,2\nDB2,3,4.5\n");
  const auto m = load_feature_matrix(dir / "ok.csv");
  CHECK(m.size() == 2);
  CHECK(m.dim() == 2);
  CHECK(m.ids == std::vector<EntityId>{"DB1", "DB2"});
  CHECK(m.values(1, 1) == 4.5);

  write_file(dir / "header_only.csv", "id,f1\n");
  CHECK(code_of([&] { load_feature_matrix(dir / "header_only.csv"); }) == ErrorCode::EmptyMatrix);
  write_file(dir / "bad_cell.csv", "id,f1,f2\nDB1,1,abc\n");
  try {
    load_feature_matrix(dir / "bad_cell.csv");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidValue);
    CHECK(e.message().find("abc") != std::string::npos);
  }
  write_file(dir / "no_header.csv", "DB1,1,2\n");
  CHECK(code_of([&] { load_feature_matrix(dir / "no_header.csv"); }) == ErrorCode::FormatError);
  write_file(dir / "dup.csv", "id,f1\nDB1,1\nDB1,2\n");
  CHECK(code_of([&] { load_feature_matrix(dir / "dup.csv"); }) == ErrorCode::DuplicateId);
  write_file(dir / "nan.csv", "id,f1\nDB1,nan\n");
  CHECK(code_of([&] { load_feature_matrix(dir / "nan.csv"); }) == ErrorCode::InvalidValue);
}

TEST_CASE("feature matrix write then load is exact and order preserving") {
  fixture::TempDir dir("core");
  std::mt19937_64 gen(3);
  const auto rows = fixture::random_rows(40, 5, gen, -1e3, 1e3);
  std::vector<EntityId> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("Z" + std::to_string(40 - i));
  FeatureMatrix m(ids, fixture::to_matrix(rows), {"a", "b", "c", "d", "e"});
  write_feature_matrix(dir / "m.csv", m);
  const auto back = load_feature_matrix(dir / "m.csv");
  CHECK(back.ids == m.ids);
  CHECK(back.values == m.values);
  CHECK(back.feature_names == m.feature_names);
}

TEST_CASE("interaction loading deduplicates and validates ids") {
  fixture::TempDir dir("core");
  write_file(dir / "d.csv", "id,f1\nD1,0\nD2,1\n");
  write_file(dir / "t.csv", "id,f1\nT1,0\nT2,1\n");
  const auto drugs = load_feature_matrix(dir / "d.csv");
  const auto targets = load_feature_matrix(dir / "t.csv");
  write_file(dir / "i.csv", "drug_id,target_id\nD1,T2\nD1,T2\nD2,T1\n");
  const auto set = load_interactions(dir / "i.csv", drugs, targets);
  CHECK(set.size() == 2);
  CHECK(set.duplicates_removed == 1);
  CHECK(set.pairs[0] == Interaction{0, 1});
  CHECK(set.pairs[1] == Interaction{1, 0});

  write_file(dir / "dup_only.csv", "drug_id,target_id\nD2,T2\nD2,T2\n");
  CHECK(load_interactions(dir / "dup_only.csv", drugs, targets).size() == 1);
  write_file(dir / "unknown.csv", "drug_id,target_id\nD9,T1\n");
  CHECK(code_of([&] { load_interactions(dir / "unknown.csv", drugs, targets); }) == ErrorCode::UnknownEntity);
}

TEST_CASE("score tables use six decimals") {
  fixture::TempDir dir("core");
  FruaScoreTable t;
  t.keys = {{"DB04094", "Q9Y296"}};
  t.degrees = {0.933385};
  write_score_table(dir / "s.csv", t);
  const auto lines = read_lines(dir / "s.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "drug_id,target_id,frua_score");
  CHECK(lines[1] == "DB04094,Q9Y296,0.933385");

  write_score_table(dir / "empty.csv", FruaScoreTable{});
  CHECK(read_lines(dir / "empty.csv").size() == 1);

  t.degrees = {1.5};
  CHECK(code_of([&] { write_score_table(dir / "bad.csv", t); }) == ErrorCode::InvalidValue);
}

TEST_CASE("score table round trip equals values rounded to six digits") {
  fixture::TempDir dir("core");
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FruaScoreTable t;
  for (int i = 0; i < 1000; ++i) {
    t.keys.push_back({"d" + std::to_string(i), "t" + std::to_string(i % 37)});
    t.degrees.push_back(u(gen));
  }
  write_score_table(dir / "s.csv", t);
  const auto back = load_score_table(dir / "s.csv");
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back.keys[i] == t.keys[i]);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t.degrees[i]);
    CHECK(back.degrees[i] == std::stod(buf));
  }
}

TEST_CASE("pair dataset CSV round trip") {
  fixture::TempDir dir("core");
  std::mt19937_64 gen(23);
  auto ds = fixture::random_pairs(25, 4, Label::positive, gen);
  for (std::size_t i = 0; i < ds.size(); i += 3) ds.set_score(i, 0.25);
  std::vector<std::uint8_t> synth(ds.size(), 0);
  synth[4] = 1;
  PairWriteOptions opts;
  opts.scores = true;
  opts.synthetic = &synth;
  write_pair_dataset(dir / "p.csv", ds, opts);
  const auto back = load_pair_dataset(dir / "p.csv");
  REQUIRE(back.data.size() == ds.size());
  CHECK(back.synthetic == synth);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.data[i].key() == ds[i].key());
    CHECK(back.data[i].features == ds[i].features);
    CHECK(back.data[i].label == ds[i].label);
    CHECK(back.data[i].frua_score.has_value() == ds[i].frua_score.has_value());
  }
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(
      "# comment\n[general]\nseed = 9\n[neighbors]\nk = 7\n[sampling]\ntp = 0.9\ntq = 0.1\n"
      "[grid]\nmax_depth = 3, 5\n[classifier]\ntype = rusboost\n");
  CHECK(cfg.seed == 9);
  CHECK(cfg.k_neighbors == 7);
  CHECK(cfg.t_p == 0.9);
  CHECK(cfg.t_q == 0.1);
  CHECK(cfg.grid_max_depth == std::vector<std::size_t>{3, 5});
  CHECK(cfg.classifier == ClassifierKind::rusboost);

  const RunConfig defaults;
  CHECK(defaults.k_neighbors == 11);
  CHECK(defaults.kmedoids_k_min == 2);
  CHECK(defaults.kmedoids_k_max == 10);
  CHECK(defaults.adasyn_beta == 1.0);
  CHECK(defaults.adasyn_k == 5);
  CHECK(defaults.cv_folds == 5);
  CHECK(defaults.holdout_ratio == 0.7);

  CHECK(code_of([] { parse_config("[general]\nsede = 1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("[nosuch]\nk = 1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("[sampling]\ntp = 0.1\ntq = 0.5\n").validate(); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("[evaluate]\nholdout_ratio = 1.0\n").validate(); }) == ErrorCode::ConfigError);
}

TEST_CASE("canonical config text ignores paths and run names") {
  auto a = parse_config("[input]\ndrugs = a.csv\n[general]\nrun_name = x\n");
  auto b = parse_config("[input]\ndrugs = b.csv\n");
  CHECK(a.canonical() == b.canonical());
  b.set("sampling.tp", "0.85");
  CHECK(a.canonical() != b.canonical());
}
