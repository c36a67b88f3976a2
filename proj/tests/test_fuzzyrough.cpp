#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "snnfra/error.hpp"
#include "snnfra/fuzzyrough.hpp"
#include "snnfra/reference.hpp"

using namespace snnfra;

namespace {

oracle::Kernel to_oracle(KernelKind k) {
  switch (k) {
    case KernelKind::linear: return oracle::Kernel::linear;
    case KernelKind::gaussian: return oracle::Kernel::gaussian;
    default: return oracle::Kernel::triangular;
  }
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;  // sentinel: nothing thrown
}

// Kernel whose per-feature scale makes similarity 1 - |x - y| on [0, 1].
SimilarityKernel unit_linear(std::size_t d) {
  FeatureStats st;
  st.min.assign(d, 0.0);
  st.max.assign(d, 1.0);
  st.variance.assign(d, 0.25);
  return SimilarityKernel(KernelKind::linear, st);
}

}  // namespace

TEST_CASE("lukasiewicz connectives") {
  for (double x : {0.0, 0.3, 0.77, 1.0}) {
    CHECK(lukasiewicz_t(1.0, x) == doctest::Approx(x).epsilon(1e-15));
    CHECK(lukasiewicz_i(0.0, x) == 1.0);
    CHECK(lukasiewicz_i(1.0, x) == doctest::Approx(x).epsilon(1e-15));
  }
  CHECK(lukasiewicz_t(0.7, 0.8) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lukasiewicz_t(0.3, 0.4) == 0.0);
  CHECK(lukasiewicz_i(0.8, 0.5) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(code_of([] { lukasiewicz_t(1.2, 0.1); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { lukasiewicz_i(-0.1, 0.1); }) == ErrorCode::InvalidInput);

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = u(gen), b = u(gen), c = u(gen);
    CHECK(lukasiewicz_t(a, b) == lukasiewicz_t(b, a));
    if (a <= c) CHECK(lukasiewicz_t(a, b) <= lukasiewicz_t(c, b));
  }
}

TEST_CASE("feature similarity kernels") {
  CHECK(feature_similarity(0.2, 0.6, unit_linear(1), 0) == doctest::Approx(0.6).epsilon(1e-15));

  FeatureStats st;
  st.min = {0.0};
  st.max = {1.0};
  st.variance = {0.04};
  const SimilarityKernel g(KernelKind::gaussian, st);
  CHECK(feature_similarity(0.3, 0.3, g, 0) == 1.0);
  st.variance = {0.0625};
  const SimilarityKernel tri(KernelKind::triangular, st);
  CHECK(feature_similarity(0.0, 0.25, tri, 0) == 0.0);
  CHECK(feature_similarity(0.1, 0.5, tri, 0) == 0.0);
  CHECK(feature_similarity(0.5, 0.625, tri, 0) == 0.5);

  std::mt19937_64 gen(2);
  const auto rows = fixture::random_rows(30, 5, gen);
  const auto stats = oracle::column_stats(rows);
  for (auto kind : {KernelKind::linear, KernelKind::gaussian, KernelKind::triangular}) {
    const auto k = SimilarityKernel::fit(kind, fixture::to_matrix(rows));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t f = 0; f < 5; ++f) {
        const double x = rows[i][f], y = rows[(i + 7) % rows.size()][f];
        const double s = feature_similarity(x, y, k, f);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(s == feature_similarity(y, x, k, f));
        CHECK(feature_similarity(x, x, k, f) == 1.0);
        CHECK(std::abs(s - oracle::similarity(to_oracle(kind), stats, f, x, y)) <= 1e-12);
      }
  }
}

TEST_CASE("indiscernibility folds feature similarities with the t-norm") {
  const DecisionTable table(DenseMatrix(1, 2, std::vector<double>{0, 0}), {1});
  const auto k = unit_linear(2);
  const Connectives luk;
  const std::vector<double> x{0.0, 0.0}, y{0.1, 0.2}, z{0.5, 0.6};
  CHECK(indiscernibility(x, x, table, k, luk) == 1.0);
  CHECK(indiscernibility(x, y, table, k, luk) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(indiscernibility(x, z, table, k, luk) == 0.0);
  const Connectives minimum{TNormKind::minimum};
  CHECK(indiscernibility(x, y, table, k, minimum) == doctest::Approx(0.8).epsilon(1e-12));

  const DecisionTable only_second(DenseMatrix(1, 2, std::vector<double>{0, 0}), {1}, {1});
  CHECK(indiscernibility(x, y, only_second, k, luk) == doctest::Approx(0.8).epsilon(1e-12));

  std::mt19937_64 gen(3);
  const auto rows = fixture::random_rows(20, 4, gen);
  const DecisionTable t(fixture::to_matrix(rows), std::vector<int>(20, 1));
  for (auto kind : {KernelKind::linear, KernelKind::gaussian, KernelKind::triangular}) {
    const auto kern = SimilarityKernel::fit(kind, t.rows);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 20; ++j) {
        CHECK(indiscernibility(rows[i], rows[j], t, kern, luk) == indiscernibility(rows[j], rows[i], t, kern, luk));
        if (i == j) CHECK(indiscernibility(rows[i], rows[j], t, kern, luk) == 1.0);
      }
  }
}

TEST_CASE("approximations on hand tables") {
  const auto k = unit_linear(1);
  const Connectives luk;
  const DecisionTable t(DenseMatrix(3, 1, std::vector<double>{0.0, 0.5, 1.0}), {1, 0, 1});
  const std::vector<double> member{0.0}, outsider{0.5}, far{0.2};

  CHECK(upper_approximation(member, t, 1, k, luk) == 1.0);
  CHECK(lower_approximation(outsider, t, 1, k, luk) == 0.0);
  const DecisionTable all_in(DenseMatrix(2, 1, std::vector<double>{0.0, 1.0}), {1, 1});
  CHECK(lower_approximation(far, all_in, 1, k, luk) == 1.0);

  const DecisionTable distant(DenseMatrix(1, 1, std::vector<double>{1.0}), {1});
  CHECK(upper_approximation(member, distant, 1, k, luk) == 0.0);

  CHECK(code_of([&] { upper_approximation(member, t, 7, k, luk); }) == ErrorCode::EmptyConcept);
  CHECK(code_of([&] { lower_approximation(member, DecisionTable(DenseMatrix(0, 1), {}), 1, k, luk); }) ==
        ErrorCode::InvalidInput);
}

TEST_CASE("approximations match the brute-force oracle on random tables") {
  std::mt19937_64 gen(4);
  const Connectives luk;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + trial * 3, d = 1 + trial % 8;
    const auto rows = fixture::random_rows(n, d, gen);
    std::vector<int> decision(n);
    for (std::size_t i = 0; i < n; ++i) decision[i] = static_cast<int>((i * 7 + trial) % 3 == 0);
    decision[0] = 1;
    decision[1] = 0;
    const DecisionTable table(fixture::to_matrix(rows), decision);
    const auto stats = oracle::column_stats(rows);
    const auto kind = static_cast<KernelKind>(trial % 3);
    const auto kern = SimilarityKernel::fit(kind, table.rows);
    for (std::size_t q = 0; q < 10; ++q) {
      const auto x = rows[(q * 5) % n];
      const double up = upper_approximation(x, table, 1, kern, luk);
      const double lo = lower_approximation(x, table, 1, kern, luk);
      CHECK(std::abs(up - oracle::upper(to_oracle(kind), stats, x, rows, decision, 1)) <= 1e-12);
      CHECK(std::abs(lo - oracle::lower(to_oracle(kind), stats, x, rows, decision, 1)) <= 1e-12);
      CHECK(lo <= up);

      double best = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (decision[j] == 1) best = std::max(best, indiscernibility(x, rows[j], table, kern, luk));
      CHECK(up == best);
    }
  }
}

TEST_CASE("averaged FRUA") {
  std::mt19937_64 gen(5);
  auto pos = fixture::random_pairs(40, 3, Label::positive, gen, "p");
  auto cand = fixture::random_pairs(60, 3, Label::negative, gen, "c");
  const auto kern = fit_scoring_kernel(KernelKind::linear, pos, cand);
  const Connectives luk;

  SUBCASE("one positive group is a single table") {
    const auto scores = averaged_frua(pos, cand, kern, luk, {1, 1, 3});
    DenseMatrix all = pos.feature_matrix();
    for (const auto& s : cand.samples()) all.append_row(s.features);
    std::vector<int> dec(pos.size(), 1);
    dec.resize(pos.size() + cand.size(), 0);
    const DecisionTable t(all, dec);
    for (std::size_t i = 0; i < cand.size(); ++i)
      CHECK(scores.degrees[i] == upper_approximation(cand[i].features, t, 1, kern, luk));
    CHECK(scores.m_used == 1);
  }

  SUBCASE("grouped scores equal the explicit per-table evaluation") {
    const FruaOptions opts{2, 3, 99};
    const auto fast = averaged_frua(pos, cand, kern, luk, opts);
    const auto slow = reference::averaged_frua(pos, cand, kern, luk, opts);
    REQUIRE(fast.size() == cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
      CHECK(fast.keys[i] == cand[i].key());
      CHECK(std::abs(fast.degrees[i] - slow.degrees[i]) <= 1e-12);
    }
  }

  SUBCASE("a candidate equal to a positive scores 1 under any candidate grouping") {
    PairDataset c2(3);
    c2.add({"x", "y", pos[7].features, Label::negative, {}});
    c2.add({"x", "z", cand[0].features, Label::negative, {}});
    c2.add({"x", "w", cand[1].features, Label::negative, {}});
    for (std::size_t n = 1; n <= 3; ++n)
      for (std::uint64_t seed = 0; seed < 5; ++seed)
        CHECK(averaged_frua(pos, c2, kern, luk, {1, n, seed}).degrees[0] == 1.0);
    // With several positive groups the degree is a mean, and only the group
    // holding the twin contributes a 1.
    const auto split = averaged_frua(pos, c2, kern, luk, {3, 1, 1});
    CHECK(split.degrees[0] < 1.0);
    CHECK(split.degrees[0] >= 1.0 / 3.0);
  }

  SUBCASE("scores do not depend on how candidates are grouped") {
    const auto a = averaged_frua(pos, cand, kern, luk, {2, 1, 8});
    const auto b = averaged_frua(pos, cand, kern, luk, {2, 5, 8});
    CHECK(a.degrees == b.degrees);
  }

  SUBCASE("group constraints") {
    CHECK(code_of([&] { averaged_frua(pos, cand, kern, luk, {41, 1, 0}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([&] { averaged_frua(pos, cand, kern, luk, {1, 61, 0}); }) == ErrorCode::InvalidInput);
  }
}
