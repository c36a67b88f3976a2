#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "snnfra/error.hpp"
#include "snnfra/neighbors.hpp"
#include "snnfra/reference.hpp"

using namespace snnfra;

namespace {

DenseMatrix line_points(std::vector<double> xs) {
  const std::size_t n = xs.size();
  return DenseMatrix(n, 1, std::move(xs));
}

bool throws_invalid(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == ErrorCode::InvalidInput;
  }
  return false;
}

}  // namespace

TEST_CASE("pairwise distances") {
  const DenseMatrix p(2, 2, std::vector<double>{0, 0, 3, 4});
  const auto d = pairwise_distances(p);
  CHECK(d(0, 1) == 5.0);
  CHECK(d(1, 0) == 5.0);
  CHECK(d(0, 0) == 0.0);

  const DenseMatrix same(2, 3, std::vector<double>{0.3, 0.1, 0.9, 0.3, 0.1, 0.9});
  CHECK(pairwise_distances(same)(0, 1) == 0.0);

  std::mt19937_64 gen(1);
  const auto rows = fixture::random_rows(10, 4, gen);
  const auto m = pairwise_distances(fixture::to_matrix(rows));
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      CHECK(std::abs(m(i, j) - oracle::dist(rows[i], rows[j])) <= 1e-12);
      CHECK(m(i, j) == m(j, i));
    }
  CHECK(m == reference::pairwise_distances(fixture::to_matrix(rows)));
  CHECK(throws_invalid([] { pairwise_distances(DenseMatrix(0, 3)); }));
}

TEST_CASE("knn tables break ties by index") {
  const auto pts = line_points({0, 1, 2, 10});
  const auto t = knn_table(pairwise_distances(pts), 1);
  std::vector<std::size_t> first;
  for (std::size_t i = 0; i < 4; ++i) first.push_back(t.neighbors(i)[0]);
  CHECK(first == std::vector<std::size_t>{1, 0, 1, 2});

  const auto full = knn_table(pairwise_distances(pts), 3);
  for (std::size_t i = 0; i < 4; ++i) {
    std::set<std::size_t> row(full.neighbors(i).begin(), full.neighbors(i).end());
    CHECK(row.size() == 3);
    CHECK(!row.contains(i));
  }

  const auto dup = knn_table(pairwise_distances(line_points({5, 0, 5})), 1);
  CHECK(dup.neighbors(0)[0] == 2);
  CHECK(dup.neighbors(2)[0] == 0);
  CHECK(dup.neighbor_distances(0)[0] == 0.0);

  CHECK(throws_invalid([&] { knn_table(pairwise_distances(pts), 4); }));
}

TEST_CASE("knn tables match brute force, the blocked variant and the serial reference") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = fixture::random_rows(20 + trial, 3, gen);
    const auto pts = fixture::to_matrix(rows);
    const std::size_t k = 1 + trial % 6;
    const auto truth = oracle::knn(rows, k);
    const auto t = knn_table(pairwise_distances(pts), k);
    const auto blocked = knn_table_blocked(pts, k, 7);
    const auto serial = reference::knn_table(pts, k);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::vector<std::size_t> row(t.neighbors(i).begin(), t.neighbors(i).end());
      CHECK(row == truth[i]);
      CHECK(std::vector<std::size_t>(blocked.neighbors(i).begin(), blocked.neighbors(i).end()) == row);
      CHECK(std::vector<std::size_t>(serial.neighbors(i).begin(), serial.neighbors(i).end()) == row);
      const auto dist = t.neighbor_distances(i);
      CHECK(std::is_sorted(dist.begin(), dist.end()));
    }
  }
}

TEST_CASE("knn is invariant under translation") {
  std::mt19937_64 gen(3);
  auto rows = fixture::random_rows(25, 4, gen);
  const auto before = knn_table(pairwise_distances(fixture::to_matrix(rows)), 5);
  for (auto& r : rows)
    for (auto& v : r) v += 0.375;
  const auto after = knn_table(pairwise_distances(fixture::to_matrix(rows)), 5);
  CHECK(before.indices == after.indices);
}

TEST_CASE("snn overlap") {
  const DenseMatrix four(4, 2, std::vector<double>{0, 0, 0, 1, 1, 0, 5, 5});
  const auto t = knn_table(pairwise_distances(four), 2);
  CHECK(snn_overlap(t, 0, 1) == 1);

  const auto far = line_points({0, 0.1, 0.2, 100, 100.1, 100.2});
  const auto ft = knn_table(pairwise_distances(far), 2);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 3; b < 6; ++b) CHECK(snn_overlap(ft, a, b) == 0);

  // Rows 0 and 1 coincide, so their lists hold the same two other points.
  const auto twins = line_points({0, 0, 1, 1.1, 50});
  const auto tt = knn_table(pairwise_distances(twins), 3);
  CHECK(snn_overlap(tt, 2, 3) == 2);

  CHECK(throws_invalid([&] { snn_overlap(t, 2, 2); }));

  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rows = fixture::random_rows(20, 2, gen);
    const auto table = knn_table(pairwise_distances(fixture::to_matrix(rows)), 4);
    const auto truth = oracle::knn(rows, 4);
    for (std::size_t x = 0; x < 20; ++x)
      for (std::size_t y = 0; y < 20; ++y) {
        if (x == y) continue;
        CHECK(snn_overlap(table, x, y) == snn_overlap(table, y, x));
        CHECK(snn_overlap(table, x, y) == oracle::overlap(truth[x], truth[y]));
      }
  }
}

TEST_CASE("shared neighbor sets") {
  const auto two = knn_table(pairwise_distances(line_points({0, 1})), 1);
  CHECK(shared_nn_set(two, 0).empty());
  CHECK(shared_nn_set(two, 1).empty());

  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rows = fixture::random_rows(20, 2 + trial % 3, gen);
    const std::size_t k = 2 + trial % 5;
    const auto table = knn_table(pairwise_distances(fixture::to_matrix(rows)), k);
    const SharedNeighborIndex index(table);
    const auto truth = oracle::knn(rows, k);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto expected = oracle::shared_set(truth, i);
      const auto got = shared_nn_set(table, i);
      CHECK(std::set<std::size_t>(got.begin(), got.end()) == expected);
      CHECK(index.shared_set(i) == got);
      for (auto p : got) CHECK(std::find(truth[i].begin(), truth[i].end(), p) != truth[i].end());
    }
  }
}
