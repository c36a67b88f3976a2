#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "snnfra/clustering.hpp"
#include "snnfra/error.hpp"

using namespace snnfra;

namespace {

oracle::Rows blobs(std::size_t count, std::size_t per_blob, double sd, std::mt19937_64& gen) {
  std::normal_distribution<double> noise(0.0, sd);
  std::uniform_real_distribution<double> center(0.0, 10.0);
  oracle::Rows pts;
  for (std::size_t b = 0; b < count; ++b) {
    const double cx = center(gen), cy = center(gen);
    for (std::size_t i = 0; i < per_blob; ++i) pts.push_back({cx + noise(gen), cy + noise(gen)});
  }
  return pts;
}

}  // namespace

TEST_CASE("kmedoids degenerate sizes") {
  std::mt19937_64 gen(1);
  const auto rows = fixture::random_rows(6, 2, gen);
  const auto all = kmedoids(fixture::to_matrix(rows), 6);
  CHECK(all.cost == 0.0);
  CHECK(all.medoids == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = fixture::random_rows(9, 3, gen);
    std::size_t best = 0;
    double best_cost = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double c = oracle::medoid_cost(pts, {i});
      if (c < best_cost) best_cost = c, best = i;
    }
    const auto one = kmedoids(fixture::to_matrix(pts), 1);
    CHECK(one.medoids == std::vector<std::size_t>{best});
  }

  try {
    kmedoids(fixture::to_matrix(rows), 7);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
  }
}

TEST_CASE("kmedoids separates two pairs and matches exhaustive search") {
  const oracle::Rows pairs{{0, 0}, {0.1, 0}, {9, 9}, {9.1, 9}};
  const auto c = kmedoids(fixture::to_matrix(pairs), 2);
  REQUIRE(c.medoids.size() == 2);
  CHECK(c.medoids[0] < 2);
  CHECK(c.medoids[1] >= 2);

  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = fixture::random_rows(4 + trial % 5, 2, gen);
    const std::size_t k = 1 + trial % 3;
    const auto got = kmedoids(fixture::to_matrix(pts), k, trial);
    CHECK(got.cost <= oracle::exhaustive_medoid_cost(pts, k) * 1.05 + 1e-12);
  }
}

TEST_CASE("clustering invariants") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = fixture::random_rows(15, 3, gen);
    const auto c = kmedoids(fixture::to_matrix(pts), 2 + trial % 4);
    double cost = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double nearest = 1e300;
      for (auto m : c.medoids) nearest = std::min(nearest, oracle::dist(pts[i], pts[m]));
      CHECK(oracle::dist(pts[i], pts[c.medoids[c.assignment[i]]]) == doctest::Approx(nearest).epsilon(1e-12));
      cost += nearest;
    }
    for (std::size_t m = 0; m < c.medoids.size(); ++m) CHECK(c.assignment[c.medoids[m]] == m);
    CHECK(std::abs(cost - c.cost) <= 1e-9);
    for (std::size_t s = 1; s < c.cost_history.size(); ++s) CHECK(c.cost_history[s] <= c.cost_history[s - 1]);
  }
}

TEST_CASE("calinski-harabasz") {
  const oracle::Rows hand{{0}, {1}, {9}, {10}};
  Clustering c;
  c.medoids = {0, 2};
  c.assignment = {0, 0, 1, 1};
  // Centers 0.5 and 9.5 about the mean 5: B = 2*4.5^2*2 = 81, W = 4*0.25 = 1.
  CHECK(calinski_harabasz(fixture::to_matrix(hand), c) == doctest::Approx((81.0 / 1.0) / (1.0 / 2.0)).epsilon(1e-12));

  const oracle::Rows tight{{0, 0}, {0, 0}, {5, 5}, {5, 5}};
  CHECK(calinski_harabasz(fixture::to_matrix(tight), c) == kChMax);

  const oracle::Rows same{{1, 1}, {1, 1}, {1, 1}, {1, 1}};
  CHECK(calinski_harabasz(fixture::to_matrix(same), c) == 0.0);

  Clustering single;
  single.medoids = {0};
  single.assignment = {0, 0, 0, 0};
  CHECK_THROWS_AS(calinski_harabasz(fixture::to_matrix(hand), single), Error);

  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    auto pts = fixture::random_rows(12, 2, gen);
    const auto cl = kmedoids(fixture::to_matrix(pts), 3);
    const double score = calinski_harabasz(fixture::to_matrix(pts), cl);
    CHECK(score == doctest::Approx(oracle::calinski_harabasz(pts, cl.assignment, 3)).epsilon(1e-12));
    for (auto& p : pts)
      for (auto& v : p) v += 123.0;
    CHECK(std::abs(calinski_harabasz(fixture::to_matrix(pts), cl) - score) <= 1e-9 * std::max(1.0, score));
  }
}

TEST_CASE("model selection picks the planted number of blobs") {
  std::mt19937_64 gen(5);
  const auto pts = blobs(3, 8, 0.05, gen);
  const auto sel = optimal_kmedoids_centroids(fixture::to_matrix(pts), 2, 6);
  CHECK(sel.k == 3);
  std::set<std::size_t> blob_of;
  for (auto r : sel.rows) blob_of.insert(r / 8);
  CHECK(blob_of.size() == 3);

  double best = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 2; k <= 6; ++k) {
    const auto c = kmedoids(fixture::to_matrix(pts), k);
    const double s = oracle::calinski_harabasz(pts, c.assignment, k);
    if (s > best) best = s, best_k = k;
  }
  CHECK(best_k == sel.k);

  const oracle::Rows one{{0.5, 0.5}};
  CHECK(optimal_kmedoids_centroids(fixture::to_matrix(one), 2, 10).rows == std::vector<std::size_t>{0});
  const oracle::Rows two{{0.5, 0.5}, {0.1, 0.2}};
  CHECK(optimal_kmedoids_centroids(fixture::to_matrix(two), 2, 10).rows == std::vector<std::size_t>{0, 1});
}
