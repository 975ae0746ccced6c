#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "openuas/analysis.hpp"
#include "openuas/error.hpp"

using namespace openuas;
using testutil::stay;

namespace {

EmbeddingTable blobs(std::mt19937_64& rng, int per_blob, std::vector<int>& planted) {
  const Vec8 centers[3] = {{10, 0, 0, 0, 0, 0, 0, 0}, {0, 10, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, -10}};
  std::uniform_real_distribution<double> u(-0.5, 0.5);  // radius < 1, separation ~14
  EmbeddingTable t;
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < per_blob; ++i) {
      Vec8 v = centers[b];
      for (double& x : v) x += u(rng) / std::sqrt(8.0);
      char id[16];
      std::snprintf(id, sizeof id, "b%d_%03d", b, i);
      t.emplace(id, v);
    }
  }
  for (const auto& [id, v] : t) planted.push_back(id[1] - '0');
  return t;
}

}  // namespace

TEST_CASE("adjusted Rand index reference values") {
  const std::vector<int> a{0, 0, 1, 1}, b{0, 0, 1, 2}, c{0, 1, 0, 1}, d{1, 1, 0, 0};
  CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index(a, d) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index(a, b) == doctest::Approx(0.5714285714285715));
  CHECK(adjusted_rand_index(a, c) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(adjusted_rand_index(a, std::vector<int>{0, 1}), ConfigError);
}

TEST_CASE("k = 1 puts everything in one cluster at the mean") {
  std::mt19937_64 rng(1);
  std::vector<int> planted;
  const EmbeddingTable t = blobs(rng, 10, planted);
  const ClusterAssignment a = kmeanspp_cluster(t, 1, 3);
  Vec8 mean{};
  for (const auto& [id, v] : t)
    for (std::size_t h = 0; h < 8; ++h) mean[h] += v[h] / static_cast<double>(t.size());
  for (const auto& [id, label] : a.labels) CHECK(label == 0);
  for (std::size_t h = 0; h < 8; ++h) CHECK(a.centroids[0][h] == doctest::Approx(mean[h]).epsilon(1e-12));
}

TEST_CASE("well separated blobs are recovered exactly") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    std::mt19937_64 rng(seed);
    std::vector<int> planted;
    const EmbeddingTable t = blobs(rng, 30, planted);
    const ClusterAssignment a = kmeanspp_cluster(t, 3, seed);
    std::vector<int> found;
    for (const auto& [id, label] : a.labels) found.push_back(label);
    CHECK(adjusted_rand_index(found, planted) == doctest::Approx(1.0));
    CHECK(a.labels.size() == t.size());
    for (std::size_t i = 1; i < a.objective_trace.size(); ++i)
      CHECK(a.objective_trace[i] <= a.objective_trace[i - 1] * (1 + 1e-12));
  }
}

TEST_CASE("objective is non-increasing on unstructured data, and labels are canonical") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Vec8> pts(500);
  for (auto& p : pts)
    for (double& x : p) x = n(rng);
  const KMeansResult r = kmeanspp(pts, 20, 4);
  REQUIRE(!r.objective_trace.empty());
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
    CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] * (1 + 1e-12));
  std::vector<int> sizes(20, 0);
  for (int l : r.labels) {
    REQUIRE(l >= 0);
    REQUIRE(l < 20);
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) CHECK(sizes[i] <= sizes[i - 1]);
  CHECK(kmeanspp(pts, 20, 4).labels == r.labels);

  KMeansOptions more;
  more.restarts = 5;
  CHECK(kmeanspp(pts, 20, 4, more).objective() <= r.objective() + 1e-9);
  CHECK_THROWS_AS(kmeanspp(pts, 501, 1), ConfigError);
  CHECK_THROWS_AS(kmeanspp(pts, 0, 1), ConfigError);
}

TEST_CASE("duplicated points share labels") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  EmbeddingTable t;
  for (int i = 0; i < 40; ++i) {
    Vec8 v;
    for (double& x : v) x = n(rng);
    t.emplace("p" + std::to_string(i), v);
    t.emplace("q" + std::to_string(i), v);
  }
  const ClusterAssignment a = kmeanspp_cluster(t, 5, 2);
  for (int i = 0; i < 40; ++i) CHECK(a.labels.at("p" + std::to_string(i)) == a.labels.at("q" + std::to_string(i)));
}

TEST_CASE("cluster profile: one-record trace, identical areas and conservation") {
  // 11 users each with one Tuesday 08:13 45-minute stay in one 50m cell.
  std::vector<StayRecord> stays;
  for (int u = 0; u < 11; ++u) stays.push_back(stay("u" + std::to_string(u), 35.0001, 139.0001, 1, 8 * 60 + 13, 45));
  const AreaTable t = aggregate(stays, {});
  REQUIRE(t.size() == 1);
  ClusterAssignment a;
  a.k = 1;
  a.labels[t.rows().begin()->first.to_string()] = 0;
  const ClusterProfile p = cluster_profile(a, t);
  int nonzero = 0;
  for (double v : p.mean_visits[0]) nonzero += v != 0.0;
  CHECK(nonzero == 1);
  CHECK(p.at(0, DayType::Weekday, 16, 1) == 11.0);

  // A second identical area in the same cluster leaves the mean unchanged.
  auto shifted = stays;
  for (auto& s : shifted) s.latitude += 0.01;
  stays.insert(stays.end(), shifted.begin(), shifted.end());
  const AreaTable t2 = aggregate(stays, {});
  REQUIRE(t2.size() == 2);
  ClusterAssignment a2;
  a2.k = 1;
  for (const auto& [g, row] : t2.rows()) a2.labels[g.to_string()] = 0;
  CHECK(cluster_profile(a2, t2).mean_visits == p.mean_visits);

  a2.labels["533900001111"] = 0;
  CHECK_THROWS_AS(cluster_profile(a2, t2), NotFoundError);
}

TEST_CASE("profile mass is conserved over clusters") {
  std::mt19937_64 rng(13);
  std::vector<StayRecord> stays;
  for (int cell = 0; cell < 12; ++cell) {
    for (int u = 0; u < 11 + cell; ++u) {
      stays.push_back(stay("u" + std::to_string(u), 35.0 + cell * 0.01, 139.0, static_cast<int>(rng() % 14),
                           static_cast<int>(rng() % 1440), static_cast<std::int64_t>(rng() % 900)));
    }
  }
  const AreaTable t = aggregate(stays, {});
  ClusterAssignment a;
  a.k = 3;
  std::uint64_t total = 0;
  int i = 0;
  for (const auto& [g, row] : t.rows()) {
    a.labels[g.to_string()] = i++ % 3;
    total += row.total();
  }
  const ClusterProfile p = cluster_profile(a, t);
  double mass = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    for (double v : p.mean_visits[c]) mass += v * static_cast<double>(p.area_count[c]);
  CHECK(mass == doctest::Approx(static_cast<double>(total)).epsilon(1e-12));
  CHECK(total == stays.size());
}

TEST_CASE("similar area search") {
  const EmbeddingTable t{{"a", Vec8{1, 0, 0, 0, 0, 0, 0, 0}},
                         {"b", Vec8{2, 0, 0, 0, 0, 0, 0, 0}},
                         {"c", Vec8{0, 1, 0, 0, 0, 0, 0, 0}},
                         {"d", Vec8{1, 1, 0, 0, 0, 0, 0, 0}},
                         {"e", Vec8{-1, 0, 0, 0, 0, 0, 0, 0}}};
  const auto r = similar_areas(t, "a", 0.5);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == Similarity{"b", 1.0});
  CHECK(r[1].area_id == "d");
  CHECK(r[1].similarity == doctest::Approx(std::sqrt(0.5)));
  CHECK(similar_areas(t, "a", -1.0).size() == 4);
  CHECK_THROWS_AS(similar_areas(t, "a", 1.0 + 1e-9), ConfigError);
  CHECK_THROWS_AS(similar_areas(t, "zz", 0.0), NotFoundError);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  EmbeddingTable rnd;
  for (int i = 0; i < 60; ++i) {
    Vec8 v;
    for (double& x : v) x = n(rng);
    rnd.emplace("r" + std::to_string(i), v);
  }
  for (const auto& [id, v] : rnd) {
    for (const Similarity& s : similar_areas(rnd, id, 0.3)) {
      const auto back = similar_areas(rnd, s.area_id, 0.3);
      CHECK(std::any_of(back.begin(), back.end(), [&](const Similarity& x) { return x.area_id == id; }));
    }
  }
}

TEST_CASE("embedding resolution falls back to the 250m parent") {
  const Vec8 own{1, 2, 3, 4, 5, 6, 7, 8}, parent{8, 7, 6, 5, 4, 3, 2, 1};
  const EmbeddingTable t{{"533946111123", own}, {"5339461111", parent}};
  CHECK(resolve_embedding(t, Geocode::parse("533946111123")) == own);
  CHECK(resolve_embedding(t, Geocode::parse("533946111100")) == parent);
  CHECK(resolve_embedding(t, Geocode::parse("5339461111")) == parent);
  CHECK_THROWS_AS(resolve_embedding(t, Geocode::parse("533946111200")), NotFoundError);
}
