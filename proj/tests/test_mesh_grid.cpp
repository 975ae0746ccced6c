#include <cmath>
#include <map>
#include <random>
#include <set>

#include "common.hpp"
#include "doctest.h"
#include "openuas/error.hpp"
#include "openuas/mesh_grid.hpp"

using namespace openuas;
using testutil::stay;

namespace {

// Textbook grid-square code: 1st (40'x1deg), 2nd (5'x7.5'), 3rd (30"x45") levels,
// then the 250m quadrant pair and the 50m row/col, from plain arc-second arithmetic.
std::string oracle_code(double lat, double lon, bool fifty) {
  const double lat_min = lat * 60.0;
  const int p = static_cast<int>(std::floor(lat_min / 40.0));
  const double a = lat_min - p * 40.0;
  const int q = static_cast<int>(std::floor(a / 5.0));
  const double b = (a - q * 5.0) * 60.0;  // seconds
  const int r = static_cast<int>(std::floor(b / 30.0));
  const int u = static_cast<int>(std::floor(lon)) - 100;
  const double f = (lon - std::floor(lon)) * 60.0;  // minutes
  const int v = static_cast<int>(std::floor(f / 7.5));
  const double g = (f - v * 7.5) * 60.0;
  const int w = static_cast<int>(std::floor(g / 45.0));
  double ys = b - r * 30.0, xs = g - w * 45.0;
  const int hy = ys >= 15.0, hx = xs >= 22.5;
  ys -= hy * 15.0;
  xs -= hx * 22.5;
  const int qy = ys >= 7.5, qx = xs >= 11.25;
  ys -= qy * 7.5;
  xs -= qx * 11.25;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d%02d%d%d%d%d%d%d", p, u, q, v, r, w, 1 + 2 * hy + hx, 1 + 2 * qy + qx);
  std::string s = buf;
  if (fifty) {
    s += static_cast<char>('0' + static_cast<int>(std::floor(ys / 1.5)));
    s += static_cast<char>('0' + static_cast<int>(std::floor(xs / 2.25)));
  }
  return s;
}

// True when the point sits within `eps` arc-seconds of a 50m cell edge.
bool near_edge(double lat, double lon, double eps = 1e-6) {
  const double ys = std::fmod(lat * 3600.0, 1.5), xs = std::fmod((lon - 100.0) * 3600.0, 2.25);
  return ys < eps || 1.5 - ys < eps || xs < eps || 2.25 - xs < eps;
}

bool contains(const CellGeometry& geo, double lat, double lon) {
  return lat >= geo.polygon[0].lat && lat < geo.polygon[2].lat && lon >= geo.polygon[0].lon &&
         lon < geo.polygon[2].lon;
}

}  // namespace

TEST_CASE("Tokyo Station encodes to 53394611") {
  const Geocode g = encode_mesh(35.681236, 139.767125, MeshLevel::M250);
  CHECK(g.to_string().size() == 10);
  CHECK(g.to_string().substr(0, 8) == "53394611");
  CHECK(g.to_string() == oracle_code(35.681236, 139.767125, false));
  CHECK(encode_mesh(35.681236, 139.767125, MeshLevel::M50).to_string() == oracle_code(35.681236, 139.767125, true));
}

TEST_CASE("encoding agrees with the arc-second oracle away from cell edges") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(20.0, 46.0), lon(122.0, 154.0);
  int compared = 0;
  for (int i = 0; i < 10000; ++i) {
    const double a = lat(rng), o = lon(rng);
    if (near_edge(a, o)) continue;
    ++compared;
    REQUIRE(encode_mesh(a, o, MeshLevel::M50).to_string() == oracle_code(a, o, true));
    REQUIRE(encode_mesh(a, o, MeshLevel::M250).to_string() == oracle_code(a, o, false));
  }
  CHECK(compared > 9900);
}

TEST_CASE("a cell's SW corner belongs to that cell") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> lat(20.0, 46.0), lon(122.0, 154.0);
  for (int i = 0; i < 2000; ++i) {
    for (MeshLevel level : {MeshLevel::M50, MeshLevel::M250}) {
      const Geocode g = encode_mesh(lat(rng), lon(rng), level);
      const LatLon sw = decode_mesh(g).polygon[0];
      CHECK(encode_mesh(sw.lat, sw.lon, level) == g);
    }
  }
}

TEST_CASE("cell spans") {
  const auto g250 = decode_mesh(encode_mesh(35.68, 139.76, MeshLevel::M250));
  CHECK((g250.polygon[2].lat - g250.polygon[0].lat) * 3600.0 == doctest::Approx(7.5).epsilon(1e-9));
  CHECK((g250.polygon[2].lon - g250.polygon[0].lon) * 3600.0 == doctest::Approx(11.25).epsilon(1e-9));
  const auto g50 = decode_mesh(encode_mesh(35.68, 139.76, MeshLevel::M50));
  CHECK((g50.polygon[2].lat - g50.polygon[0].lat) * 3600.0 == doctest::Approx(1.5).epsilon(1e-9));
  CHECK((g50.polygon[2].lon - g50.polygon[0].lon) * 3600.0 == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(g50.polygon.front() == g50.polygon.back());
}

TEST_CASE("round trips and parent consistency over random points") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(0.0, 66.6), lon(100.0, 179.99);
  for (int i = 0; i < 10000; ++i) {
    const double a = lat(rng), o = lon(rng);
    const Geocode g50 = encode_mesh(a, o, MeshLevel::M50);
    const Geocode g250 = encode_mesh(a, o, MeshLevel::M250);
    REQUIRE(parent_250m(g50) == g250);
    REQUIRE(g50.to_string().substr(0, 10) == g250.to_string());
    for (const Geocode& g : {g50, g250}) {
      const CellGeometry geo = decode_mesh(g);
      REQUIRE(contains(geo, a, o));
      REQUIRE(encode_mesh(geo.center.lat, geo.center.lon, g.level) == g);
      REQUIRE(Geocode::parse(g.to_string()) == g);
    }
  }
}

TEST_CASE("geocode parsing rejects malformed digit patterns") {
  CHECK_THROWS_AS(Geocode::parse("533946115"), ParseError);
  CHECK_THROWS_AS(Geocode::parse("5339461150"), ParseError);    // quadrant 0
  CHECK_THROWS_AS(Geocode::parse("5339461115"), ParseError);    // quadrant 5
  CHECK_THROWS_AS(Geocode::parse("5339861111"), ParseError);    // secondary digit 8
  CHECK_THROWS_AS(Geocode::parse("533946111159"), ParseError);  // 50m column 9
  CHECK_THROWS_AS(Geocode::parse("53394611a1"), ParseError);
  CHECK(Geocode::parse("533946111144").level == MeshLevel::M50);
  CHECK_THROWS_AS(encode_mesh(-1.0, 139.0, MeshLevel::M50), ConfigError);
  CHECK_THROWS_AS(encode_mesh(35.0, 99.0, MeshLevel::M50), ConfigError);
}

namespace {

// Point inside the 50m cell (row, col) of the 250m cell whose SW corner is (lat0, lon0).
std::pair<double, double> point_in(double lat0, double lon0, int row, int col) {
  return {lat0 + (row + 0.5) * kLat50Deg, lon0 + (col + 0.5) * kLon50Deg};
}

constexpr double kLat0 = 35.0, kLon0 = 139.0;  // a 250m SW corner

}  // namespace

TEST_CASE("aggregation boundary cases") {
  const auto [la, lo] = point_in(kLat0, kLon0, 2, 2);
  std::vector<StayRecord> ten, eleven;
  for (int u = 0; u < 10; ++u) ten.push_back(stay("u" + std::to_string(u), la, lo, 0, 600, 60));
  // Repeat visits do not add users.
  for (int u = 0; u < 10; ++u) ten.push_back(stay("u" + std::to_string(u), la, lo, 1, 600, 60));
  CHECK(aggregate(ten, {}).empty());

  eleven = ten;
  eleven.push_back(stay("u10", la, lo, 2, 600, 60));
  const AreaTable t = aggregate(eleven, {});
  REQUIRE(t.size() == 1);
  const AreaRow& row = t.rows().begin()->second;
  CHECK(row.geocode.level == MeshLevel::M50);
  CHECK(row.unique_users == 11);
  CHECK(row.total() == 21);
  CHECK(row.stays.size() == 21);

  CHECK_THROWS_AS(aggregate(std::vector<StayRecord>{}, {}), DataError);
}

TEST_CASE("25 single-user cells roll up into one 250m row") {
  std::vector<StayRecord> stays;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      const auto [la, lo] = point_in(kLat0, kLon0, r, c);
      stays.push_back(stay("u" + std::to_string(r * 5 + c), la, lo, 0, 60, 10));
    }
  }
  const AreaTable t = aggregate(stays, {});
  REQUIRE(t.size() == 1);
  const AreaRow& row = t.rows().begin()->second;
  CHECK(row.geocode.level == MeshLevel::M250);
  CHECK(row.geocode == encode_mesh(kLat0 + 1e-7, kLon0 + 1e-7, MeshLevel::M250));
  CHECK(row.unique_users == 25);
}

TEST_CASE("privacy fuzz against a brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int layout = 0; layout < 200; ++layout) {
    // Up to 3 parents, each with a few populated 50m cells.
    const int parents = 1 + static_cast<int>(rng() % 3);
    std::vector<StayRecord> stays;
    std::map<std::pair<int, int>, std::set<std::string>> cell_users;  // (parent, cell) -> users
    for (int p = 0; p < parents; ++p) {
      const double lat0 = kLat0 + p * kLat250Deg;
      const int cells = 1 + static_cast<int>(rng() % 6);
      for (int c = 0; c < cells; ++c) {
        const int cell = static_cast<int>(rng() % 25);
        const int users = static_cast<int>(rng() % 16);
        for (int u = 0; u < users; ++u) {
          // Shared user pool so users overlap between cells.
          const std::string id = "u" + std::to_string(rng() % 40);
          const auto [la, lo] = point_in(lat0, kLon0, cell / 5, cell % 5);
          stays.push_back(stay(id, la, lo, static_cast<int>(rng() % 7), static_cast<int>(rng() % 1440), 5));
          cell_users[{p, cell}].insert(id);
        }
      }
    }
    if (stays.empty()) continue;

    std::size_t expected_rows = 0;
    std::map<int, std::set<std::string>> spill;
    for (const auto& [key, users] : cell_users) {
      if (users.size() > 10) {
        ++expected_rows;
      } else {
        spill[key.first].insert(users.begin(), users.end());
      }
    }
    for (const auto& [p, users] : spill) expected_rows += users.size() > 10 ? 1 : 0;

    const AreaTable t = aggregate(stays, {});
    CHECK(t.size() == expected_rows);
    std::uint64_t kept = 0;
    for (const auto& [g, row] : t.rows()) {
      REQUIRE(row.unique_users > 10);
      kept += row.total();
    }
    CHECK(kept <= stays.size());
  }
}

TEST_CASE("fine histogram and retained stays mirror the counts") {
  std::vector<StayRecord> stays;
  const auto [la, lo] = point_in(kLat0, kLon0, 0, 0);
  std::mt19937_64 rng(4);
  for (int u = 0; u < 30; ++u) {
    stays.push_back(stay("u" + std::to_string(u), la, lo, static_cast<int>(rng() % 14),
                         static_cast<int>(rng() % 1440), static_cast<std::int64_t>(rng() % 900)));
  }
  const AreaRow& row = aggregate(stays, {}).rows().begin()->second;
  for (int c = 0; c < kStayClasses; ++c) {
    const StayClass cls = class_label(c);
    std::uint64_t fine = 0;
    for (int slot = cls.arrival_bin * 4; slot < cls.arrival_bin * 4 + 4; ++slot) {
      fine += row.fine[static_cast<std::size_t>(fine_cell(cls.day_type, slot, cls.duration_bin))];
    }
    CHECK(fine == row.counts[static_cast<std::size_t>(c)]);
  }
  CHECK(row.stays.size() == stays.size());
}
