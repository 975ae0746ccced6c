#include "openuas/mesh_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "openuas/error.hpp"

namespace openuas {

namespace {

// Both axes decompose into the same unit counts when measured in 50m cells:
// primary 1600, secondary 200, tertiary (1km) 20, 500m 10, 250m 5.
constexpr std::int64_t kPrimary = 1600;
constexpr std::int64_t kSecondary = 200;
constexpr std::int64_t kTertiary = 20;
constexpr std::int64_t kHalf = 10;
constexpr std::int64_t kQuarter = 5;

constexpr std::int64_t kMaxLatIndex = 100 * kPrimary;  // exclusive
constexpr std::int64_t kMaxLonIndex = 80 * kPrimary;   // exclusive

double lat_corner(std::int64_t i) { return static_cast<double>(i) / 2400.0; }
double lon_corner(std::int64_t j) { return 100.0 + static_cast<double>(j) / 1600.0; }

// Largest index whose corner is <= x, so encode agrees exactly with decoded corners.
template <typename Corner>
std::int64_t floor_index(double x, double scaled, Corner corner) {
  auto k = static_cast<std::int64_t>(std::floor(scaled));
  while (corner(k + 1) <= x) ++k;
  while (corner(k) > x) --k;
  return k;
}

struct CellIndex {
  std::int64_t lat = 0;  // in 50m units from the equator
  std::int64_t lon = 0;  // in 50m units from 100E
};

Geocode make_code(CellIndex c, MeshLevel level) {
  auto split = [](std::int64_t v) {
    std::array<std::int64_t, 6> d{};
    d[0] = v / kPrimary;
    v %= kPrimary;
    d[1] = v / kSecondary;
    v %= kSecondary;
    d[2] = v / kTertiary;
    v %= kTertiary;
    d[3] = v / kHalf;
    v %= kHalf;
    d[4] = v / kQuarter;
    d[5] = v % kQuarter;
    return d;
  };
  const auto a = split(c.lat);
  const auto o = split(c.lon);
  std::uint64_t code = static_cast<std::uint64_t>(a[0]);
  code = code * 100 + static_cast<std::uint64_t>(o[0]);
  code = code * 10 + static_cast<std::uint64_t>(a[1]);
  code = code * 10 + static_cast<std::uint64_t>(o[1]);
  code = code * 10 + static_cast<std::uint64_t>(a[2]);
  code = code * 10 + static_cast<std::uint64_t>(o[2]);
  code = code * 10 + static_cast<std::uint64_t>(1 + a[3] * 2 + o[3]);
  code = code * 10 + static_cast<std::uint64_t>(1 + a[4] * 2 + o[4]);
  if (level == MeshLevel::M50) {
    code = code * 10 + static_cast<std::uint64_t>(a[5]);
    code = code * 10 + static_cast<std::uint64_t>(o[5]);
  }
  return Geocode{code, level};
}

// SW 50m cell of the geocode.
CellIndex cell_of(const Geocode& g) {
  const std::string s = g.to_string();
  auto digit = [&](std::size_t pos) { return static_cast<std::int64_t>(s[pos] - '0'); };
  auto fail = [&](const char* why) { throw ParseError("invalid geocode " + s + ": " + why); };
  const std::int64_t p = digit(0) * 10 + digit(1);
  const std::int64_t u = digit(2) * 10 + digit(3);
  if (u >= 80) fail("primary longitude code out of range");
  const std::int64_t q = digit(4), v = digit(5);
  if (q > 7 || v > 7) fail("secondary digits must be 0-7");
  const std::int64_t r = digit(6), w = digit(7);
  const std::int64_t h1 = digit(8), h2 = digit(9);
  if (h1 < 1 || h1 > 4 || h2 < 1 || h2 > 4) fail("quadrant digits must be 1-4");
  CellIndex c;
  c.lat = p * kPrimary + q * kSecondary + r * kTertiary + ((h1 - 1) / 2) * kHalf + ((h2 - 1) / 2) * kQuarter;
  c.lon = u * kPrimary + v * kSecondary + w * kTertiary + ((h1 - 1) % 2) * kHalf + ((h2 - 1) % 2) * kQuarter;
  if (g.level == MeshLevel::M50) {
    const std::int64_t row = digit(10), col = digit(11);
    if (row > 4 || col > 4) fail("50m row/column digits must be 0-4");
    c.lat += row;
    c.lon += col;
  }
  return c;
}

}  // namespace

std::string_view to_string(MeshLevel level) { return level == MeshLevel::M50 ? "50m" : "250m"; }

MeshLevel parse_mesh_level(std::string_view text) {
  if (text == "50m") return MeshLevel::M50;
  if (text == "250m") return MeshLevel::M250;
  throw ParseError("unknown mesh level '" + std::string(text) + "'");
}

std::string Geocode::to_string() const {
  std::string s = std::to_string(code);
  const auto width = static_cast<std::size_t>(digits());
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

Geocode Geocode::parse(std::string_view text) {
  if (text.size() != 10 && text.size() != 12) {
    throw ParseError("geocode '" + std::string(text) + "' must have 10 or 12 digits");
  }
  std::uint64_t code = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw ParseError("geocode '" + std::string(text) + "' contains a non-digit");
    code = code * 10 + static_cast<std::uint64_t>(ch - '0');
  }
  Geocode g{code, text.size() == 12 ? MeshLevel::M50 : MeshLevel::M250};
  (void)cell_of(g);  // validates digit ranges
  return g;
}

bool in_supported_band(double lat, double lon) {
  return lat >= 0.0 && lat < 200.0 / 3.0 && lon >= 100.0 && lon < 180.0;
}

Geocode encode_mesh(double lat, double lon, MeshLevel level) {
  if (!std::isfinite(lat) || !std::isfinite(lon) || !in_supported_band(lat, lon)) {
    throw ConfigError("coordinate (" + std::to_string(lat) + ", " + std::to_string(lon) +
                      ") outside the supported grid-square region");
  }
  CellIndex c;
  c.lat = floor_index(lat, lat * 2400.0, lat_corner);
  c.lon = floor_index(lon, (lon - 100.0) * 1600.0, lon_corner);
  if (c.lat < 0 || c.lat >= kMaxLatIndex || c.lon < 0 || c.lon >= kMaxLonIndex) {
    throw ConfigError("coordinate outside the supported grid-square region");
  }
  return make_code(c, level);
}

CellGeometry decode_mesh(const Geocode& g) {
  const CellIndex c = cell_of(g);
  const std::int64_t span = g.level == MeshLevel::M50 ? 1 : kQuarter;
  const double s = lat_corner(c.lat), n = lat_corner(c.lat + span);
  const double w = lon_corner(c.lon), e = lon_corner(c.lon + span);
  CellGeometry geo;
  geo.center = {lat_corner(c.lat) + static_cast<double>(span) / 4800.0,
                lon_corner(c.lon) + static_cast<double>(span) / 3200.0};
  geo.polygon = {LatLon{s, w}, LatLon{s, e}, LatLon{n, e}, LatLon{n, w}, LatLon{s, w}};
  return geo;
}

Geocode parent_250m(const Geocode& g) {
  if (g.level == MeshLevel::M250) return g;
  return Geocode{g.code / 100, MeshLevel::M250};
}

std::uint64_t AreaRow::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

const AreaRow& AreaTable::at(const Geocode& g) const {
  const AreaRow* row = find(g);
  if (!row) throw NotFoundError("area " + g.to_string() + " not in table");
  return *row;
}

const AreaRow* AreaTable::find(const Geocode& g) const {
  auto it = rows_.find(g);
  return it == rows_.end() ? nullptr : &it->second;
}

bool AreaTable::has_stays() const {
  for (const auto& [g, row] : rows_) {
    if (row.stays.empty()) return false;
  }
  return !rows_.empty();
}

void AreaTable::insert(AreaRow row) {
  const Geocode key = row.geocode;
  rows_.insert_or_assign(key, std::move(row));
}

namespace {

AreaRow build_row(const Geocode& g, std::span<const StayRecord> stays, std::span<const std::size_t> members,
                  const HolidayCalendar& cal, std::uint32_t unique_users) {
  AreaRow row;
  row.geocode = g;
  row.unique_users = unique_users;
  row.geometry = decode_mesh(g);
  row.stays.reserve(members.size());
  for (std::size_t idx : members) {
    const StayRecord& s = stays[idx];
    const StayClass cls = discretize(s, cal);
    ++row.counts[static_cast<std::size_t>(cls.index())];
    ++row.fine[static_cast<std::size_t>(fine_cell(cls.day_type, s.arrival.minute_of_day / 30, cls.duration_bin))];
    row.stays.push_back(WeekStay{static_cast<std::uint16_t>(s.arrival.minute_of_week()),
                                 static_cast<std::uint32_t>(s.duration_minutes)});
  }
  return row;
}

std::uint32_t count_users(std::span<const StayRecord> stays, std::span<const std::size_t> members) {
  std::unordered_set<std::string_view> users;
  for (std::size_t idx : members) users.insert(stays[idx].user_id);
  return static_cast<std::uint32_t>(users.size());
}

}  // namespace

AreaTable aggregate(std::span<const StayRecord> stays, const HolidayCalendar& cal) {
  if (stays.empty()) throw DataError("cannot aggregate an empty stay sequence");

  // Step 1: assign every stay to its 50m cell.
  std::map<Geocode, std::vector<std::size_t>> fine_cells;
  for (std::size_t i = 0; i < stays.size(); ++i) {
    stays[i].validate();
    fine_cells[encode_mesh(stays[i].latitude, stays[i].longitude, MeshLevel::M50)].push_back(i);
  }

  AreaTable table;
  std::map<Geocode, std::vector<std::size_t>> coarse_cells;
  for (const auto& [g, members] : fine_cells) {
    // Step 2: keep 50m cells with more than 10 distinct users.
    const std::uint32_t users = count_users(stays, members);
    if (users >= kMinUniqueUsers) {
      table.insert(build_row(g, stays, members, cal, users));
    } else {
      // Step 3: stays of dropped 50m cells move to the parent 250m cell.
      auto& parent = coarse_cells[parent_250m(g)];
      parent.insert(parent.end(), members.begin(), members.end());
    }
  }
  for (auto& [g, members] : coarse_cells) {
    // Step 4: same threshold at 250m.
    std::sort(members.begin(), members.end());
    const std::uint32_t users = count_users(stays, members);
    if (users >= kMinUniqueUsers) table.insert(build_row(g, stays, members, cal, users));
  }
  return table;
}

}  // namespace openuas
