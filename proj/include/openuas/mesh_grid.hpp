#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "openuas/stay_features.hpp"

namespace openuas {

enum class MeshLevel : std::uint8_t { M250 = 0, M50 = 1 };

std::string_view to_string(MeshLevel level);
MeshLevel parse_mesh_level(std::string_view text);

// Grid-square identifier. The leading 8 digits are the standard 1km grid-square
// code, digits 9-10 are the 500m and 250m quadrant digits (1=SW 2=SE 3=NW 4=NE),
// and 50m codes append the row (from south) and column (from west) of a 5x5 split.
struct Geocode {
  std::uint64_t code = 0;
  MeshLevel level = MeshLevel::M250;

  int digits() const { return level == MeshLevel::M50 ? 12 : 10; }
  // Zero-padded to the level's digit count.
  std::string to_string() const;
  // Accepts exactly 10 or 12 digits with valid digit ranges. Throws ParseError.
  static Geocode parse(std::string_view text);

  friend auto operator<=>(const Geocode&, const Geocode&) = default;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const LatLon&, const LatLon&) = default;
};

// Closed ring of cell corners (SW, SE, NE, NW, SW).
using CellRing = std::array<LatLon, 5>;

struct CellGeometry {
  LatLon center;
  CellRing polygon;
};

// Cell extent in degrees.
inline constexpr double kLat50Deg = 1.5 / 3600.0;
inline constexpr double kLon50Deg = 2.25 / 3600.0;
inline constexpr double kLat250Deg = 7.5 / 3600.0;
inline constexpr double kLon250Deg = 11.25 / 3600.0;

bool in_supported_band(double lat, double lon);

// Throws ConfigError for coordinates outside lat [0, 66.66..), lon [100, 180).
Geocode encode_mesh(double lat, double lon, MeshLevel level);
CellGeometry decode_mesh(const Geocode& g);
// Parent 250m cell of a 50m code; identity for 250m codes.
Geocode parent_250m(const Geocode& g);

using StayCounts = std::array<std::uint32_t, kStayClasses>;

// day_type x 48 half-hour arrival slots x duration bin.
inline constexpr int kHalfHourSlots = 48;
inline constexpr int kFineCells = kDayTypes * kHalfHourSlots * kDurationBins;
using FineHistogram = std::array<std::uint32_t, kFineCells>;

inline constexpr int fine_cell(DayType day, int slot, int dbin) {
  return (static_cast<int>(day) * kHalfHourSlots + slot) * kDurationBins + dbin;
}

// A retained stay without identity or location: arrival as minutes since
// Monday 00:00 plus duration. Used for anchor sampling.
struct WeekStay {
  std::uint16_t minute_of_week = 0;
  std::uint32_t duration_minutes = 0;
  friend bool operator==(const WeekStay&, const WeekStay&) = default;
};

struct AreaRow {
  Geocode geocode;
  StayCounts counts{};
  FineHistogram fine{};
  std::uint32_t unique_users = 0;
  CellGeometry geometry;
  // Filled by aggregate(); empty when the table was loaded from a counts file.
  std::vector<WeekStay> stays;

  std::uint64_t total() const;
};

class AreaTable {
 public:
  using Rows = std::map<Geocode, AreaRow>;

  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }
  const Rows& rows() const { return rows_; }
  const AreaRow& at(const Geocode& g) const;
  const AreaRow* find(const Geocode& g) const;
  bool has_stays() const;

  // Replaces any existing row with the same geocode.
  void insert(AreaRow row);

 private:
  Rows rows_;
};

inline constexpr std::uint32_t kMinUniqueUsers = 11;

// Four-step aggregation: 50m assignment, 50m user filter, reassignment of
// filtered stays to 250m cells, 250m user filter. Throws DataError on empty input.
AreaTable aggregate(std::span<const StayRecord> stays, const HolidayCalendar& cal);

}  // namespace openuas
