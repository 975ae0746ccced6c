#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "openuas/mesh_grid.hpp"
#include "openuas/stay_features.hpp"

namespace openuas {

struct MixtureComponent {
  double mean = 0.0;  // minutes
  double stddev = 0.0;
  double weight = 1.0;
};

struct ArchetypeSpec {
  std::string name;
  double weekday_weight = 0.5;
  double weekend_weight = 0.5;
  std::vector<MixtureComponent> arrival;   // minute of day; resampled into [0, 1440)
  std::vector<MixtureComponent> duration;  // minutes; clamped to >= 1

  // Throws ConfigError on negative weights or a mixture whose weights do not sum to 1.
  void validate() const;
};

// Entertainment, office, station/street and residential, in that order.
std::vector<ArchetypeSpec> default_archetypes();

struct SyntheticCell {
  Geocode cell;                 // stays are placed uniformly inside this cell
  std::vector<double> mixture;  // weight per archetype, sums to 1
  int users = 20;
  int stays_per_user = 8;
  double arrival_shift = 0.0;   // minutes added to every arrival mean
  double duration_scale = 1.0;  // multiplies every duration mean and stddev
};

struct SyntheticCity {
  std::vector<ArchetypeSpec> archetypes = default_archetypes();
  std::vector<SyntheticCell> cells;
  std::chrono::year_month_day period_start{std::chrono::year{2023}, std::chrono::April, std::chrono::day{3}};
  int period_days = 28;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
};

// Deterministic in the city. Each cell draws from its own seed stream, so the
// output does not depend on generation order.
std::vector<StayRecord> generate(const SyntheticCity& city);

struct PlantedCityOptions {
  double origin_lat = 35.0;
  double origin_lon = 136.5;
  int min_users = 11;
  int max_users = 150;
  int stays_per_user = 8;
  double dominant_min = 0.6;  // weight of the cell's planted archetype
  double dominant_max = 0.9;
  double arrival_jitter = 30.0;
  double duration_jitter = 0.15;
};

struct PlantedCity {
  SyntheticCity city;
  std::map<std::string, int> labels;  // 50m geocode -> planted archetype index
};

// n cells per default archetype, each a 50m cell in its own 250m parent, laid out
// row-major from the origin. The cell layout and labels do not depend on the seed.
PlantedCity planted_city(int n_per_archetype, std::uint64_t seed, const PlantedCityOptions& options = {});

// Reads archetypes from JSON: [{"name", "weekday_weight", "weekend_weight",
// "arrival": [{"mean", "stddev", "weight"}], "duration": [...]}]. Throws ConfigError.
std::vector<ArchetypeSpec> parse_archetypes(const std::string& json_text);

}  // namespace openuas
