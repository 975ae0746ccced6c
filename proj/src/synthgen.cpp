#include "openuas/synthgen.hpp"

#include <cmath>
#include <algorithm>

#include "json.hpp"

#include "openuas/error.hpp"
#include "random.hpp"

namespace openuas {

namespace {

void validate_mixture(const std::vector<MixtureComponent>& mix, const std::string& what) {
  if (mix.empty()) throw ConfigError(what + " mixture is empty");
  double total = 0.0;
  for (const auto& c : mix) {
    if (!(c.weight >= 0.0) || !(c.stddev >= 0.0) || !std::isfinite(c.mean)) {
      throw ConfigError(what + " mixture has a negative or non-finite parameter");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError(what + " mixture weights must sum to 1");
}

// Truncated normal mixture: redraw until the sample lands in [lo, hi).
double draw_mixture(detail::Rng& rng, const std::vector<MixtureComponent>& mix, double shift, double scale,
                    double lo, double hi) {
  std::vector<double> weights;
  weights.reserve(mix.size());
  for (const auto& c : mix) weights.push_back(c.weight);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const auto& c = mix[detail::categorical(rng, weights)];
    const double x = (c.mean * scale + shift) + c.stddev * scale * detail::normal(rng);
    if (x >= lo && x < hi) return x;
  }
  return std::clamp((mix.front().mean * scale + shift), lo, std::nextafter(hi, lo));
}

}  // namespace

void ArchetypeSpec::validate() const {
  if (!(weekday_weight >= 0.0) || !(weekend_weight >= 0.0) || weekday_weight + weekend_weight <= 0.0) {
    throw ConfigError("archetype '" + name + "' needs non-negative day weights with a positive sum");
  }
  validate_mixture(arrival, "archetype '" + name + "' arrival");
  validate_mixture(duration, "archetype '" + name + "' duration");
}

std::vector<ArchetypeSpec> default_archetypes() {
  return {
      ArchetypeSpec{"entertainment", 0.35, 0.65, {{13 * 60, 120, 0.5}, {19 * 60 + 30, 90, 0.5}}, {{75, 40, 1.0}}},
      ArchetypeSpec{"office", 0.92, 0.08, {{8 * 60 + 45, 40, 0.8}, {13 * 60, 60, 0.2}}, {{510, 60, 1.0}}},
      ArchetypeSpec{"station", 0.8, 0.2, {{7 * 60 + 45, 45, 0.5}, {18 * 60 + 15, 60, 0.5}}, {{12, 7, 1.0}}},
      ArchetypeSpec{"residential", 0.71, 0.29, {{21 * 60 + 30, 75, 0.8}, {19 * 60, 60, 0.2}}, {{840, 120, 1.0}}},
  };
}

void SyntheticCity::validate() const {
  if (archetypes.empty()) throw ConfigError("synthetic city has no archetypes");
  for (const auto& a : archetypes) a.validate();
  if (period_days < 1 || !period_start.ok()) throw ConfigError("synthetic period must cover at least one valid day");
  for (const auto& c : cells) {
    const CellGeometry geo = decode_mesh(c.cell);
    if (!in_supported_band(geo.center.lat, geo.center.lon)) throw ConfigError("cell outside the mesh band");
    if (c.mixture.size() != archetypes.size()) throw ConfigError("cell mixture size does not match archetypes");
    double total = 0.0;
    for (double w : c.mixture) {
      if (!(w >= 0.0)) throw ConfigError("cell mixture weights must be non-negative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("cell mixture weights must sum to 1");
    if (c.users < 1 || c.stays_per_user < 1) throw ConfigError("cells need at least one user and one stay");
    if (!(c.duration_scale > 0.0)) throw ConfigError("duration scale must be positive");
  }
}

std::vector<StayRecord> generate(const SyntheticCity& city) {
  city.validate();
  std::vector<std::chrono::year_month_day> weekdays, weekends;
  const std::chrono::sys_days start{city.period_start};
  for (int d = 0; d < city.period_days; ++d) {
    const std::chrono::year_month_day day{start + std::chrono::days{d}};
    const auto wd = std::chrono::weekday{std::chrono::sys_days{day}}.iso_encoding();
    (wd >= 6 ? weekends : weekdays).push_back(day);
  }

  std::vector<StayRecord> out;
  for (std::size_t ci = 0; ci < city.cells.size(); ++ci) {
    const SyntheticCell& cell = city.cells[ci];
    detail::Rng rng(detail::derive_seed(city.seed, ci));
    const CellGeometry geo = decode_mesh(cell.cell);
    const double south = geo.polygon[0].lat, north = geo.polygon[2].lat;
    const double west = geo.polygon[0].lon, east = geo.polygon[2].lon;
    const std::string prefix = cell.cell.to_string() + "_u";
    for (int u = 0; u < cell.users; ++u) {
      const std::string user = prefix + std::to_string(u);
      for (int s = 0; s < cell.stays_per_user; ++s) {
        const ArchetypeSpec& a = city.archetypes[detail::categorical(rng, cell.mixture)];
        StayRecord r;
        r.user_id = user;
        // Inset keeps rounding from pushing a point onto the next cell's edge.
        r.latitude = south + (north - south) * (0.001 + 0.998 * detail::uniform01(rng));
        r.longitude = west + (east - west) * (0.001 + 0.998 * detail::uniform01(rng));
        const double day_weights[2] = {weekdays.empty() ? 0.0 : a.weekday_weight,
                                       weekends.empty() ? 0.0 : a.weekend_weight};
        const auto& days = detail::categorical(rng, day_weights) == 0 ? weekdays : weekends;
        r.arrival.date = days[static_cast<std::size_t>(detail::uniform_index(rng, days.size()))];
        r.arrival.minute_of_day =
            static_cast<int>(std::floor(draw_mixture(rng, a.arrival, cell.arrival_shift, 1.0, 0.0, 1440.0)));
        r.duration_minutes = static_cast<std::int64_t>(
            std::floor(draw_mixture(rng, a.duration, 0.0, cell.duration_scale, 1.0, 1e7)));
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

PlantedCity planted_city(int n_per_archetype, std::uint64_t seed, const PlantedCityOptions& options) {
  if (n_per_archetype < 1) throw ConfigError("n_per_archetype must be >= 1");
  if (options.min_users < 1 || options.max_users < options.min_users) throw ConfigError("invalid user range");
  PlantedCity planted;
  planted.city.seed = seed;
  const std::size_t n_arch = planted.city.archetypes.size();
  const int total = n_per_archetype * static_cast<int>(n_arch);
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(total))));
  detail::Rng rng(detail::derive_seed(seed, 0xC177));
  for (int i = 0; i < total; ++i) {
    const int label = i % static_cast<int>(n_arch);
    const int row = i / cols, col = i % cols;
    // Centre 50m cell of the (row, col) 250m cell.
    const double lat = options.origin_lat + (row + 0.5) * kLat250Deg;
    const double lon = options.origin_lon + (col + 0.5) * kLon250Deg;
    SyntheticCell cell;
    cell.cell = encode_mesh(lat, lon, MeshLevel::M50);
    cell.mixture.assign(n_arch, 0.0);
    const double dominant = detail::uniform(rng, options.dominant_min, options.dominant_max);
    std::vector<double> rest(n_arch - 1);
    double rest_total = 0.0;
    for (double& r : rest) rest_total += (r = detail::uniform01(rng) + 1e-3);
    std::size_t j = 0;
    for (std::size_t a = 0; a < n_arch; ++a) {
      cell.mixture[a] = a == static_cast<std::size_t>(label) ? dominant : (1.0 - dominant) * rest[j++] / rest_total;
    }
    cell.users = options.min_users + static_cast<int>(detail::uniform_index(
                                         rng, static_cast<std::uint64_t>(options.max_users - options.min_users + 1)));
    cell.stays_per_user = options.stays_per_user;
    cell.arrival_shift = options.arrival_jitter * detail::normal(rng);
    cell.duration_scale = std::exp(options.duration_jitter * detail::normal(rng));
    planted.labels.emplace(cell.cell.to_string(), label);
    planted.city.cells.push_back(std::move(cell));
  }
  return planted;
}

std::vector<ArchetypeSpec> parse_archetypes(const std::string& json_text) {
  std::vector<ArchetypeSpec> out;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    if (!doc.is_array()) throw ConfigError("archetype config must be a JSON array");
    auto mixture = [](const nlohmann::json& arr) {
      std::vector<MixtureComponent> mix;
      for (const auto& c : arr) {
        mix.push_back(MixtureComponent{c.at("mean").get<double>(), c.at("stddev").get<double>(),
                                       c.value("weight", 1.0)});
      }
      return mix;
    };
    for (const auto& a : doc) {
      ArchetypeSpec spec;
      spec.name = a.at("name").get<std::string>();
      spec.weekday_weight = a.at("weekday_weight").get<double>();
      spec.weekend_weight = a.at("weekend_weight").get<double>();
      spec.arrival = mixture(a.at("arrival"));
      spec.duration = mixture(a.at("duration"));
      spec.validate();
      out.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("archetype config: ") + e.what());
  }
  return out;
}

}  // namespace openuas
