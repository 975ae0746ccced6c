#include "openuas/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "openuas/error.hpp"

namespace openuas::io {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DataError("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

long long parse_int(std::string_view text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

void expect_header(std::istream& in, const std::vector<std::string>& expected, const char* what) {
  std::string line;
  if (!next_line(in, line)) throw ParseError(std::string(what) + ": missing header", 1);
  const auto fields = split_csv_line(line, 1);
  if (fields != expected) throw ParseError(std::string(what) + ": unexpected header '" + line + "'", 1);
}

// Parses "[a,b,...]".
std::vector<double> parse_list(std::string_view text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw ParseError("expected a bracketed list, got '" + std::string(text) + "'");
  }
  text = text.substr(1, text.size() - 2);
  std::vector<double> out;
  if (text.find_first_not_of(' ') == std::string_view::npos) return out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_list(std::span<const double> values) {
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += format_double(values[i]);
  }
  return s + "]";
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += csv_escape(fields[i]);
  }
  return s;
}

template <typename F>
void for_each_row(std::istream& in, std::size_t columns, F&& f) {
  std::string line;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (columns && fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    try {
      f(fields, line_no);
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line_no);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    } catch (const DataError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty() || was_quoted) throw ParseError("stray quote in CSV field", line_no);
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      if (was_quoted) throw ParseError("text after closing quote in CSV field", line_no);
      field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", line_no);
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string s = "\"";
  for (char c : field) {
    if (c == '"') s += '"';
    s += c;
  }
  return s + "\"";
}

std::string read_file(const std::string& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw DataError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------- stays

std::vector<StayRecord> read_stays(std::istream& in) {
  expect_header(in, {"user_id", "latitude", "longitude", "arrival", "duration_minutes"}, "stay CSV");
  std::vector<StayRecord> out;
  for_each_row(in, 5, [&](const std::vector<std::string>& f, std::size_t) {
    StayRecord r;
    r.user_id = f[0];
    r.latitude = parse_double(f[1]);
    r.longitude = parse_double(f[2]);
    r.arrival = LocalDateTime::parse(f[3]);
    r.duration_minutes = parse_int(f[4]);
    r.validate();
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<StayRecord> read_stays(const std::string& path) {
  auto in = open_in(path);
  return read_stays(in);
}

void write_stays(std::ostream& out, const std::vector<StayRecord>& stays) {
  out << "user_id,latitude,longitude,arrival,duration_minutes\n";
  for (const auto& s : stays) {
    out << csv_escape(s.user_id) << ',' << format_double(s.latitude) << ',' << format_double(s.longitude) << ','
        << s.arrival.to_string() << ',' << s.duration_minutes << '\n';
  }
}

// ---------------------------------------------------------------- area table

void write_area_table(std::ostream& out, const AreaTable& table) {
  out << "geocode,level,unique_users";
  for (int k = 0; k < kStayClasses; ++k) out << ",c" << k;
  out << '\n';
  for (const auto& [g, row] : table.rows()) {
    out << g.to_string() << ',' << to_string(g.level) << ',' << row.unique_users;
    for (auto c : row.counts) out << ',' << c;
    out << '\n';
  }
}

AreaTable read_area_table(std::istream& in) {
  std::vector<std::string> header{"geocode", "level", "unique_users"};
  for (int k = 0; k < kStayClasses; ++k) header.push_back("c" + std::to_string(k));
  expect_header(in, header, "area table CSV");
  AreaTable table;
  for_each_row(in, header.size(), [&](const std::vector<std::string>& f, std::size_t) {
    AreaRow row;
    row.geocode = Geocode::parse(f[0]);
    if (parse_mesh_level(f[1]) != row.geocode.level) throw ParseError("level does not match geocode digits");
    const long long users = parse_int(f[2]);
    if (users < 1 || users > 0xFFFFFFFFLL) throw ParseError("unique_users out of range");
    row.unique_users = static_cast<std::uint32_t>(users);
    for (int k = 0; k < kStayClasses; ++k) {
      const long long c = parse_int(f[3 + static_cast<std::size_t>(k)]);
      if (c < 0 || c > 0xFFFFFFFFLL) throw ParseError("count out of range");
      row.counts[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(c);
    }
    if (row.total() == 0) throw ParseError("area " + f[0] + " has no stays");
    if (table.find(row.geocode)) throw ParseError("duplicate geocode " + f[0]);
    row.geometry = decode_mesh(row.geocode);
    table.insert(std::move(row));
  });
  return table;
}

AreaTable read_area_table(const std::string& path) {
  auto in = open_in(path);
  return read_area_table(in);
}

// ---------------------------------------------------------------- model

void write_model(std::ostream& out, const EmbeddingModel& model) {
  out << "H=" << kEmbeddingDim << " N=" << kStayClasses << " areas=" << model.size() << '\n';
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.area_ids()[i];
    for (double v : model.row(i)) out << ' ' << format_double(v);
    out << '\n';
  }
  for (const auto& row : model.output()) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << format_double(row[k]);
    out << '\n';
  }
  out << "frozen:";
  for (std::size_t i : model.frozen_rows()) out << ' ' << model.area_ids()[i];
  out << '\n';
}

EmbeddingModel read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!next_line(in, line)) throw ParseError("empty model file", 1);
  std::istringstream head(line);
  std::string h, n, areas;
  head >> h >> n >> areas;
  if (h != "H=8" || n != "N=168" || areas.rfind("areas=", 0) != 0) {
    throw ParseError("model header must be 'H=8 N=168 areas=<count>'", 1);
  }
  const long long count = parse_int(std::string_view(areas).substr(6));
  if (count < 0) throw ParseError("negative area count", 1);
  EmbeddingModel model;
  auto tokens = [](const std::string& l) {
    std::vector<std::string> t;
    std::istringstream ss(l);
    for (std::string w; ss >> w;) t.push_back(w);
    return t;
  };
  for (long long i = 0; i < count; ++i) {
    ++line_no;
    if (!next_line(in, line)) throw ParseError("model file truncated in area rows", line_no);
    const auto t = tokens(line);
    if (t.size() != kEmbeddingDim + 1) throw ParseError("area row needs an id and 8 values", line_no);
    Vec8 v{};
    try {
      for (std::size_t h2 = 0; h2 < kEmbeddingDim; ++h2) v[h2] = parse_double(t[h2 + 1]);
      model.add_row(t[0], v);
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  for (auto& row : model.output()) {
    ++line_no;
    if (!next_line(in, line)) throw ParseError("model file truncated in output weights", line_no);
    const auto t = tokens(line);
    if (t.size() != kStayClasses) throw ParseError("output row needs 168 values", line_no);
    for (std::size_t k = 0; k < row.size(); ++k) {
      try {
        row[k] = parse_double(t[k]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
    }
  }
  ++line_no;
  if (!next_line(in, line) || line.rfind("frozen:", 0) != 0) throw ParseError("missing 'frozen:' line", line_no);
  for (const auto& id : tokens(line.substr(7))) {
    const auto row = model.row_of(id);
    if (!row) throw ParseError("frozen id '" + id + "' is not an area", line_no);
    model.freeze(*row);
  }
  if (!model.all_finite()) throw ParseError("model contains non-finite values");
  return model;
}

EmbeddingModel read_model(const std::string& path) {
  auto in = open_in(path);
  return read_model(in);
}

// ---------------------------------------------------------------- anchors

void write_anchor_data(std::ostream& out, const AnchorSet& anchors) {
  out << "anchor_id,arrival_time,stay_time\n";
  for (std::size_t i = 0; i < anchors.records.size(); ++i) {
    for (const auto& r : anchors.records[i]) out << i << ',' << r.arrival_time << ',' << r.stay_time << '\n';
  }
}

void write_anchor_embeddings(std::ostream& out, const AnchorSet& anchors) {
  out << "anchor_id";
  for (int h = 0; h < kEmbeddingDim; ++h) out << ",v" << h;
  out << '\n';
  for (std::size_t i = 0; i < anchors.reference.size(); ++i) {
    out << i;
    for (double v : anchors.reference[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

AnchorSet read_anchor_set(std::istream& data, std::istream* embeddings) {
  AnchorSet set;
  expect_header(data, {"anchor_id", "arrival_time", "stay_time"}, "anchor data CSV");
  for_each_row(data, 3, [&](const std::vector<std::string>& f, std::size_t) {
    const long long id = parse_int(f[0]);
    if (id < 0 || id > 1'000'000) throw ParseError("anchor_id out of range");
    if (static_cast<std::size_t>(id) >= set.records.size()) set.records.resize(static_cast<std::size_t>(id) + 1);
    set.records[static_cast<std::size_t>(id)].push_back(
        AnchorRecord{static_cast<int>(parse_int(f[1])), static_cast<int>(parse_int(f[2]))});
  });
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    if (set.records[i].empty()) throw DataError("anchor ids must be contiguous; anchor " + std::to_string(i) + " has no records");
  }
  if (embeddings) {
    std::vector<std::string> header{"anchor_id"};
    for (int h = 0; h < kEmbeddingDim; ++h) header.push_back("v" + std::to_string(h));
    expect_header(*embeddings, header, "anchor embedding CSV");
    std::vector<std::optional<Vec8>> refs(set.records.size());
    for_each_row(*embeddings, header.size(), [&](const std::vector<std::string>& f, std::size_t) {
      const long long id = parse_int(f[0]);
      if (id < 0 || static_cast<std::size_t>(id) >= refs.size()) throw ParseError("anchor_id has no anchor data");
      if (refs[static_cast<std::size_t>(id)]) throw ParseError("duplicate anchor_id");
      Vec8 v{};
      for (std::size_t h = 0; h < kEmbeddingDim; ++h) v[h] = parse_double(f[h + 1]);
      refs[static_cast<std::size_t>(id)] = v;
    });
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (!refs[i]) throw DataError("anchor " + std::to_string(i) + " has no reference embedding");
      set.reference.push_back(*refs[i]);
    }
  }
  set.validate();
  return set;
}

AnchorSet read_anchor_set(const std::string& data_path, const std::string& embeddings_path) {
  auto data = open_in(data_path);
  if (embeddings_path.empty()) return read_anchor_set(data, nullptr);
  auto emb = open_in(embeddings_path);
  return read_anchor_set(data, &emb);
}

// ---------------------------------------------------------------- embedding records

namespace {
const std::vector<std::string> kRecordColumns{"geocode", "latitude", "longitude", "geometry",
                                              "vector",  "cluster5", "cluster10", "cluster20"};

std::optional<int> parse_cluster(const std::string& s, int k) {
  if (s.empty()) return std::nullopt;
  const long long v = parse_int(s);
  if (v < 0 || v >= k) throw ParseError("cluster" + std::to_string(k) + " label " + s + " out of range");
  return static_cast<int>(v);
}
}  // namespace

EmbeddingTable EmbeddingRecords::table() const {
  EmbeddingTable t;
  for (const auto& r : rows) {
    if (!t.emplace(r.geocode, r.vector).second) throw DataError("duplicate geocode " + r.geocode);
  }
  return t;
}

std::optional<int>& EmbeddingRecords::cluster_column(EmbeddingRecordRow& row, int k) const {
  switch (k) {
    case 5: return row.cluster5;
    case 10: return row.cluster10;
    case 20: return row.cluster20;
    default: throw ConfigError("cluster columns exist for k = 5, 10 and 20 only");
  }
}

EmbeddingRecords embedding_records(const EmbeddingTable& table) {
  EmbeddingRecords records;
  for (const auto& [id, v] : table) {
    EmbeddingRecordRow row;
    row.geocode = id;
    const CellGeometry geo = decode_mesh(Geocode::parse(id));
    row.latitude = geo.center.lat;
    row.longitude = geo.center.lon;
    for (const LatLon& p : geo.polygon) {
      row.geometry.push_back(p.lon);
      row.geometry.push_back(p.lat);
    }
    row.vector = v;
    records.rows.push_back(std::move(row));
  }
  return records;
}

void write_embeddings(std::ostream& out, const EmbeddingRecords& records) {
  std::vector<std::string> header = kRecordColumns;
  header.insert(header.end(), records.extra_columns.begin(), records.extra_columns.end());
  out << join_csv(header) << '\n';
  auto cluster = [](const std::optional<int>& c) { return c ? std::to_string(*c) : std::string(); };
  for (const auto& r : records.rows) {
    if (r.extra.size() != records.extra_columns.size()) throw DataError("extra column count mismatch");
    std::vector<std::string> fields{r.geocode,
                                    format_double(r.latitude),
                                    format_double(r.longitude),
                                    format_list(r.geometry),
                                    format_list(r.vector),
                                    cluster(r.cluster5),
                                    cluster(r.cluster10),
                                    cluster(r.cluster20)};
    fields.insert(fields.end(), r.extra.begin(), r.extra.end());
    out << join_csv(fields) << '\n';
  }
}

EmbeddingRecords read_embeddings(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ParseError("embedding CSV: missing header", 1);
  const auto header = split_csv_line(line, 1);
  if (header.size() < kRecordColumns.size() ||
      !std::equal(kRecordColumns.begin(), kRecordColumns.end(), header.begin())) {
    throw ParseError("embedding CSV: header must start with " + join_csv(kRecordColumns), 1);
  }
  EmbeddingRecords records;
  records.extra_columns.assign(header.begin() + static_cast<std::ptrdiff_t>(kRecordColumns.size()), header.end());
  for_each_row(in, header.size(), [&](const std::vector<std::string>& f, std::size_t) {
    EmbeddingRecordRow r;
    r.geocode = f[0];
    r.latitude = parse_double(f[1]);
    r.longitude = parse_double(f[2]);
    r.geometry = parse_list(f[3]);
    const auto v = parse_list(f[4]);
    if (v.size() != kEmbeddingDim) {
      throw ParseError("vector has " + std::to_string(v.size()) + " elements, expected 8");
    }
    std::copy(v.begin(), v.end(), r.vector.begin());
    r.cluster5 = parse_cluster(f[5], 5);
    r.cluster10 = parse_cluster(f[6], 10);
    r.cluster20 = parse_cluster(f[7], 20);
    r.extra.assign(f.begin() + static_cast<std::ptrdiff_t>(kRecordColumns.size()), f.end());
    records.rows.push_back(std::move(r));
  });
  return records;
}

EmbeddingRecords read_embeddings(const std::string& path) {
  auto in = open_in(path);
  return read_embeddings(in);
}

// ---------------------------------------------------------------- analysis outputs

void write_profile(std::ostream& out, const ClusterProfile& profile) {
  out << "cluster,day_type,slot,duration_bin,mean_visits\n";
  for (std::size_t c = 0; c < profile.mean_visits.size(); ++c) {
    for (int d = 0; d < kDayTypes; ++d) {
      for (int slot = 0; slot < kHalfHourSlots; ++slot) {
        for (int b = 0; b < kDurationBins; ++b) {
          out << c << ',' << (d == 0 ? "weekday" : "weekend_holiday") << ',' << slot << ',' << b << ','
              << format_double(profile.at(static_cast<int>(c), static_cast<DayType>(d), slot, b)) << '\n';
        }
      }
    }
  }
}

void write_profile_svg(std::ostream& out, const ClusterProfile& profile) {
  static constexpr const char* kColors[kDurationBins] = {"#fde725", "#90d743", "#35b779", "#21918c",
                                                         "#31688e", "#443983", "#440154"};
  const int panel_w = 48 * 6, panel_h = 120, gap = 30;
  const int clusters = static_cast<int>(profile.mean_visits.size());
  const int width = kDayTypes * (panel_w + gap) + gap;
  const int height = clusters * (panel_h + gap) + gap;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  for (int c = 0; c < clusters; ++c) {
    double peak = 0.0;
    for (int d = 0; d < kDayTypes; ++d) {
      for (int slot = 0; slot < kHalfHourSlots; ++slot) {
        double stack = 0.0;
        for (int b = 0; b < kDurationBins; ++b) stack += profile.at(c, static_cast<DayType>(d), slot, b);
        peak = std::max(peak, stack);
      }
    }
    const double scale = peak > 0.0 ? panel_h / peak : 0.0;
    for (int d = 0; d < kDayTypes; ++d) {
      const int x0 = gap + d * (panel_w + gap);
      const int y0 = gap + c * (panel_h + gap);
      out << "<text x=\"" << x0 << "\" y=\"" << y0 - 5 << "\" font-size=\"10\">cluster " << c << ' '
          << (d == 0 ? "weekday" : "weekend/holiday") << " (" << profile.area_count[static_cast<std::size_t>(c)]
          << " areas)</text>\n";
      for (int slot = 0; slot < kHalfHourSlots; ++slot) {
        double y = y0 + panel_h;
        for (int b = 0; b < kDurationBins; ++b) {
          const double h = profile.at(c, static_cast<DayType>(d), slot, b) * scale;
          if (h <= 0.0) continue;
          y -= h;
          out << "<rect x=\"" << x0 + slot * 6 << "\" y=\"" << format_double(y) << "\" width=\"5\" height=\""
              << format_double(h) << "\" fill=\"" << kColors[b] << "\"/>\n";
        }
      }
    }
  }
  out << "</svg>\n";
}

void write_similarities(std::ostream& out, const std::vector<Similarity>& results) {
  out << "area_id,similarity\n";
  for (const auto& r : results) out << csv_escape(r.area_id) << ',' << format_double(r.similarity) << '\n';
}

namespace {

void write_feature(std::ostream& out, const CellRing& ring, const std::string& properties, bool first) {
  out << (first ? "" : ",\n") << R"({"type":"Feature","geometry":{"type":"Polygon","coordinates":[[)";
  for (std::size_t i = 0; i < ring.size(); ++i) {
    out << (i ? "," : "") << '[' << format_double(ring[i].lon) << ',' << format_double(ring[i].lat) << ']';
  }
  out << "]]},\"properties\":{" << properties << "}}";
}

}  // namespace

void write_geojson(std::ostream& out, const EmbeddingRecords& records, int cluster_k) {
  out << "{\"type\":\"FeatureCollection\",\"features\":[\n";
  bool first = true;
  for (auto row : records.rows) {
    const Geocode g = Geocode::parse(row.geocode);
    std::string props = "\"geocode\":\"" + row.geocode + "\"";
    if (cluster_k != 0) {
      const auto& c = records.cluster_column(row, cluster_k);
      if (!c) throw DataError("area " + row.geocode + " has no cluster" + std::to_string(cluster_k) + " label");
      props += ",\"cluster\":" + std::to_string(*c);
    }
    write_feature(out, decode_mesh(g).polygon, props, first);
    first = false;
  }
  out << "\n]}\n";
}

void write_geojson(std::ostream& out, const AreaTable& table) {
  out << "{\"type\":\"FeatureCollection\",\"features\":[\n";
  bool first = true;
  for (const auto& [g, row] : table.rows()) {
    const std::string props = "\"geocode\":\"" + g.to_string() + "\",\"level\":\"" + std::string(to_string(g.level)) +
                              "\",\"unique_users\":" + std::to_string(row.unique_users);
    write_feature(out, row.geometry.polygon, props, first);
    first = false;
  }
  out << "\n]}\n";
}

void write_validation_report(std::ostream& out, const ValidationReport& report) {
  out << "kind,condition,seed_a,seed_b,euclidean,cosine,approximation_loss\n";
  for (const auto& r : report.runs) {
    out << "run," << (r.anchored ? "anchored" : "unanchored") << ',' << r.seed << ",,,,"
        << format_double(r.approximation_loss) << '\n';
  }
  for (const auto& p : report.pairs) {
    out << "pair," << (p.anchored ? "anchored" : "unanchored") << ',' << p.seed_a << ',' << p.seed_b << ','
        << format_double(p.euclidean) << ',' << format_double(p.cosine) << ",\n";
  }
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "study,n_anchors,records_per_anchor,schedule,alpha,seed,euclidean,cosine,approximation_loss\n";
  for (const auto& r : rows) {
    out << r.study << ',' << r.n_anchors << ',' << r.records_per_anchor << ',' << to_string(r.schedule) << ','
        << format_double(r.alpha) << ',' << r.seed << ',' << format_double(r.euclidean) << ','
        << format_double(r.cosine) << ',' << format_double(r.approximation_loss) << '\n';
  }
}

}  // namespace openuas::io
