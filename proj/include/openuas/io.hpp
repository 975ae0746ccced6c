#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "openuas/analysis.hpp"
#include "openuas/anchoring.hpp"
#include "openuas/embedding.hpp"
#include "openuas/mesh_grid.hpp"
#include "openuas/stay_features.hpp"

namespace openuas::io {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);
// Throws ParseError.
double parse_double(std::string_view text);

// RFC 4180 style fields: quotes are required around fields holding commas,
// quotes or newlines, and embedded quotes are doubled.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no = 0);
std::string csv_escape(std::string_view field);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// ---- stays: user_id,latitude,longitude,arrival,duration_minutes
std::vector<StayRecord> read_stays(std::istream& in);
std::vector<StayRecord> read_stays(const std::string& path);
void write_stays(std::ostream& out, const std::vector<StayRecord>& stays);

// ---- area table: geocode,level,unique_users,c0,...,c167
void write_area_table(std::ostream& out, const AreaTable& table);
// Rows carry counts, user counts and geometry; fine histograms and stays are not stored.
AreaTable read_area_table(std::istream& in);
AreaTable read_area_table(const std::string& path);

// ---- model: "H=8 N=168 areas=<n>", one "id v0..v7" line per area, 8 lines of
// 168 output weights, then "frozen: id id ...".
void write_model(std::ostream& out, const EmbeddingModel& model);
EmbeddingModel read_model(std::istream& in);
EmbeddingModel read_model(const std::string& path);

// ---- anchors: anchor_id,arrival_time,stay_time and anchor_id,v0,...,v7
void write_anchor_data(std::ostream& out, const AnchorSet& anchors);
void write_anchor_embeddings(std::ostream& out, const AnchorSet& anchors);
// Anchor ids must be 0..n-1; the embeddings file may be omitted.
AnchorSet read_anchor_set(std::istream& data, std::istream* embeddings);
AnchorSet read_anchor_set(const std::string& data_path, const std::string& embeddings_path);

// ---- released embedding records:
// geocode,latitude,longitude,geometry,vector,cluster5,cluster10,cluster20[,extra...]
// geometry is "[lon,lat,...]" over the closed 5-corner ring and vector is
// "[v0,...,v7]", both quoted. Empty cluster fields mean "not clustered".
struct EmbeddingRecordRow {
  std::string geocode;
  double latitude = 0.0;
  double longitude = 0.0;
  std::vector<double> geometry;
  Vec8 vector{};
  std::optional<int> cluster5, cluster10, cluster20;
  std::vector<std::string> extra;  // values of EmbeddingRecords::extra_columns

  friend bool operator==(const EmbeddingRecordRow&, const EmbeddingRecordRow&) = default;
};

struct EmbeddingRecords {
  std::vector<std::string> extra_columns;
  std::vector<EmbeddingRecordRow> rows;

  EmbeddingTable table() const;
  std::optional<int>& cluster_column(EmbeddingRecordRow& row, int k) const;

  friend bool operator==(const EmbeddingRecords&, const EmbeddingRecords&) = default;
};

// Builds rows for every trainable geocode row of an embedding table.
EmbeddingRecords embedding_records(const EmbeddingTable& table);

void write_embeddings(std::ostream& out, const EmbeddingRecords& records);
EmbeddingRecords read_embeddings(std::istream& in);
EmbeddingRecords read_embeddings(const std::string& path);

// ---- analysis outputs
void write_profile(std::ostream& out, const ClusterProfile& profile);
// Stacked bars per cluster: x = half-hour slot, stacks = duration bins, one panel per day type.
void write_profile_svg(std::ostream& out, const ClusterProfile& profile);
void write_similarities(std::ostream& out, const std::vector<Similarity>& results);
// FeatureCollection of cell polygons. `cluster_k` selects which cluster column
// (5, 10 or 20) populates the "cluster" property, 0 for none.
void write_geojson(std::ostream& out, const EmbeddingRecords& records, int cluster_k);
void write_geojson(std::ostream& out, const AreaTable& table);

void write_validation_report(std::ostream& out, const ValidationReport& report);
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace openuas::io
