#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "openuas/embedding.hpp"
#include "openuas/mesh_grid.hpp"

namespace openuas {

// Area id -> embedding vector, ordered by id.
using EmbeddingTable = std::map<std::string, Vec8>;

struct KMeansOptions {
  int max_iterations = 300;
  double tolerance = 1e-8;  // stop when every centroid moves less than this
  // Independent k-means++ seedings; the run with the lowest objective wins.
  int restarts = 1;
};

struct KMeansResult {
  std::vector<int> labels;
  std::vector<Vec8> centroids;
  // Objective (sum of squared distances) after every Lloyd iteration of the kept run.
  std::vector<double> objective_trace;
  int iterations = 0;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

// k-means++ seeding followed by Lloyd iterations. Empty clusters are re-seeded at
// the point farthest from its centroid. Labels are canonicalized by descending
// cluster size, then lexicographic centroid order. Throws ConfigError unless 1 <= k <= |points|.
KMeansResult kmeanspp(std::span<const Vec8> points, int k, std::uint64_t seed, const KMeansOptions& options = {});

struct ClusterAssignment {
  int k = 0;
  std::map<std::string, int> labels;
  std::vector<Vec8> centroids;
  std::vector<double> objective_trace;
};

ClusterAssignment kmeanspp_cluster(const EmbeddingTable& table, int k, std::uint64_t seed,
                                   const KMeansOptions& options = {});

// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

struct ClusterProfile {
  // Mean visits per area for each [day_type x half-hour slot x duration bin] cell.
  std::vector<std::array<double, kFineCells>> mean_visits;
  std::vector<std::size_t> area_count;

  double at(int cluster, DayType day, int slot, int dbin) const {
    return mean_visits.at(static_cast<std::size_t>(cluster))[static_cast<std::size_t>(fine_cell(day, slot, dbin))];
  }
};

// Averages each cluster's fine histograms over its areas. Labels are looked up as
// `prefix + geocode`; a labeled area absent from the table throws NotFoundError.
ClusterProfile cluster_profile(const ClusterAssignment& assignment, const AreaTable& table,
                               std::string_view prefix = {});

struct Similarity {
  std::string area_id;
  double similarity = 0.0;
  friend bool operator==(const Similarity&, const Similarity&) = default;
};

// Areas whose cosine similarity to `query` is >= threshold, most similar first
// (ties by id), query excluded. Throws ConfigError for threshold outside [-1, 1]
// and NotFoundError for an unknown query.
std::vector<Similarity> similar_areas(const EmbeddingTable& table, const std::string& query, double threshold);

// The cell's own vector, else its 250m parent's. Throws NotFoundError.
Vec8 resolve_embedding(const EmbeddingTable& table, const Geocode& g);

inline Frequency approximate_trend(const EmbeddingModel& model, std::size_t row) {
  return predict_frequency(model, row);
}

}  // namespace openuas
