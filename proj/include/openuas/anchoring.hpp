#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "openuas/analysis.hpp"
#include "openuas/anchor_schedule.hpp"
#include "openuas/embedding.hpp"
#include "openuas/mesh_grid.hpp"

namespace openuas {

// One anchor stay: arrival as minutes since Monday 00:00 and stay length in
// minutes, both multiples of 15.
struct AnchorRecord {
  int arrival_time = 0;
  int stay_time = 0;
  friend bool operator==(const AnchorRecord&, const AnchorRecord&) = default;
};

inline constexpr int kQuantumMinutes = 15;
inline constexpr int kMinutesPerWeek = 7 * 1440;

struct AnchorSet {
  std::vector<std::vector<AnchorRecord>> records;  // indexed by anchor id
  std::vector<Vec8> reference;                      // empty until computed

  std::size_t size() const { return records.size(); }
  bool has_reference() const { return !reference.empty() && reference.size() == records.size(); }

  // Model row id of anchor `i`.
  static std::string row_id(std::size_t i) { return "anchor_" + std::to_string(i); }

  // Stay-class distribution of each anchor's records.
  std::vector<TrainingArea> targets() const;

  // Throws DataError on records that are not quantized or out of range.
  void validate() const;
};

// Areas of one or more source datasets plus their retained stays, the input to
// anchor generation.
struct CombinedDataset {
  std::vector<TrainingArea> areas;
  std::vector<std::vector<WeekStay>> stays;  // parallel to areas

  // Appends every row of `table` with id `prefix + geocode`. Throws DataError when
  // the table carries no retained stays.
  void add(const AreaTable& table, std::string_view prefix = {});
};

struct AnchorGenConfig {
  int n_anchors = 512;
  int records_per_anchor = 20000;
  TrainConfig train{};
  KMeansOptions kmeans{};
};

struct AnchorGeneration {
  AnchorSet anchors;
  EmbeddingModel base;   // combined data trained without anchors
  EmbeddingModel joint;  // anchors + combined data trained together (E+)
  std::vector<int> cluster_of_area;
};

// Train on the combined data, cluster the embeddings into n groups, sample
// records per group from the groups' stays (with replacement only when the
// pool is smaller), quantize to 15 minutes, then train anchors and data jointly
// and keep the anchors' learned rows as reference embeddings.
AnchorGeneration generate_anchor_set(const CombinedDataset& combined, const AnchorGenConfig& cfg);

// Quantizes to the 15-minute floor.
AnchorRecord quantize(const WeekStay& stay);

// Builds a model with data rows (seeded init) followed by frozen anchor rows at
// their reference values, then trains with the schedule in cfg.
EmbeddingModel train_anchored_model(std::span<const TrainingArea> data, const AnchorSet& anchors,
                                    const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Trainable rows of train_anchored_model.
EmbeddingTable train_anchored(std::span<const TrainingArea> data, const AnchorSet& anchors, const TrainConfig& cfg);

// Rows of the model that are not frozen.
EmbeddingTable embedding_table(const EmbeddingModel& model);
// Rows of the model whose ids appear in `areas`.
EmbeddingTable embedding_table(const EmbeddingModel& model, std::span<const TrainingArea> areas);

enum class DistanceMetric { Euclidean, Cosine };

// Mean distance between matching rows. Throws NotFoundError when the id sets differ.
double misalignment(const EmbeddingTable& e, const EmbeddingTable& reference, DistanceMetric metric);

struct ValidationRun {
  std::uint64_t seed = 0;
  bool anchored = false;
  double approximation_loss = 0.0;
};

struct ValidationPair {
  std::uint64_t seed_a = 0;
  std::uint64_t seed_b = 0;
  bool anchored = false;
  double euclidean = 0.0;
  double cosine = 0.0;
};

struct ValidationReport {
  std::vector<ValidationRun> runs;
  std::vector<ValidationPair> pairs;

  double mean_misalignment(bool anchored, DistanceMetric metric) const;
  double mean_approximation_loss(bool anchored) const;
};

// Trains every seed with and without anchoring (cfg.schedule is used for the
// anchored runs) and compares every unordered seed pair.
ValidationReport run_validation_experiment(std::span<const TrainingArea> data, const AnchorSet& anchors,
                                           std::span<const std::uint64_t> seeds, const TrainConfig& cfg);

struct SweepGrid {
  std::vector<int> n_anchors{16, 64, 256};
  std::vector<int> records_per_anchor{1000, 5000, 20000};
  // Size used by the schedule and alpha studies.
  int study_anchors = 64;
  int study_records = 5000;
  std::vector<ScheduleKind> schedules{ScheduleKind::Mixed, ScheduleKind::Constant, ScheduleKind::Exponential};
  std::vector<double> alphas{0.1, 0.3, 0.6};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  TrainConfig train{};
  KMeansOptions kmeans{};
  std::uint64_t anchor_seed = 0;
};

struct SweepRow {
  std::string study;  // "size", "schedule" or "alpha"
  int n_anchors = 0;
  int records_per_anchor = 0;
  ScheduleKind schedule = ScheduleKind::Exponential;
  double alpha = 0.3;
  std::uint64_t seed = 0;
  double euclidean = 0.0;  // misalignment against the joint (E+) embeddings
  double cosine = 0.0;
  double approximation_loss = 0.0;
};

// Anchor size, weight-function and alpha studies. Each configuration retrains the
// combined data with anchors and measures misalignment against the joint
// embeddings produced while generating that anchor set.
std::vector<SweepRow> run_appendix_sweeps(const CombinedDataset& combined, const SweepGrid& grid);

}  // namespace openuas
