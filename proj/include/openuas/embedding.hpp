#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "openuas/anchor_schedule.hpp"
#include "openuas/mesh_grid.hpp"
#include "openuas/stay_features.hpp"

namespace openuas {

inline constexpr int kEmbeddingDim = 8;

using Vec8 = std::array<double, kEmbeddingDim>;
using Frequency = std::array<double, kStayClasses>;
// Output weights, one row of 168 logit coefficients per embedding dimension.
using OutputMatrix = std::array<std::array<double, kStayClasses>, kEmbeddingDim>;

// Normalizes a count vector. Throws DataError when all counts are zero.
Frequency normalize_counts(const StayCounts& counts);
Frequency normalize_counts(std::span<const double, kStayClasses> counts);

// One training example: an area (or anchor pseudo-area) id, its stay-class
// distribution and its number of stay records. Losses weight areas by record
// count, which makes the aggregated loss equal to the per-record loss.
struct TrainingArea {
  std::string id;
  Frequency target{};
  double weight = 1.0;
};

// Rows of `table` as training examples, weighted by stay count. Ids are `prefix + geocode`.
std::vector<TrainingArea> training_areas(const AreaTable& table, std::string_view prefix = {});

enum class Optimizer { Sgd, Adam };

std::string_view to_string(Optimizer opt);
Optimizer parse_optimizer(std::string_view text);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.05;
  int batch_areas = 256;
  std::uint64_t seed = 0;
  AnchorSchedule schedule{};
  Optimizer optimizer = Optimizer::Adam;

  // Throws ConfigError.
  void validate() const;
};

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // All weights zero, nothing frozen. Throws ConfigError on duplicate ids.
  explicit EmbeddingModel(std::vector<std::string> area_ids);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& area_ids() const { return ids_; }
  std::optional<std::size_t> row_of(std::string_view id) const;
  // Throws NotFoundError.
  std::size_t require_row(std::string_view id) const;

  const Vec8& row(std::size_t i) const { return weights_.at(i); }
  Vec8& row(std::size_t i) { return weights_.at(i); }
  const OutputMatrix& output() const { return output_; }
  OutputMatrix& output() { return output_; }

  bool is_frozen(std::size_t i) const { return frozen_.at(i); }
  void freeze(std::size_t i) { frozen_.at(i) = true; }
  std::vector<std::size_t> frozen_rows() const;

  // Adds a row (zero weights). Throws ConfigError on a duplicate id.
  std::size_t add_row(std::string id, const Vec8& value = {}, bool frozen = false);

  bool all_finite() const;

  friend bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
    return a.ids_ == b.ids_ && a.weights_ == b.weights_ && a.output_ == b.output_ && a.frozen_ == b.frozen_;
  }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Vec8> weights_;
  std::vector<bool> frozen_;
  OutputMatrix output_{};
};

// Logits z = e W_out.
Frequency logits(const Vec8& embedding, const OutputMatrix& output);
// Numerically stable softmax (max-logit shift).
Frequency softmax(const Frequency& z);
// log softmax(z), computed without forming the probabilities first.
Frequency log_softmax(const Frequency& z);

// softmax(e_m W_out) for the given row.
Frequency predict_frequency(const EmbeddingModel& model, std::size_t row);

// -sum_k target_k log softmax(z)_k
double cross_entropy(const Frequency& z, const Frequency& target);

struct BatchItem {
  std::size_t row = 0;
  const Frequency* target = nullptr;
  double weight = 1.0;
};

struct Gradients {
  double loss = 0.0;
  // One entry per batch item, in batch order. Frozen rows are included.
  std::vector<std::pair<std::size_t, Vec8>> rows;
  OutputMatrix output{};
};

// Weighted mean cross-entropy over the batch, sum(w_i CE_i) / sum(w_i), and its
// analytic gradients.
Gradients loss_and_gradients(const EmbeddingModel& model, std::span<const BatchItem> batch);

// (1 - p) * Loss_data + p * Loss_anchor, each term a weighted batch mean. An empty
// anchor batch contributes nothing.
Gradients anchored_loss_and_gradients(const EmbeddingModel& model, std::span<const BatchItem> data,
                                      std::span<const BatchItem> anchors, double p);

struct RowTarget {
  std::size_t row = 0;
  Frequency target{};
  double weight = 1.0;
};

struct EpochReport {
  int epoch = 0;
  double mean_loss = 0.0;    // mean combined loss over the epoch's steps
  double anchor_power = 0.0; // NaN for Mixed
};

using EpochCallback = std::function<void(const EpochReport&)>;

// Runs the optimizer over `model` in place. Data rows are visited once per
// epoch in a seeded shuffled order; when the schedule weights anchors, every
// step also draws one anchor batch. Frozen rows are never written.
// Throws DivergenceError on a non-finite epoch loss.
void train_in_place(EmbeddingModel& model, std::span<const RowTarget> data, std::span<const RowTarget> anchors,
                    const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Seeded initialization: W ~ U(-0.5/H, 0.5/H), W_out = 0.
void initialize(EmbeddingModel& model, std::uint64_t seed);

// Unanchored Area2Vec training. Throws DataError on duplicate ids.
EmbeddingModel train(std::span<const TrainingArea> data, const TrainConfig& cfg, const EpochCallback& on_epoch = {});
EmbeddingModel train(const AreaTable& table, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// mean over areas of 1 - cos(predicted, target). Throws NotFoundError for an
// area missing from the model.
double approximation_loss(const EmbeddingModel& model, std::span<const TrainingArea> areas);
double approximation_loss(const EmbeddingModel& model, const AreaTable& table, std::string_view prefix = {});

// Per-area 1 - cos(predicted, target), in input order.
std::vector<double> approximation_losses(const EmbeddingModel& model, std::span<const TrainingArea> areas);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace openuas
