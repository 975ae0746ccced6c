#include "openuas/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "openuas/error.hpp"
#include "random.hpp"

namespace openuas {

Frequency normalize_counts(const StayCounts& counts) {
  Frequency f{};
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(counts[k]);
  return normalize_counts(std::span<const double, kStayClasses>(f));
}

Frequency normalize_counts(std::span<const double, kStayClasses> counts) {
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DataError("stay counts must be finite and non-negative");
    total += c;
  }
  if (total <= 0.0) throw DataError("area has no stays (all-zero count vector)");
  Frequency f{};
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = counts[k] / total;
  return f;
}

std::vector<TrainingArea> training_areas(const AreaTable& table, std::string_view prefix) {
  std::vector<TrainingArea> out;
  out.reserve(table.size());
  for (const auto& [g, row] : table.rows()) {
    out.push_back(TrainingArea{std::string(prefix) + g.to_string(), normalize_counts(row.counts),
                               static_cast<double>(row.total())});
  }
  return out;
}

std::string_view to_string(Optimizer opt) { return opt == Optimizer::Sgd ? "sgd" : "adam"; }

Optimizer parse_optimizer(std::string_view text) {
  if (text == "sgd") return Optimizer::Sgd;
  if (text == "adam") return Optimizer::Adam;
  throw ConfigError("unknown optimizer '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be > 0");
  if (batch_areas < 1) throw ConfigError("batch size must be >= 1");
  schedule.validate();
}

EmbeddingModel::EmbeddingModel(std::vector<std::string> area_ids) {
  for (auto& id : area_ids) add_row(std::move(id));
}

std::optional<std::size_t> EmbeddingModel::row_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingModel::require_row(std::string_view id) const {
  if (auto r = row_of(id)) return *r;
  throw NotFoundError("area '" + std::string(id) + "' not in model");
}

std::vector<std::size_t> EmbeddingModel::frozen_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < frozen_.size(); ++i) {
    if (frozen_[i]) out.push_back(i);
  }
  return out;
}

std::size_t EmbeddingModel::add_row(std::string id, const Vec8& value, bool frozen) {
  if (index_.count(id)) throw ConfigError("duplicate area id '" + id + "'");
  const std::size_t row = ids_.size();
  index_.emplace(id, row);
  ids_.push_back(std::move(id));
  weights_.push_back(value);
  frozen_.push_back(frozen);
  return row;
}

bool EmbeddingModel::all_finite() const {
  for (const auto& w : weights_) {
    for (double v : w) {
      if (!std::isfinite(v)) return false;
    }
  }
  for (const auto& r : output_) {
    for (double v : r) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

Frequency logits(const Vec8& embedding, const OutputMatrix& output) {
  Frequency z{};
  for (int h = 0; h < kEmbeddingDim; ++h) {
    const double e = embedding[static_cast<std::size_t>(h)];
    const auto& out_row = output[static_cast<std::size_t>(h)];
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += e * out_row[k];
  }
  return z;
}

Frequency softmax(const Frequency& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  Frequency q{};
  double total = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    q[k] = std::exp(z[k] - zmax);
    total += q[k];
  }
  for (double& v : q) v /= total;
  return q;
}

Frequency log_softmax(const Frequency& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - zmax);
  const double log_norm = zmax + std::log(total);
  Frequency out{};
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = z[k] - log_norm;
  return out;
}

Frequency predict_frequency(const EmbeddingModel& model, std::size_t row) {
  return softmax(logits(model.row(row), model.output()));
}

double cross_entropy(const Frequency& z, const Frequency& target) {
  const Frequency logq = log_softmax(z);
  double loss = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (target[k] != 0.0) loss -= target[k] * logq[k];
  }
  return loss;
}

namespace {

// Adds scale * sum_i (w_i / sum w) d(CE_i)/d(params) into `g`.
void accumulate(const EmbeddingModel& model, std::span<const BatchItem> batch, double scale, Gradients& g) {
  const OutputMatrix& out = model.output();
  double total = 0.0;
  for (const BatchItem& item : batch) total += item.weight;
  for (const BatchItem& item : batch) {
    const double weight = scale * item.weight / total;
    const Vec8& e = model.row(item.row);
    const Frequency z = logits(e, out);
    const Frequency logq = log_softmax(z);
    double loss = 0.0;
    Frequency dz{};
    for (std::size_t k = 0; k < dz.size(); ++k) {
      const double t = (*item.target)[k];
      if (t != 0.0) loss -= t * logq[k];
      dz[k] = weight * (std::exp(logq[k]) - t);
    }
    g.loss += weight * loss;
    Vec8 de{};
    for (std::size_t h = 0; h < de.size(); ++h) {
      const auto& out_row = out[h];
      auto& gout_row = g.output[h];
      double acc = 0.0;
      for (std::size_t k = 0; k < dz.size(); ++k) {
        acc += out_row[k] * dz[k];
        gout_row[k] += e[h] * dz[k];
      }
      de[h] = acc;
    }
    g.rows.emplace_back(item.row, de);
  }
}

}  // namespace

Gradients loss_and_gradients(const EmbeddingModel& model, std::span<const BatchItem> batch) {
  Gradients g;
  if (batch.empty()) return g;
  g.rows.reserve(batch.size());
  accumulate(model, batch, 1.0, g);
  return g;
}

Gradients anchored_loss_and_gradients(const EmbeddingModel& model, std::span<const BatchItem> data,
                                      std::span<const BatchItem> anchors, double p) {
  Gradients g;
  g.rows.reserve(data.size() + anchors.size());
  if (!data.empty()) accumulate(model, data, 1.0 - p, g);
  if (!anchors.empty()) accumulate(model, anchors, p, g);
  return g;
}

namespace {

class Optimizer_ {
 public:
  Optimizer_(Optimizer kind, std::size_t rows) : kind_(kind) {
    if (kind_ == Optimizer::Adam) {
      m_rows_.assign(rows, Vec8{});
      v_rows_.assign(rows, Vec8{});
    }
  }

  void begin_step() {
    ++step_;
    if (kind_ == Optimizer::Adam) {
      correction1_ = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
      correction2_ = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
    }
  }

  void update_row(std::size_t row, Vec8& w, const Vec8& grad, double lr) {
    if (kind_ == Optimizer::Sgd) {
      for (std::size_t h = 0; h < w.size(); ++h) w[h] -= lr * grad[h];
      return;
    }
    for (std::size_t h = 0; h < w.size(); ++h) adam(w[h], m_rows_[row][h], v_rows_[row][h], grad[h], lr);
  }

  void update_output(OutputMatrix& w, const OutputMatrix& grad, double lr) {
    for (std::size_t h = 0; h < w.size(); ++h) {
      for (std::size_t k = 0; k < w[h].size(); ++k) {
        if (kind_ == Optimizer::Sgd) {
          w[h][k] -= lr * grad[h][k];
        } else {
          adam(w[h][k], m_out_[h][k], v_out_[h][k], grad[h][k], lr);
        }
      }
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  void adam(double& w, double& m, double& v, double g, double lr) const {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g * g;
    w -= lr * (m / correction1_) / (std::sqrt(v / correction2_) + kEps);
  }

  Optimizer kind_;
  long step_ = 0;
  double correction1_ = 1.0;
  double correction2_ = 1.0;
  std::vector<Vec8> m_rows_, v_rows_;
  OutputMatrix m_out_{}, v_out_{};
};

// Sums gradient entries that refer to the same row, keeping first-seen order.
void merge_rows(std::vector<std::pair<std::size_t, Vec8>>& rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (out > 0 && rows[out - 1].first == rows[i].first) {
      for (std::size_t h = 0; h < kEmbeddingDim; ++h) rows[out - 1].second[h] += rows[i].second[h];
    } else {
      rows[out++] = rows[i];
    }
  }
  rows.resize(out);
}

}  // namespace

void train_in_place(EmbeddingModel& model, std::span<const RowTarget> data, std::span<const RowTarget> anchors,
                    const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  for (const auto& rt : data) {
    if (rt.row >= model.size()) throw ConfigError("training row out of range");
    if (!(rt.weight > 0.0) || !std::isfinite(rt.weight)) throw DataError("training weights must be positive");
  }
  for (const auto& rt : anchors) {
    if (rt.row >= model.size()) throw ConfigError("anchor row out of range");
    if (!(rt.weight > 0.0) || !std::isfinite(rt.weight)) throw DataError("anchor weights must be positive");
  }
  const bool mixed = cfg.schedule.kind == ScheduleKind::Mixed;
  const bool weighted = !mixed && cfg.schedule.kind != ScheduleKind::None && !anchors.empty();

  // Mixed treats anchors as ordinary examples drawn alongside the data.
  std::vector<const RowTarget*> pool;
  pool.reserve(data.size() + anchors.size());
  for (const auto& rt : data) pool.push_back(&rt);
  if (mixed) {
    for (const auto& rt : anchors) pool.push_back(&rt);
  }
  if (pool.empty()) return;

  std::vector<const RowTarget*> anchor_pool;
  if (weighted) {
    for (const auto& rt : anchors) anchor_pool.push_back(&rt);
  }

  detail::Rng rng(detail::derive_seed(cfg.seed, 1));
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_areas);
  const std::size_t anchor_batch = std::min(batch, anchor_pool.size());
  const std::size_t steps_per_epoch = (pool.size() + batch - 1) / batch;
  const double total_steps = static_cast<double>(steps_per_epoch) * cfg.epochs;
  Optimizer_ opt(cfg.optimizer, model.size());

  std::size_t anchor_cursor = anchor_pool.size();
  std::vector<BatchItem> data_items, anchor_items;
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // The schedule spans the run: the first epoch uses beta, the last alpha.
    double p = 0.0;
    if (mixed) {
      p = std::numeric_limits<double>::quiet_NaN();
    } else if (weighted) {
      p = anchoring_power(cfg.epochs > 1 ? epoch : 1, cfg.epochs > 1 ? cfg.epochs - 1 : 1, cfg.schedule);
    }
    detail::shuffle(pool, rng);
    double epoch_loss = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      data_items.clear();
      anchor_items.clear();
      const std::size_t lo = s * batch;
      const std::size_t hi = std::min(pool.size(), lo + batch);
      for (std::size_t i = lo; i < hi; ++i) data_items.push_back(BatchItem{pool[i]->row, &pool[i]->target, pool[i]->weight});
      if (weighted) {
        for (std::size_t i = 0; i < anchor_batch; ++i) {
          if (anchor_cursor == anchor_pool.size()) {
            detail::shuffle(anchor_pool, rng);
            anchor_cursor = 0;
          }
          const RowTarget* a = anchor_pool[anchor_cursor++];
          anchor_items.push_back(BatchItem{a->row, &a->target, a->weight});
        }
      }
      Gradients g = weighted ? anchored_loss_and_gradients(model, data_items, anchor_items, p)
                             : loss_and_gradients(model, data_items);
      epoch_loss += g.loss;

      const double lr = cfg.learning_rate * (1.0 - 0.9 * static_cast<double>(step) / total_steps);
      ++step;
      opt.begin_step();
      merge_rows(g.rows);
      for (const auto& [row, grad] : g.rows) {
        if (!model.is_frozen(row)) opt.update_row(row, model.row(row), grad, lr);
      }
      opt.update_output(model.output(), g.output, lr);
    }
    const double mean_loss = epoch_loss / static_cast<double>(steps_per_epoch);
    if (!std::isfinite(mean_loss)) throw DivergenceError(epoch, cfg.learning_rate);
    if (on_epoch) on_epoch(EpochReport{epoch, mean_loss, p});
  }
  if (!model.all_finite()) throw DivergenceError(cfg.epochs - 1, cfg.learning_rate);
}

void initialize(EmbeddingModel& model, std::uint64_t seed) {
  detail::Rng rng(detail::derive_seed(seed, 0));
  const double half = 0.5 / kEmbeddingDim;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.is_frozen(i)) continue;
    for (double& v : model.row(i)) v = detail::uniform(rng, -half, half);
  }
  model.output() = OutputMatrix{};
}

EmbeddingModel train(std::span<const TrainingArea> data, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  EmbeddingModel model;
  std::vector<RowTarget> rows;
  rows.reserve(data.size());
  for (const auto& area : data) {
    if (model.row_of(area.id)) throw DataError("duplicate area id '" + area.id + "'");
    rows.push_back(RowTarget{model.add_row(area.id), normalize_counts(std::span<const double, kStayClasses>(area.target)),
                             area.weight});
  }
  initialize(model, cfg.seed);
  train_in_place(model, rows, {}, cfg, on_epoch);
  return model;
}

EmbeddingModel train(const AreaTable& table, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  const auto areas = training_areas(table);
  return train(areas, cfg, on_epoch);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<double> approximation_losses(const EmbeddingModel& model, std::span<const TrainingArea> areas) {
  std::vector<double> out;
  out.reserve(areas.size());
  for (const auto& area : areas) {
    const Frequency predicted = predict_frequency(model, model.require_row(area.id));
    out.push_back(1.0 - cosine_similarity(predicted, area.target));
  }
  return out;
}

double approximation_loss(const EmbeddingModel& model, std::span<const TrainingArea> areas) {
  if (areas.empty()) return 0.0;
  const auto losses = approximation_losses(model, areas);
  return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
}

double approximation_loss(const EmbeddingModel& model, const AreaTable& table, std::string_view prefix) {
  const auto areas = training_areas(table, prefix);
  return approximation_loss(model, areas);
}

}  // namespace openuas
