#include "openuas/anchoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "openuas/error.hpp"
#include "openuas/log.hpp"
#include "random.hpp"

namespace openuas {

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::None: return "none";
    case ScheduleKind::Mixed: return "mixed";
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::Exponential: return "exponential";
  }
  return "none";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
  if (text == "none") return ScheduleKind::None;
  if (text == "mixed") return ScheduleKind::Mixed;
  if (text == "constant") return ScheduleKind::Constant;
  if (text == "exponential") return ScheduleKind::Exponential;
  throw ConfigError("unknown schedule '" + std::string(text) + "'");
}

void AnchorSchedule::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  switch (kind) {
    case ScheduleKind::None:
    case ScheduleKind::Mixed:
      return;
    case ScheduleKind::Constant:
      if (!in_unit(alpha)) throw ConfigError("constant schedule needs 0 < alpha <= 1");
      return;
    case ScheduleKind::Exponential:
      if (!in_unit(alpha) || !in_unit(beta)) throw ConfigError("exponential schedule needs alpha, beta in (0, 1]");
      if (alpha > beta) throw ConfigError("exponential schedule needs alpha <= beta");
      return;
  }
}

double anchoring_power(int t, int total, const AnchorSchedule& schedule) {
  if (total < 1) throw ConfigError("total epochs must be >= 1");
  if (t < 0 || t > total) throw ConfigError("epoch index outside 0..T");
  schedule.validate();
  switch (schedule.kind) {
    case ScheduleKind::None: return 0.0;
    case ScheduleKind::Mixed: return std::numeric_limits<double>::quiet_NaN();
    case ScheduleKind::Constant: return schedule.alpha;
    case ScheduleKind::Exponential: {
      if (t == 0) return schedule.beta;
      if (t == total) return schedule.alpha;
      const double frac = static_cast<double>(t) / static_cast<double>(total);
      return std::exp(frac * (std::log(schedule.alpha) - std::log(schedule.beta)) + std::log(schedule.beta));
    }
  }
  return 0.0;
}

std::vector<TrainingArea> AnchorSet::targets() const {
  std::vector<TrainingArea> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].empty()) throw DataError("anchor " + std::to_string(i) + " has no records");
    std::array<double, kStayClasses> counts{};
    for (const AnchorRecord& r : records[i]) {
      counts[static_cast<std::size_t>(discretize_week_position(r.arrival_time, r.stay_time).index())] += 1.0;
    }
    out.push_back(TrainingArea{row_id(i), normalize_counts(std::span<const double, kStayClasses>(counts)),
                               static_cast<double>(records[i].size())});
  }
  return out;
}

void AnchorSet::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const AnchorRecord& r : records[i]) {
      if (r.arrival_time < 0 || r.arrival_time >= kMinutesPerWeek || r.arrival_time % kQuantumMinutes != 0) {
        throw DataError("anchor " + std::to_string(i) + ": arrival_time " + std::to_string(r.arrival_time) +
                        " is not a 15-minute week position");
      }
      if (r.stay_time < 0 || r.stay_time % kQuantumMinutes != 0) {
        throw DataError("anchor " + std::to_string(i) + ": stay_time " + std::to_string(r.stay_time) +
                        " is not a non-negative multiple of 15");
      }
    }
  }
  if (!reference.empty() && reference.size() != records.size()) {
    throw DataError("anchor reference embeddings do not match the anchor count");
  }
}

void CombinedDataset::add(const AreaTable& table, std::string_view prefix) {
  for (const auto& [g, row] : table.rows()) {
    if (row.stays.empty()) {
      throw DataError("area " + g.to_string() + " carries no stay records; aggregate from stays first");
    }
    areas.push_back(TrainingArea{std::string(prefix) + g.to_string(), normalize_counts(row.counts),
                                 static_cast<double>(row.total())});
    stays.push_back(row.stays);
  }
}

AnchorRecord quantize(const WeekStay& stay) {
  return AnchorRecord{stay.minute_of_week / kQuantumMinutes * kQuantumMinutes,
                      static_cast<int>(stay.duration_minutes / kQuantumMinutes * kQuantumMinutes)};
}

namespace {

std::vector<std::vector<AnchorRecord>> sample_clusters(const CombinedDataset& combined, std::span<const int> labels,
                                                       int k, int per_anchor, detail::Rng& rng) {
  std::vector<std::vector<const WeekStay*>> pools(static_cast<std::size_t>(k));
  for (std::size_t a = 0; a < combined.areas.size(); ++a) {
    auto& pool = pools[static_cast<std::size_t>(labels[a])];
    for (const WeekStay& s : combined.stays[a]) pool.push_back(&s);
  }
  std::vector<std::vector<AnchorRecord>> out(static_cast<std::size_t>(k));
  const auto want = static_cast<std::size_t>(per_anchor);
  for (std::size_t c = 0; c < pools.size(); ++c) {
    auto& pool = pools[c];
    auto& records = out[c];
    records.reserve(want);
    if (pool.size() >= want) {
      // Partial Fisher-Yates: a uniform sample without replacement.
      for (std::size_t i = 0; i < want; ++i) {
        const auto j = i + static_cast<std::size_t>(detail::uniform_index(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
        records.push_back(quantize(*pool[i]));
      }
    } else {
      for (std::size_t i = 0; i < want; ++i) {
        records.push_back(quantize(*pool[static_cast<std::size_t>(detail::uniform_index(rng, pool.size()))]));
      }
    }
  }
  return out;
}

}  // namespace

AnchorGeneration generate_anchor_set(const CombinedDataset& combined, const AnchorGenConfig& cfg) {
  cfg.train.validate();
  if (combined.areas.size() != combined.stays.size()) throw DataError("combined dataset is inconsistent");
  if (cfg.n_anchors < 1) throw ConfigError("number of anchors must be >= 1");
  if (cfg.records_per_anchor < 1) throw ConfigError("records per anchor must be >= 1");
  if (static_cast<std::size_t>(cfg.n_anchors) > combined.areas.size()) {
    throw ConfigError("number of anchors (" + std::to_string(cfg.n_anchors) + ") exceeds number of areas (" +
                      std::to_string(combined.areas.size()) + ")");
  }
  for (const auto& s : combined.stays) {
    if (s.empty()) throw DataError("every combined area needs retained stays");
  }

  AnchorGeneration gen;
  TrainConfig plain = cfg.train;
  plain.schedule = AnchorSchedule{};
  gen.base = train(combined.areas, plain);

  std::vector<Vec8> points;
  points.reserve(combined.areas.size());
  for (const auto& area : combined.areas) points.push_back(gen.base.row(gen.base.require_row(area.id)));

  // Lloyd re-seeds empty clusters itself; a cluster can still end up empty when
  // there are fewer distinct points than clusters.
  int k = cfg.n_anchors;
  KMeansResult clusters;
  std::vector<std::size_t> sizes;
  for (int attempt = 0; attempt < 10; ++attempt) {
    clusters = kmeanspp(points, k, detail::derive_seed(cfg.train.seed, 100 + static_cast<std::uint64_t>(attempt)),
                        cfg.kmeans);
    sizes.assign(static_cast<std::size_t>(k), 0);
    for (int l : clusters.labels) ++sizes[static_cast<std::size_t>(l)];
    if (std::find(sizes.begin(), sizes.end(), 0u) == sizes.end()) break;
  }
  if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end()) {
    // Canonical labels order clusters by size, so empty ones are at the end.
    const auto nonempty = static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }));
    log::warn("k-means left " + std::to_string(k - nonempty) + " empty clusters; reducing anchors to " +
              std::to_string(nonempty));
    k = nonempty;
  }
  gen.cluster_of_area = clusters.labels;

  detail::Rng rng(detail::derive_seed(cfg.train.seed, 200));
  gen.anchors.records = sample_clusters(combined, clusters.labels, k, cfg.records_per_anchor, rng);

  std::vector<TrainingArea> joint = gen.anchors.targets();
  joint.insert(joint.end(), combined.areas.begin(), combined.areas.end());
  gen.joint = train(joint, plain);
  gen.anchors.reference.reserve(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    gen.anchors.reference.push_back(gen.joint.row(gen.joint.require_row(AnchorSet::row_id(i))));
  }
  return gen;
}

EmbeddingModel train_anchored_model(std::span<const TrainingArea> data, const AnchorSet& anchors,
                                    const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  anchors.validate();
  if (anchors.size() > 0 && !anchors.has_reference()) {
    throw ConfigError("anchor set has no reference embeddings");
  }
  EmbeddingModel model;
  std::vector<RowTarget> data_rows;
  data_rows.reserve(data.size());
  for (const auto& area : data) {
    if (model.row_of(area.id)) throw DataError("duplicate area id '" + area.id + "'");
    data_rows.push_back(
        RowTarget{model.add_row(area.id), normalize_counts(std::span<const double, kStayClasses>(area.target)),
                  area.weight});
  }
  std::vector<RowTarget> anchor_rows;
  const auto targets = anchors.size() > 0 ? anchors.targets() : std::vector<TrainingArea>{};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (double v : anchors.reference[i]) {
      if (!std::isfinite(v)) throw DataError("anchor reference embedding is not finite");
    }
    anchor_rows.push_back(
        RowTarget{model.add_row(targets[i].id, anchors.reference[i], true), targets[i].target, targets[i].weight});
  }
  initialize(model, cfg.seed);
  train_in_place(model, data_rows, anchor_rows, cfg, on_epoch);
  return model;
}

EmbeddingTable train_anchored(std::span<const TrainingArea> data, const AnchorSet& anchors, const TrainConfig& cfg) {
  return embedding_table(train_anchored_model(data, anchors, cfg));
}

EmbeddingTable embedding_table(const EmbeddingModel& model) {
  EmbeddingTable out;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (!model.is_frozen(i)) out.emplace(model.area_ids()[i], model.row(i));
  }
  return out;
}

EmbeddingTable embedding_table(const EmbeddingModel& model, std::span<const TrainingArea> areas) {
  EmbeddingTable out;
  for (const auto& area : areas) out.emplace(area.id, model.row(model.require_row(area.id)));
  return out;
}

double misalignment(const EmbeddingTable& e, const EmbeddingTable& reference, DistanceMetric metric) {
  std::vector<std::string> only_e, only_ref;
  for (const auto& [id, v] : e) {
    if (!reference.count(id)) only_e.push_back(id);
  }
  for (const auto& [id, v] : reference) {
    if (!e.count(id)) only_ref.push_back(id);
  }
  if (!only_e.empty() || !only_ref.empty()) {
    auto list = [](const std::vector<std::string>& ids) {
      std::string s;
      for (std::size_t i = 0; i < ids.size() && i < 5; ++i) s += (i ? "," : "") + ids[i];
      if (ids.size() > 5) s += ",... (" + std::to_string(ids.size()) + " total)";
      return s;
    };
    throw NotFoundError("embedding tables cover different areas; only in first: [" + list(only_e) +
                        "], only in second: [" + list(only_ref) + "]");
  }
  if (e.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [id, v] : e) {
    const Vec8& w = reference.at(id);
    if (metric == DistanceMetric::Euclidean) {
      double sq = 0.0;
      for (std::size_t h = 0; h < v.size(); ++h) sq += (v[h] - w[h]) * (v[h] - w[h]);
      total += std::sqrt(sq);
    } else {
      if (v != w) total += std::max(0.0, 1.0 - cosine_similarity(v, w));
    }
  }
  return total / static_cast<double>(e.size());
}

double ValidationReport::mean_misalignment(bool anchored, DistanceMetric metric) const {
  double total = 0.0;
  int n = 0;
  for (const auto& p : pairs) {
    if (p.anchored != anchored) continue;
    total += metric == DistanceMetric::Euclidean ? p.euclidean : p.cosine;
    ++n;
  }
  return n ? total / n : 0.0;
}

double ValidationReport::mean_approximation_loss(bool anchored) const {
  double total = 0.0;
  int n = 0;
  for (const auto& r : runs) {
    if (r.anchored != anchored) continue;
    total += r.approximation_loss;
    ++n;
  }
  return n ? total / n : 0.0;
}

ValidationReport run_validation_experiment(std::span<const TrainingArea> data, const AnchorSet& anchors,
                                           std::span<const std::uint64_t> seeds, const TrainConfig& cfg) {
  if (seeds.size() < 2) throw ConfigError("the validation experiment needs at least two seeds");
  ValidationReport report;
  std::map<std::pair<std::uint64_t, bool>, EmbeddingTable> tables;
  for (bool anchored : {false, true}) {
    for (std::uint64_t seed : seeds) {
      const auto key = std::make_pair(seed, anchored);
      if (tables.count(key)) continue;
      TrainConfig run_cfg = cfg;
      run_cfg.seed = seed;
      EmbeddingModel model;
      if (anchored) {
        model = train_anchored_model(data, anchors, run_cfg);
      } else {
        run_cfg.schedule = AnchorSchedule{};
        model = train(data, run_cfg);
      }
      report.runs.push_back(ValidationRun{seed, anchored, approximation_loss(model, data)});
      tables.emplace(key, embedding_table(model, data));
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      for (std::size_t j = i + 1; j < seeds.size(); ++j) {
        const auto& a = tables.at({seeds[i], anchored});
        const auto& b = tables.at({seeds[j], anchored});
        report.pairs.push_back(ValidationPair{seeds[i], seeds[j], anchored,
                                              misalignment(a, b, DistanceMetric::Euclidean),
                                              misalignment(a, b, DistanceMetric::Cosine)});
      }
    }
  }
  return report;
}

std::vector<SweepRow> run_appendix_sweeps(const CombinedDataset& combined, const SweepGrid& grid) {
  if (grid.seeds.empty()) throw ConfigError("sweep needs at least one seed");
  std::vector<SweepRow> rows;
  std::map<std::pair<int, int>, AnchorGeneration> generated;
  auto generation = [&](int n, int records) -> const AnchorGeneration& {
    auto it = generated.find({n, records});
    if (it != generated.end()) return it->second;
    AnchorGenConfig gen_cfg;
    gen_cfg.n_anchors = n;
    gen_cfg.records_per_anchor = records;
    gen_cfg.train = grid.train;
    gen_cfg.train.seed = grid.anchor_seed;
    gen_cfg.kmeans = grid.kmeans;
    log::info("generating " + std::to_string(n) + " anchors x " + std::to_string(records) + " records");
    return generated.emplace(std::make_pair(n, records), generate_anchor_set(combined, gen_cfg)).first->second;
  };
  auto evaluate = [&](const std::string& study, int n, int records, AnchorSchedule schedule) {
    const AnchorGeneration& gen = generation(n, records);
    const EmbeddingTable reference = embedding_table(gen.joint, combined.areas);
    for (std::uint64_t seed : grid.seeds) {
      TrainConfig cfg = grid.train;
      cfg.seed = seed;
      cfg.schedule = schedule;
      const EmbeddingModel model = train_anchored_model(combined.areas, gen.anchors, cfg);
      const EmbeddingTable table = embedding_table(model, combined.areas);
      SweepRow row;
      row.study = study;
      row.n_anchors = static_cast<int>(gen.anchors.size());
      row.records_per_anchor = records;
      row.schedule = schedule.kind;
      row.alpha = schedule.alpha;
      row.seed = seed;
      row.euclidean = misalignment(table, reference, DistanceMetric::Euclidean);
      row.cosine = misalignment(table, reference, DistanceMetric::Cosine);
      row.approximation_loss = approximation_loss(model, combined.areas);
      rows.push_back(row);
    }
  };

  AnchorSchedule exponential{ScheduleKind::Exponential, 0.3, 1.0};
  for (int n : grid.n_anchors) {
    for (int records : grid.records_per_anchor) evaluate("size", n, records, exponential);
  }
  for (ScheduleKind kind : grid.schedules) {
    evaluate("schedule", grid.study_anchors, grid.study_records, AnchorSchedule{kind, 0.3, 1.0});
  }
  for (double alpha : grid.alphas) {
    evaluate("alpha", grid.study_anchors, grid.study_records, AnchorSchedule{ScheduleKind::Exponential, alpha, 1.0});
  }
  return rows;
}

}  // namespace openuas
