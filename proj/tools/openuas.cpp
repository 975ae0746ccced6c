// Command-line driver for the area-embedding pipeline.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "openuas/analysis.hpp"
#include "openuas/anchoring.hpp"
#include "openuas/embedding.hpp"
#include "openuas/error.hpp"
#include "openuas/io.hpp"
#include "openuas/log.hpp"
#include "openuas/mesh_grid.hpp"
#include "openuas/synthgen.hpp"

using namespace openuas;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct TrainFlags {
  int epochs = 200;
  double learning_rate = 0.05;
  int batch = 256;
  std::string optimizer = "adam";

  void add(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "training epochs")->capture_default_str();
    cmd->add_option("--lr", learning_rate, "initial learning rate (decays linearly to 10%)")->capture_default_str();
    cmd->add_option("--batch", batch, "areas per batch")->capture_default_str();
    cmd->add_option("--optimizer", optimizer, "adam or sgd")->capture_default_str();
  }

  TrainConfig config(std::uint64_t seed) const {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.learning_rate = learning_rate;
    cfg.batch_areas = batch;
    cfg.seed = seed;
    cfg.optimizer = parse_optimizer(optimizer);
    return cfg;
  }
};

struct ScheduleFlags {
  std::string kind = "exponential";
  double alpha = 0.3;
  double beta = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--schedule", kind, "none, mixed, constant or exponential")->capture_default_str();
    cmd->add_option("--alpha", alpha, "final anchoring power")->capture_default_str();
    cmd->add_option("--beta", beta, "initial anchoring power")->capture_default_str();
  }

  AnchorSchedule schedule() const { return AnchorSchedule{parse_schedule_kind(kind), alpha, beta}; }
};

HolidayCalendar load_calendar(const std::string& path) {
  return path.empty() ? HolidayCalendar{} : HolidayCalendar::load(path);
}

// Writes to `path`, or standard output for "-" / empty.
template <typename F>
void emit(const std::string& path, F&& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ostringstream buf;
  writer(buf);
  io::write_file(path, buf.str());
  log::info("wrote " + path);
}

// Dataset prefix for the i-th of several inputs; a single input keeps bare geocodes.
std::string prefix_for(std::size_t i, std::size_t n) { return n > 1 ? "d" + std::to_string(i) + ":" : ""; }

CombinedDataset combine_stays(const std::vector<std::string>& paths, const HolidayCalendar& cal) {
  CombinedDataset combined;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto stays = io::read_stays(paths[i]);
    combined.add(aggregate(stays, cal), prefix_for(i, paths.size()));
  }
  return combined;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"openuas - stay-based urban area embeddings with an anchored latent space"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress to standard error");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a planted synthetic city as a stay CSV");
  int per_archetype = 25;
  std::uint64_t seed = 0;
  std::string out, labels_out, archetypes_path;
  PlantedCityOptions planted_opts;
  synth->add_option("--per-archetype", per_archetype, "cells per archetype")->capture_default_str();
  synth->add_option("--seed", seed, "random seed")->required();
  synth->add_option("--out", out, "stay CSV output (default stdout)");
  synth->add_option("--labels", labels_out, "planted label CSV output (geocode,archetype)");
  synth->add_option("--archetypes", archetypes_path, "archetype JSON config");
  synth->add_option("--origin-lat", planted_opts.origin_lat)->capture_default_str();
  synth->add_option("--origin-lon", planted_opts.origin_lon)->capture_default_str();
  synth->add_option("--min-users", planted_opts.min_users)->capture_default_str();
  synth->add_option("--max-users", planted_opts.max_users)->capture_default_str();
  synth->add_option("--stays-per-user", planted_opts.stays_per_user)->capture_default_str();

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "aggregate stays into privacy-filtered 50m/250m meshes");
  std::vector<std::string> stays_paths;
  std::string holidays, geojson_out;
  agg->add_option("--stays", stays_paths, "stay CSV")->required()->expected(1);
  agg->add_option("--holidays", holidays, "holiday calendar (one YYYY-MM-DD per line)");
  agg->add_option("--out", out, "area table CSV output (default stdout)");
  agg->add_option("--geojson", geojson_out, "cell polygon GeoJSON output");

  // train
  auto* trn = app.add_subcommand("train", "train area embeddings without anchors");
  std::string table_path, model_out, embeddings_out;
  TrainFlags train_flags;
  trn->add_option("--table", table_path, "area table CSV")->required();
  trn->add_option("--seed", seed, "random seed")->required();
  trn->add_option("--model", model_out, "model file output");
  trn->add_option("--embeddings", embeddings_out, "embedding CSV output");
  train_flags.add(trn);

  // gen-anchors
  auto* gen = app.add_subcommand("gen-anchors", "build an anchor set from one or more stay datasets");
  int n_anchors = 512, records_per_anchor = 20000;
  std::string anchor_data, anchor_embeddings;
  gen->add_option("--stays", stays_paths, "stay CSV (repeatable; each file is a distinct dataset)")->required();
  gen->add_option("--holidays", holidays, "holiday calendar");
  gen->add_option("--anchors", n_anchors, "number of anchors")->capture_default_str();
  gen->add_option("--records", records_per_anchor, "records per anchor")->capture_default_str();
  gen->add_option("--seed", seed, "random seed")->required();
  gen->add_option("--anchor-data", anchor_data, "anchor data CSV output")->required();
  gen->add_option("--anchor-embeddings", anchor_embeddings, "anchor embedding CSV output")->required();
  train_flags.add(gen);

  // train-anchored
  auto* tra = app.add_subcommand("train-anchored", "train area embeddings in the anchored space");
  ScheduleFlags sched_flags;
  tra->add_option("--table", table_path, "area table CSV")->required();
  tra->add_option("--anchor-data", anchor_data, "anchor data CSV")->required();
  tra->add_option("--anchor-embeddings", anchor_embeddings, "anchor embedding CSV")->required();
  tra->add_option("--seed", seed, "random seed")->required();
  tra->add_option("--model", model_out, "model file output");
  tra->add_option("--embeddings", embeddings_out, "embedding CSV output");
  train_flags.add(tra);
  sched_flags.add(tra);

  // misalign
  auto* mis = app.add_subcommand("misalign", "mean distance between two embedding files over the same areas");
  std::string emb_a, emb_b;
  mis->add_option("a", emb_a, "embedding CSV")->required();
  mis->add_option("b", emb_b, "reference embedding CSV")->required();

  // approx-loss
  auto* apx = app.add_subcommand("approx-loss", "mean 1 - cos(predicted, empirical) over a table");
  std::string model_path, per_area_out;
  apx->add_option("--model", model_path, "model file")->required();
  apx->add_option("--table", table_path, "area table CSV")->required();
  apx->add_option("--per-area", per_area_out, "per-area CSV output (geocode,unique_users,approximation_loss)");

  // cluster
  auto* clu = app.add_subcommand("cluster", "k-means++ clustering; fills the cluster<k> column");
  std::string embeddings_path;
  int k = 5, restarts = 1;
  clu->add_option("--embeddings", embeddings_path, "embedding CSV")->required();
  clu->add_option("--k", k, "5, 10 or 20")->required()->check(CLI::IsMember({5, 10, 20}));
  clu->add_option("--seed", seed, "random seed")->required();
  clu->add_option("--restarts", restarts, "k-means++ restarts")->capture_default_str();
  clu->add_option("--out", out, "embedding CSV output (default: overwrite input)");

  // profile
  auto* pro = app.add_subcommand("profile", "per-cluster usage profile (mean visits per area per half hour)");
  std::string svg_out;
  pro->add_option("--stays", stays_paths, "stay CSV the embeddings were trained on")->required()->expected(1);
  pro->add_option("--holidays", holidays, "holiday calendar");
  pro->add_option("--embeddings", embeddings_path, "clustered embedding CSV")->required();
  pro->add_option("--k", k, "which cluster column to use")->required()->check(CLI::IsMember({5, 10, 20}));
  pro->add_option("--out", out, "profile CSV output (default stdout)");
  pro->add_option("--svg", svg_out, "stacked-bar SVG output");

  // search
  auto* sea = app.add_subcommand("search", "areas with cosine similarity above a threshold");
  std::string query;
  double threshold = 0.9;
  sea->add_option("--embeddings", embeddings_path, "embedding CSV")->required();
  sea->add_option("--query", query, "query geocode")->required();
  sea->add_option("--threshold", threshold, "minimum cosine similarity in [-1, 1]")->capture_default_str();
  sea->add_option("--out", out, "CSV output (default stdout)");

  // resolve
  auto* res = app.add_subcommand("resolve", "embedding of a cell, falling back to its 250m parent");
  std::string geocode_text;
  res->add_option("--embeddings", embeddings_path, "embedding CSV")->required();
  res->add_option("--geocode", geocode_text, "10- or 12-digit geocode")->required();

  // sweep
  auto* swp = app.add_subcommand("sweep", "anchor size, weight-function and alpha studies");
  SweepGrid grid;
  std::vector<int> sweep_anchors = grid.n_anchors, sweep_records = grid.records_per_anchor;
  std::vector<double> sweep_alphas = grid.alphas;
  std::vector<std::uint64_t> sweep_seeds = grid.seeds;
  swp->add_option("--stays", stays_paths, "stay CSV (repeatable)")->required();
  swp->add_option("--holidays", holidays, "holiday calendar");
  swp->add_option("--anchors", sweep_anchors, "anchor counts")->capture_default_str();
  swp->add_option("--records", sweep_records, "records per anchor")->capture_default_str();
  swp->add_option("--study-anchors", grid.study_anchors, "anchors for schedule/alpha studies")->capture_default_str();
  swp->add_option("--study-records", grid.study_records, "records for schedule/alpha studies")->capture_default_str();
  swp->add_option("--alphas", sweep_alphas, "alpha values")->capture_default_str();
  swp->add_option("--seeds", sweep_seeds, "retraining seeds")->capture_default_str();
  swp->add_option("--seed", seed, "anchor generation seed")->required();
  swp->add_option("--out", out, "CSV output (default stdout)");
  train_flags.add(swp);

  // validate
  auto* val = app.add_subcommand("validate", "train with and without anchors over several seeds and compare");
  val->add_option("--table", table_path, "area table CSV")->required();
  val->add_option("--anchor-data", anchor_data, "anchor data CSV")->required();
  val->add_option("--anchor-embeddings", anchor_embeddings, "anchor embedding CSV")->required();
  val->add_option("--seeds", sweep_seeds, "seeds (at least two)")->required();
  val->add_option("--out", out, "CSV output (default stdout)");
  train_flags.add(val);
  sched_flags.add(val);

  // export-geojson
  auto* exp = app.add_subcommand("export-geojson", "cell polygons with cluster labels as GeoJSON");
  int cluster_k = 0;
  exp->add_option("--embeddings", embeddings_path, "embedding CSV")->required();
  exp->add_option("--k", cluster_k, "cluster column (5, 10, 20) or 0 for none")
      ->check(CLI::IsMember({0, 5, 10, 20}))
      ->capture_default_str();
  exp->add_option("--out", out, "GeoJSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }
  log::threshold() = verbose ? log::Level::Info : log::Level::Warn;

  try {
    if (*synth) {
      PlantedCity planted = planted_city(per_archetype, seed, planted_opts);
      if (!archetypes_path.empty()) {
        auto archetypes = parse_archetypes(io::read_file(archetypes_path));
        if (archetypes.size() != planted.city.archetypes.size()) {
          throw ConfigError("planted cities need exactly " + std::to_string(planted.city.archetypes.size()) +
                            " archetypes");
        }
        planted.city.archetypes = std::move(archetypes);
      }
      const auto stays = generate(planted.city);
      emit(out, [&](std::ostream& os) { io::write_stays(os, stays); });
      if (!labels_out.empty()) {
        emit(labels_out, [&](std::ostream& os) {
          os << "geocode,archetype\n";
          for (const auto& [g, label] : planted.labels) {
            os << g << ',' << planted.city.archetypes[static_cast<std::size_t>(label)].name << '\n';
          }
        });
      }
    } else if (*agg) {
      const auto stays = io::read_stays(stays_paths.front());
      const AreaTable table = aggregate(stays, load_calendar(holidays));
      log::info("kept " + std::to_string(table.size()) + " meshes from " + std::to_string(stays.size()) + " stays");
      emit(out, [&](std::ostream& os) { io::write_area_table(os, table); });
      if (!geojson_out.empty()) emit(geojson_out, [&](std::ostream& os) { io::write_geojson(os, table); });
    } else if (*trn) {
      const AreaTable table = io::read_area_table(table_path);
      const EmbeddingModel model = train(table, train_flags.config(seed), [](const EpochReport& r) {
        log::debug("epoch " + std::to_string(r.epoch) + " loss " + io::format_double(r.mean_loss));
      });
      log::info("approximation loss " + io::format_double(approximation_loss(model, table)));
      if (!model_out.empty()) emit(model_out, [&](std::ostream& os) { io::write_model(os, model); });
      if (!embeddings_out.empty()) {
        emit(embeddings_out, [&](std::ostream& os) { io::write_embeddings(os, io::embedding_records(embedding_table(model))); });
      }
    } else if (*gen) {
      AnchorGenConfig cfg;
      cfg.n_anchors = n_anchors;
      cfg.records_per_anchor = records_per_anchor;
      cfg.train = train_flags.config(seed);
      const auto generation = generate_anchor_set(combine_stays(stays_paths, load_calendar(holidays)), cfg);
      emit(anchor_data, [&](std::ostream& os) { io::write_anchor_data(os, generation.anchors); });
      emit(anchor_embeddings, [&](std::ostream& os) { io::write_anchor_embeddings(os, generation.anchors); });
    } else if (*tra) {
      const AreaTable table = io::read_area_table(table_path);
      const AnchorSet anchors = io::read_anchor_set(anchor_data, anchor_embeddings);
      TrainConfig cfg = train_flags.config(seed);
      cfg.schedule = sched_flags.schedule();
      const auto areas = training_areas(table);
      const EmbeddingModel model = train_anchored_model(areas, anchors, cfg);
      log::info("approximation loss " + io::format_double(approximation_loss(model, areas)));
      if (!model_out.empty()) emit(model_out, [&](std::ostream& os) { io::write_model(os, model); });
      if (!embeddings_out.empty()) {
        emit(embeddings_out, [&](std::ostream& os) { io::write_embeddings(os, io::embedding_records(embedding_table(model))); });
      }
    } else if (*mis) {
      const auto a = io::read_embeddings(emb_a).table();
      const auto b = io::read_embeddings(emb_b).table();
      std::cout << "euclidean," << io::format_double(misalignment(a, b, DistanceMetric::Euclidean)) << '\n'
                << "cosine," << io::format_double(misalignment(a, b, DistanceMetric::Cosine)) << '\n';
    } else if (*apx) {
      const EmbeddingModel model = io::read_model(model_path);
      const AreaTable table = io::read_area_table(table_path);
      const auto areas = training_areas(table);
      std::cout << io::format_double(approximation_loss(model, areas)) << '\n';
      if (!per_area_out.empty()) {
        const auto losses = approximation_losses(model, areas);
        emit(per_area_out, [&](std::ostream& os) {
          os << "geocode,unique_users,approximation_loss\n";
          std::size_t i = 0;
          for (const auto& [g, row] : table.rows()) {
            os << g.to_string() << ',' << row.unique_users << ',' << io::format_double(losses[i++]) << '\n';
          }
        });
      }
    } else if (*clu) {
      io::EmbeddingRecords records = io::read_embeddings(embeddings_path);
      KMeansOptions opts;
      opts.restarts = restarts;
      const ClusterAssignment assignment = kmeanspp_cluster(records.table(), k, seed, opts);
      for (auto& row : records.rows) records.cluster_column(row, k) = assignment.labels.at(row.geocode);
      emit(out.empty() ? embeddings_path : out, [&](std::ostream& os) { io::write_embeddings(os, records); });
    } else if (*pro) {
      io::EmbeddingRecords records = io::read_embeddings(embeddings_path);
      ClusterAssignment assignment;
      assignment.k = k;
      for (auto& row : records.rows) {
        const auto& label = records.cluster_column(row, k);
        if (!label) throw DataError("area " + row.geocode + " has no cluster" + std::to_string(k) + " label");
        assignment.labels.emplace(row.geocode, *label);
      }
      const AreaTable table = aggregate(io::read_stays(stays_paths.front()), load_calendar(holidays));
      const ClusterProfile profile = cluster_profile(assignment, table);
      emit(out, [&](std::ostream& os) { io::write_profile(os, profile); });
      if (!svg_out.empty()) emit(svg_out, [&](std::ostream& os) { io::write_profile_svg(os, profile); });
    } else if (*sea) {
      const auto results = similar_areas(io::read_embeddings(embeddings_path).table(), query, threshold);
      emit(out, [&](std::ostream& os) { io::write_similarities(os, results); });
    } else if (*res) {
      const Vec8 v = resolve_embedding(io::read_embeddings(embeddings_path).table(), Geocode::parse(geocode_text));
      for (std::size_t h = 0; h < v.size(); ++h) std::cout << (h ? "," : "") << io::format_double(v[h]);
      std::cout << '\n';
    } else if (*swp) {
      grid.n_anchors = sweep_anchors;
      grid.records_per_anchor = sweep_records;
      grid.alphas = sweep_alphas;
      grid.seeds = sweep_seeds;
      grid.train = train_flags.config(seed);
      grid.anchor_seed = seed;
      const auto rows = run_appendix_sweeps(combine_stays(stays_paths, load_calendar(holidays)), grid);
      emit(out, [&](std::ostream& os) { io::write_sweep(os, rows); });
    } else if (*val) {
      const AreaTable table = io::read_area_table(table_path);
      const AnchorSet anchors = io::read_anchor_set(anchor_data, anchor_embeddings);
      TrainConfig cfg = train_flags.config(0);
      cfg.schedule = sched_flags.schedule();
      const auto report = run_validation_experiment(training_areas(table), anchors, sweep_seeds, cfg);
      emit(out, [&](std::ostream& os) { io::write_validation_report(os, report); });
    } else if (*exp) {
      const io::EmbeddingRecords records = io::read_embeddings(embeddings_path);
      emit(out, [&](std::ostream& os) { io::write_geojson(os, records, cluster_k); });
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
