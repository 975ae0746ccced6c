#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "openuas/io.hpp"

namespace fs = std::filesystem;
using namespace openuas;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("openuas_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = std::string(OPENUAS_CLI) + " " + args + " > " + stdout_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("pipeline from synthetic stays to clustered GeoJSON") {
  Workdir w;
  REQUIRE(run("synth --per-archetype 6 --seed 3 --out " + (w / "stays.csv") + " --labels " + (w / "labels.csv")) == 0);
  REQUIRE(run("aggregate --stays " + (w / "stays.csv") + " --out " + (w / "table.csv")) == 0);
  REQUIRE(run("train --table " + (w / "table.csv") + " --seed 1 --epochs 40 --model " + (w / "model.txt") +
              " --embeddings " + (w / "emb.csv")) == 0);
  for (int k : {5, 10, 20}) REQUIRE(run("cluster --embeddings " + (w / "emb.csv") + " --k " + std::to_string(k) + " --seed 2") == 0);
  REQUIRE(run("export-geojson --embeddings " + (w / "emb.csv") + " --k 5 --out " + (w / "map.json")) == 0);

  const auto records = io::read_embeddings(w / "emb.csv");
  REQUIRE(records.rows.size() == 24);
  for (const auto& row : records.rows) {
    CHECK(row.cluster5.has_value());
    CHECK(row.cluster10.has_value());
    CHECK(row.cluster20.has_value());
  }
  const auto doc = nlohmann::json::parse(io::read_file(w / "map.json"));
  REQUIRE(doc["features"].size() == 24);
  for (const auto& f : doc["features"]) {
    const int c = f["properties"]["cluster"].get<int>();
    CHECK(c >= 0);
    CHECK(c <= 4);
  }

  REQUIRE(run("misalign " + (w / "emb.csv") + " " + (w / "emb.csv"), w / "mis.txt") == 0);
  CHECK(io::read_file(w / "mis.txt") == "euclidean,0\ncosine,0\n");

  REQUIRE(run("approx-loss --model " + (w / "model.txt") + " --table " + (w / "table.csv"), w / "loss.txt") == 0);
  const double loss = io::parse_double(io::read_file(w / "loss.txt").substr(0, io::read_file(w / "loss.txt").size() - 1));
  CHECK(loss > 0.0);
  CHECK(loss < 1.0);

  REQUIRE(run("profile --stays " + (w / "stays.csv") + " --embeddings " + (w / "emb.csv") + " --k 5 --out " +
              (w / "profile.csv") + " --svg " + (w / "profile.svg")) == 0);
  CHECK(io::read_file(w / "profile.csv").rfind("cluster,day_type,slot,duration_bin,mean_visits\n", 0) == 0);

  const std::string some = records.rows.front().geocode;
  CHECK(run("search --embeddings " + (w / "emb.csv") + " --query " + some + " --threshold -1", w / "sim.csv") == 0);
  CHECK(io::read_file(w / "sim.csv").rfind("area_id,similarity\n", 0) == 0);
  CHECK(run("resolve --embeddings " + (w / "emb.csv") + " --geocode " + some) == 0);
}

TEST_CASE("identical commands give byte-identical outputs") {
  Workdir w;
  REQUIRE(run("synth --per-archetype 3 --seed 9 --out " + (w / "s.csv")) == 0);
  REQUIRE(run("aggregate --stays " + (w / "s.csv") + " --out " + (w / "t.csv")) == 0);
  for (const char* name : {"m1.txt", "m2.txt"})
    REQUIRE(run("train --table " + (w / "t.csv") + " --seed 4 --epochs 20 --model " + (w / name)) == 0);
  CHECK(io::read_file(w / "m1.txt") == io::read_file(w / "m2.txt"));
  REQUIRE(run("gen-anchors --stays " + (w / "s.csv") + " --anchors 3 --records 40 --epochs 20 --seed 1 --anchor-data " +
              (w / "ad.csv") + " --anchor-embeddings " + (w / "ae.csv")) == 0);
  REQUIRE(run("train-anchored --table " + (w / "t.csv") + " --anchor-data " + (w / "ad.csv") + " --anchor-embeddings " +
              (w / "ae.csv") + " --seed 4 --epochs 20 --embeddings " + (w / "ea.csv")) == 0);
  CHECK(io::read_embeddings(w / "ea.csv").rows.size() == 12);
}

TEST_CASE("exit codes") {
  Workdir w;
  CHECK(run("--help") == 0);
  CHECK(run("train --help") == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("train --table x.csv --seed 1 --no-such-flag") == 2);
  CHECK(run("train --table x.csv") == 2);  // --seed is required
  CHECK(run("cluster --embeddings x.csv --k 7 --seed 1") == 2);
  CHECK(run("train --table " + (w / "missing.csv") + " --seed 1") == 3);
  io::write_file(w / "bad.csv", "geocode,latitude\n");
  CHECK(run("export-geojson --embeddings " + (w / "bad.csv")) == 3);
  CHECK(run("search --embeddings " + (w / "bad.csv") + " --query 5339461111 --threshold 2") == 3);
}
