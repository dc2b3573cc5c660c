#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "busimorph/errors.hpp"
#include "busimorph/pipeline.hpp"
#include "busimorph/synth.hpp"
#include "busimorph/version.hpp"

using namespace busimorph;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("busimorph_" + tag + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::error_code ec;
    fs::remove_all(path, ec);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// One corpus and one extraction pass shared across cases; 12 per class gives
// the stratified split room to work with.
const DatasetIndex& shared_index() {
  static TempDir dir("pipeline_corpus");
  static const DatasetIndex index = synth_corpus(12, 11, dir.path.string());
  return index;
}

const ExtractResult& shared_extract() {
  static const ExtractResult res = extract_dataset(shared_index(), {});
  return res;
}

}  // namespace

TEST_CASE("extract keeps index order and flags blank normals", "[pipeline]") {
  const DatasetIndex& index = shared_index();
  const ExtractResult& res = shared_extract();

  REQUIRE(res.rows.size() == index.samples.size());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    CHECK(res.rows[i].id == index.samples[i].id);
    CHECK(res.rows[i].class_name == class_name(index.samples[i].label));
    const bool is_normal = index.samples[i].label == ClassLabel::Normal;
    CHECK(res.rows[i].features.degenerate == is_normal);
  }
  CHECK(res.degenerate_count == 12);
  REQUIRE(res.warnings.size() == 12);
  CHECK(res.warnings[0].find("normal/n0001") != std::string::npos);
}

TEST_CASE("worker count never changes the numbers", "[pipeline]") {
  ExtractOptions opts;
  opts.jobs = 4;
  const ExtractResult par = extract_dataset(shared_index(), opts);
  const ExtractResult& seq = shared_extract();

  REQUIRE(par.rows.size() == seq.rows.size());
  for (std::size_t i = 0; i < par.rows.size(); ++i) {
    CHECK(par.rows[i].id == seq.rows[i].id);
    CHECK(par.rows[i].features.values() == seq.rows[i].features.values());
  }
  CHECK(par.warnings == seq.warnings);
  CHECK(par.degenerate_count == seq.degenerate_count);
}

TEST_CASE("diagnostics sidecars appear when requested", "[pipeline][io]") {
  TempDir diag("pipeline_diag");
  DatasetIndex small;
  small.root = shared_index().root;
  small.samples.push_back(shared_index().samples[0]);   // normal n0001
  small.samples.push_back(shared_index().samples[12]);  // benign b0001

  ExtractOptions opts;
  opts.diagnostics_dir = diag.path.string();
  extract_dataset(small, opts);

  CHECK(fs::exists(diag.path / "normal_n0001.json"));
  CHECK_FALSE(fs::exists(diag.path / "normal_n0001_overlay.png"));
  CHECK(fs::exists(diag.path / "benign_b0001.json"));
  CHECK(fs::exists(diag.path / "benign_b0001_overlay.png"));

  std::ifstream in(diag.path / "benign_b0001.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("class") == "benign");
  CHECK(j.at("degenerate") == false);
  CHECK(j.at("features").contains("cspi"));
  CHECK(j.at("ellipse").contains("semi_major"));
}

TEST_CASE("training on extracted rows separates the synthetic classes",
          "[pipeline][slow]") {
  const ExtractResult& res = shared_extract();

  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.01;
  const TrainOutcome out = train_on_rows(res.rows, 7, 0.8, cfg);

  CHECK(out.excluded_degenerate == 12);
  // Split keeps 10/2 of each class; blank normals never reach the matrices.
  CHECK(out.train_rows == 20);
  CHECK(out.val_rows == 4);
  CHECK(out.report.epochs.size() == 200);
  CHECK(out.report.epochs.back().val_acc >= 0.95);

  const EvalOutcome ev = evaluate_rows(out.model, res.rows);
  CHECK(ev.excluded_degenerate == 12);
  CHECK(ev.scored_rows == 24);
  CHECK(ev.report.accuracy >= 0.95);
  // Normal never occurs among scored rows, so its rates resolve 0/0 -> 0.
  CHECK(ev.report.per_class[0].recall_undefined);
}

TEST_CASE("duplicate ids abort training", "[pipeline]") {
  std::vector<FeatureRow> rows = shared_extract().rows;
  rows.push_back(rows[12]);
  CHECK_THROWS_AS(train_on_rows(rows, 7, 0.8, {}), DataError);
}

TEST_CASE("scoring only degenerate rows cannot proceed", "[pipeline]") {
  FeatureRow r;
  r.id = "x";
  r.class_name = "benign";
  r.features.degenerate = true;
  const ClassifierModel m = init_model(kModelFeatureCount, 1);
  CHECK_THROWS_AS(evaluate_rows(m, {r}), EmptyInput);
}

TEST_CASE("model rows drop the trailing duplicate column", "[pipeline]") {
  CHECK(kModelFeatureCount == FeatureVector::kCount - 1);
  CHECK(FeatureVector::names()[FeatureVector::kCount - 1] ==
        std::string("tca_ratio"));

  FeatureVector f;
  auto vals = f.values();
  for (int i = 0; i < FeatureVector::kCount; ++i) {
    vals[static_cast<std::size_t>(i)] = 100.0 + i;
  }
  f.set_values(vals);
  Matrix m(1, kModelFeatureCount);
  fill_model_row(m, 0, f);
  for (int j = 0; j < kModelFeatureCount; ++j) {
    CHECK(m.at(0, j) == 100.0 + j);
  }
}

TEST_CASE("train log lines follow the epoch CSV shape", "[pipeline][io]") {
  TrainReport rep;
  EpochStats e;
  e.train_loss = 0.5;
  e.train_acc = 0.25;
  e.val_loss = 0.125;
  e.val_acc = 1.0;
  rep.epochs.push_back(e);
  e.train_loss = 0.0625;
  rep.epochs.push_back(e);

  TempDir tmp("trainlog");
  const std::string path = (tmp.path / "train_log.csv").string();
  write_train_log(path, rep);

  std::ifstream in(path);
  std::string line1, line2;
  REQUIRE(std::getline(in, line1));
  REQUIRE(std::getline(in, line2));
  CHECK(line1 == "epoch,1,0.5,0.25,0.125,1");
  CHECK(line2 == "epoch,2,0.0625,0.25,0.125,1");
}

TEST_CASE("manifests land next to their artifact", "[pipeline][io]") {
  TempDir tmp("manifest");
  const std::string artifact = (tmp.path / "features.csv").string();
  nlohmann::json body;
  body["command"] = "extract";
  body["outputs"] = {artifact};
  write_manifest(artifact, body);

  const fs::path mpath = artifact + ".manifest.json";
  REQUIRE(fs::exists(mpath));
  std::ifstream in(mpath);
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("tool") == "busimorph");
  CHECK(j.at("version") == std::string(kVersion));
  CHECK(j.at("command") == "extract");
  CHECK_FALSE(fs::exists(mpath.string() + ".tmp"));
}
