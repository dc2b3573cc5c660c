#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "busimorph/classifier.hpp"
#include "busimorph/dataset.hpp"
#include "busimorph/errors.hpp"
#include "busimorph/metrics.hpp"
#include "busimorph/morphometry.hpp"
#include "busimorph/png_io.hpp"
#include "busimorph/version.hpp"

namespace busimorph {

// ---------------------------------------------------------------------------
// Batch feature extraction

struct ExtractOptions {
  int working_size = 256;  // 0 keeps the native mask resolution
  int binarize_threshold = 128;
  MorphometryParams morph;
  int jobs = 1;
  std::string diagnostics_dir;  // per-sample JSON + overlay PNGs when set
};

struct ExtractResult {
  std::vector<FeatureRow> rows;  // same order as the index
  std::vector<std::string> warnings;
  int degenerate_count = 0;
};

namespace detail {

inline MaskImage load_sample_mask(const SampleRecord& rec,
                                  const ExtractOptions& opts) {
  MaskImage mask(1, 1);
  if (rec.mask_paths.empty()) {
    const GrayImage img = decode_gray(rec.image_path);
    mask = MaskImage(img.width, img.height);
  } else {
    mask = merge_masks(rec.mask_paths, 1, 1, opts.binarize_threshold);
  }
  if (opts.working_size > 0 &&
      (mask.width != opts.working_size || mask.height != opts.working_size)) {
    mask = resize_nearest(mask, opts.working_size, opts.working_size);
  }
  return mask;
}

inline void stamp_dot(RgbImage& img, double x, double y, std::uint8_t v) {
  const int cx = static_cast<int>(std::lround(x));
  const int cy = static_cast<int>(std::lround(y));
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      img.set(cx + dx, cy + dy, v, v, v);
    }
  }
}

inline void write_sample_diagnostics(const std::string& dir,
                                     const SampleRecord& rec,
                                     const ExtractionDetail& d) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string stem =
      (fs::path(dir) / (std::string(class_name(rec.label)) + "_" + rec.id))
          .string();

  nlohmann::json j;
  j["id"] = rec.id;
  j["class"] = class_name(rec.label);
  j["degenerate"] = d.features.degenerate;
  {
    nlohmann::json f;
    const auto vals = d.features.values();
    for (int i = 0; i < FeatureVector::kCount; ++i) {
      f[FeatureVector::names()[i]] = vals[i];
    }
    j["features"] = std::move(f);
  }
  if (d.ellipse_ok) {
    j["ellipse"] = {{"cx", d.ellipse.cx},
                    {"cy", d.ellipse.cy},
                    {"semi_major", d.ellipse.a},
                    {"semi_minor", d.ellipse.b},
                    {"angle_deg", d.ellipse.angle_deg},
                    {"perimeter", d.ellipse.perimeter}};
  }
  nlohmann::json salient = nlohmann::json::array();
  for (const CurvaturePoint& p : d.salient) {
    salient.push_back(
        {{"index", p.index},
         {"kind", p.kind == PointKind::Convex ? "convex" : "concave"},
         {"deviation_deg", p.deviation_deg}});
  }
  j["salient_points"] = std::move(salient);
  nlohmann::json lobes = nlohmann::json::array();
  for (const LobeInfo& lobe : d.lobes) {
    lobes.push_back({{"from", lobe.from},
                     {"to", lobe.to},
                     {"area", lobe.area},
                     {"chord_flipped", lobe.flipped}});
  }
  j["lobes"] = std::move(lobes);

  std::ofstream out(stem + ".json", std::ios::binary);
  if (!out) throw IoError("cannot write diagnostics: " + stem + ".json");
  out << j.dump(1) << '\n';

  if (!d.features.degenerate) {
    RgbImage img(d.component.width, d.component.height);
    for (int y = 0; y < d.component.height; ++y) {
      for (int x = 0; x < d.component.width; ++x) {
        if (d.component.at(x, y)) img.set(x, y, 70, 70, 70);
      }
    }
    for (const Vec2& p : d.contour.points) {
      img.set(static_cast<int>(p.x), static_cast<int>(p.y), 128, 128, 128);
    }
    // Figure style: convex marks gray, concave marks white.
    for (const CurvaturePoint& p : d.salient) {
      const Vec2& at = d.contour.points[p.index];
      stamp_dot(img, at.x, at.y, p.kind == PointKind::Convex ? 180 : 255);
    }
    write_rgb_png(stem + "_overlay.png", img);
  }
}

}  // namespace detail

/// Extracts features for every sample in the index. Workers may run in
/// parallel; results land in index order so output bytes never depend on
/// scheduling.
inline ExtractResult extract_dataset(const DatasetIndex& index,
                                     const ExtractOptions& opts) {
  const std::size_t n = index.samples.size();
  ExtractResult res;
  res.rows.resize(n);
  std::vector<std::string> row_warnings(n);

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error) return;
      }
      try {
        const SampleRecord& rec = index.samples[i];
        const MaskImage mask = detail::load_sample_mask(rec, opts);
        const ExtractionDetail d = extract_features_detailed(mask, opts.morph);
        FeatureRow row;
        row.id = rec.id;
        row.class_name = class_name(rec.label);
        row.features = d.features;
        res.rows[i] = std::move(row);
        if (d.features.degenerate) {
          row_warnings[i] = "degenerate sample: " + rec.qualified_id() +
                            (rec.mask_paths.empty() ? " (no mask file)" : "");
        }
        if (!opts.diagnostics_dir.empty()) {
          detail::write_sample_diagnostics(opts.diagnostics_dir, rec, d);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (std::string& w : row_warnings) {
    if (!w.empty()) {
      res.warnings.push_back(std::move(w));
      res.degenerate_count += 1;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Training and evaluation on feature tables

/// The head consumes every feature column except tca_ratio, which duplicates
/// solidity exactly and would add a redundant input.
inline constexpr int kModelFeatureCount = FeatureVector::kCount - 1;

inline void fill_model_row(Matrix& m, int row, const FeatureVector& f) {
  const auto vals = f.values();
  for (int j = 0; j < kModelFeatureCount; ++j) m.at(row, j) = vals[j];
}

inline ClassLabel row_label(const FeatureRow& row) {
  const auto label = parse_class(row.class_name);
  if (!label) throw DataError("unknown class name: " + row.class_name);
  return *label;
}

struct TrainOutcome {
  ClassifierModel model;
  TrainReport report;
  Split split;
  int train_rows = 0;
  int val_rows = 0;
  int excluded_degenerate = 0;
};

inline TrainOutcome train_on_rows(const std::vector<FeatureRow>& rows,
                                  std::uint64_t split_seed,
                                  double train_fraction,
                                  const TrainConfig& cfg) {
  std::vector<std::pair<std::string, ClassLabel>> items;
  std::unordered_set<std::string> seen;
  for (const FeatureRow& row : rows) {
    const ClassLabel label = row_label(row);
    const std::string qid = std::string(class_name(label)) + "/" + row.id;
    if (!seen.insert(qid).second) {
      throw DataError("duplicate sample id: " + qid);
    }
    items.emplace_back(qid, label);
  }
  TrainOutcome out;
  out.split = stratified_split_ids(items, split_seed, train_fraction);

  const std::unordered_set<std::string> train_set(out.split.train_ids.begin(),
                                                  out.split.train_ids.end());
  std::vector<const FeatureRow*> train_rows, val_rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].features.degenerate) {
      out.excluded_degenerate += 1;
      continue;
    }
    if (train_set.count(items[i].first)) {
      train_rows.push_back(&rows[i]);
    } else {
      val_rows.push_back(&rows[i]);
    }
  }
  if (train_rows.empty()) throw EmptyInput("no usable training rows");

  Matrix xtr(static_cast<int>(train_rows.size()), kModelFeatureCount);
  std::vector<int> ytr(train_rows.size());
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    fill_model_row(xtr, static_cast<int>(i), train_rows[i]->features);
    ytr[i] = static_cast<int>(row_label(*train_rows[i]));
  }
  Matrix xva(static_cast<int>(val_rows.size()), kModelFeatureCount);
  std::vector<int> yva(val_rows.size());
  for (std::size_t i = 0; i < val_rows.size(); ++i) {
    fill_model_row(xva, static_cast<int>(i), val_rows[i]->features);
    yva[i] = static_cast<int>(row_label(*val_rows[i]));
  }

  out.model = init_model(kModelFeatureCount, cfg.seed);
  out.report = train(out.model, xtr, ytr, xva, yva, cfg);
  out.train_rows = xtr.rows;
  out.val_rows = xva.rows;
  return out;
}

struct EvalOutcome {
  MetricReport report;
  int scored_rows = 0;
  int excluded_degenerate = 0;
};

inline EvalOutcome evaluate_rows(const ClassifierModel& model,
                                 const std::vector<FeatureRow>& rows) {
  std::vector<const FeatureRow*> usable;
  EvalOutcome out;
  for (const FeatureRow& row : rows) {
    if (row.features.degenerate) {
      out.excluded_degenerate += 1;
    } else {
      usable.push_back(&row);
    }
  }
  if (usable.empty()) {
    throw EmptyInput("no scorable rows (all degenerate)");
  }

  Matrix x(static_cast<int>(usable.size()), kModelFeatureCount);
  std::vector<int> actual(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i) {
    fill_model_row(x, static_cast<int>(i), usable[i]->features);
    actual[i] = static_cast<int>(row_label(*usable[i]));
  }
  const std::vector<int> predicted = predict(model, x);
  const ConfusionMatrix cm =
      confuse(actual, predicted, {"normal", "benign", "malignant"});
  out.report = report(cm);
  out.scored_rows = static_cast<int>(usable.size());
  return out;
}

// ---------------------------------------------------------------------------
// Artifact plumbing: train log and run manifests

inline void write_train_log(const std::string& path,
                            const TrainReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (std::size_t i = 0; i < report.epochs.size(); ++i) {
    const EpochStats& e = report.epochs[i];
    out << "epoch," << (i + 1) << ',' << detail::format_double(e.train_loss)
        << ',' << detail::format_double(e.train_acc) << ','
        << detail::format_double(e.val_loss) << ','
        << detail::format_double(e.val_acc) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline void write_json_atomic(const std::string& path,
                              const nlohmann::json& j) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << j.dump(1) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path);
}

/// Manifest written next to an output artifact: `<artifact>.manifest.json`.
inline void write_manifest(const std::string& artifact_path,
                           nlohmann::json body) {
  body["tool"] = "busimorph";
  body["version"] = kVersion;
  write_json_atomic(artifact_path + ".manifest.json", std::move(body));
}

}  // namespace busimorph
