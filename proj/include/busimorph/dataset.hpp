#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "busimorph/errors.hpp"
#include "busimorph/image.hpp"
#include "busimorph/imgproc.hpp"
#include "busimorph/png_io.hpp"
#include "busimorph/rng.hpp"

namespace busimorph {

enum class ClassLabel { Normal = 0, Benign = 1, Malignant = 2 };
inline constexpr int kClassCount = 3;

inline const char* class_name(ClassLabel label) {
  switch (label) {
    case ClassLabel::Normal:
      return "normal";
    case ClassLabel::Benign:
      return "benign";
    case ClassLabel::Malignant:
      return "malignant";
  }
  return "?";
}

inline std::optional<ClassLabel> parse_class(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "normal") return ClassLabel::Normal;
  if (lower == "benign") return ClassLabel::Benign;
  if (lower == "malignant") return ClassLabel::Malignant;
  return std::nullopt;
}

struct SampleRecord {
  std::string id;  // image file stem
  ClassLabel label = ClassLabel::Normal;
  std::string image_path;
  std::vector<std::string> mask_paths;  // lexicographic order

  std::string qualified_id() const {
    return std::string(class_name(label)) + "/" + id;
  }
};

struct DatasetIndex {
  std::string root;
  std::vector<SampleRecord> samples;  // ordered by class, then id
  std::array<int, kClassCount> counts{};
  std::vector<std::string> warnings;
};

namespace detail {

inline bool has_png_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

// Splits a stem into (base, is_mask). Mask stems are `<base>_mask` or
// `<base>_mask_<digits>`; everything else is an image stem.
inline bool parse_mask_stem(const std::string& stem, std::string* base) {
  const std::string tag = "_mask";
  const std::size_t pos = stem.rfind(tag);
  if (pos == std::string::npos || pos == 0) return false;
  const std::string suffix = stem.substr(pos + tag.size());
  if (suffix.empty()) {
    *base = stem.substr(0, pos);
    return true;
  }
  if (suffix.size() >= 2 && suffix[0] == '_' &&
      std::all_of(suffix.begin() + 1, suffix.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    *base = stem.substr(0, pos);
    return true;
  }
  return false;
}

}  // namespace detail

/// Walks `root/{normal,benign,malignant}` (case-insensitive directory names),
/// pairing every image PNG with the masks sharing its stem. Files that fit
/// neither naming convention are reported in `warnings`; scanning continues.
inline DatasetIndex scan_dataset(const std::string& root) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw MissingRoot("dataset root not found: " + root);
  }

  DatasetIndex index;
  index.root = root;
  bool any_class_dir = false;

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());

  for (const fs::path& dir : class_dirs) {
    const auto label = parse_class(dir.filename().string());
    if (!label) continue;
    any_class_dir = true;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<SampleRecord> images;
    std::vector<std::pair<std::string, std::string>> masks;  // base stem, path
    for (const fs::path& file : files) {
      if (!detail::has_png_extension(file)) {
        index.warnings.push_back("unrecognized file (not .png): " +
                                 file.string());
        continue;
      }
      const std::string stem = file.stem().string();
      std::string base;
      if (detail::parse_mask_stem(stem, &base)) {
        masks.emplace_back(base, file.string());
      } else {
        SampleRecord rec;
        rec.id = stem;
        rec.label = *label;
        rec.image_path = file.string();
        images.push_back(std::move(rec));
      }
    }

    for (const auto& [base, path] : masks) {
      const auto it = std::find_if(
          images.begin(), images.end(),
          [&](const SampleRecord& r) { return r.id == base; });
      if (it == images.end()) {
        index.warnings.push_back("mask without a matching image: " + path);
      } else {
        it->mask_paths.push_back(path);
      }
    }

    std::sort(images.begin(), images.end(),
              [](const SampleRecord& a, const SampleRecord& b) {
                return a.id < b.id;
              });
    for (SampleRecord& rec : images) {
      std::sort(rec.mask_paths.begin(), rec.mask_paths.end());
      index.counts[static_cast<int>(rec.label)] += 1;
      index.samples.push_back(std::move(rec));
    }
  }

  if (!any_class_dir) {
    throw EmptyDataset("no class directories under: " + root);
  }
  std::stable_sort(index.samples.begin(), index.samples.end(),
                   [](const SampleRecord& a, const SampleRecord& b) {
                     return static_cast<int>(a.label) < static_cast<int>(b.label);
                   });
  return index;
}

/// Pixelwise OR of all mask files. An empty list yields an all-zero mask of
/// the given dimensions (maskless normal samples).
inline MaskImage merge_masks(const std::vector<std::string>& paths, int width,
                             int height, int threshold = 128) {
  if (paths.empty()) return MaskImage(width, height);

  MaskImage merged(1, 1);
  bool first = true;
  for (const std::string& path : paths) {
    const MaskImage m = binarize(decode_gray(path), threshold);
    if (first) {
      merged = m;
      first = false;
    } else {
      if (m.width != merged.width || m.height != merged.height) {
        throw DimensionMismatch("mask dimensions differ: " + path);
      }
      for (std::size_t i = 0; i < merged.pixels.size(); ++i) {
        merged.pixels[i] = merged.pixels[i] | m.pixels[i];
      }
    }
  }
  merged.source = paths.front();
  return merged;
}

struct Split {
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;       // qualified ids, sorted
  std::vector<std::string> validation_ids;  // qualified ids, sorted
};

/// Per-class 80/20-style partition over qualified ids. Each class list is
/// shuffled by a SplitMix64 stream derived from (seed, class index) and cut
/// at round(train_fraction * N); both resulting id lists are sorted, so the
/// split depends only on (items, seed, fraction). Classes with no samples
/// are skipped; a class that would leave either side empty is an error.
inline Split stratified_split_ids(
    const std::vector<std::pair<std::string, ClassLabel>>& items,
    std::uint64_t seed, double train_fraction = 0.8) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must be in (0, 1)");
  }
  Split split;
  split.seed = seed;
  for (int c = 0; c < kClassCount; ++c) {
    std::vector<std::string> ids;
    for (const auto& [id, label] : items) {
      if (static_cast<int>(label) == c) ids.push_back(id);
    }
    const auto n = static_cast<long>(ids.size());
    if (n == 0) continue;
    const long n_train = std::lround(train_fraction * static_cast<double>(n));
    if (n_train <= 0 || n_train >= n) {
      throw ClassTooSmall(std::string("class '") +
                          class_name(static_cast<ClassLabel>(c)) +
                          "' would get an empty partition");
    }
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(c) + 1));
    rng.shuffle(ids);
    for (long i = 0; i < n; ++i) {
      (i < n_train ? split.train_ids : split.validation_ids)
          .push_back(std::move(ids[static_cast<std::size_t>(i)]));
    }
  }
  if (split.train_ids.empty() || split.validation_ids.empty()) {
    throw ClassTooSmall("dataset too small to split");
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.validation_ids.begin(), split.validation_ids.end());
  return split;
}

inline Split stratified_split(const DatasetIndex& index, std::uint64_t seed,
                              double train_fraction = 0.8) {
  std::vector<std::pair<std::string, ClassLabel>> items;
  items.reserve(index.samples.size());
  for (const SampleRecord& rec : index.samples) {
    items.emplace_back(rec.qualified_id(), rec.label);
  }
  return stratified_split_ids(items, seed, train_fraction);
}

inline nlohmann::json index_to_json(const DatasetIndex& index) {
  nlohmann::json j;
  j["root"] = index.root;
  j["counts"] = {{"normal", index.counts[0]},
                 {"benign", index.counts[1]},
                 {"malignant", index.counts[2]}};
  j["warnings"] = index.warnings;
  nlohmann::json samples = nlohmann::json::array();
  for (const SampleRecord& rec : index.samples) {
    samples.push_back({{"id", rec.id},
                       {"class", class_name(rec.label)},
                       {"image", rec.image_path},
                       {"masks", rec.mask_paths}});
  }
  j["samples"] = std::move(samples);
  return j;
}

inline void write_index_json(const DatasetIndex& index,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << index_to_json(index).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace busimorph
