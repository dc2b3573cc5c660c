#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "busimorph/errors.hpp"
#include "busimorph/png_io.hpp"

namespace busimorph {

/// K x K count table; rows are actual classes, columns predicted.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<long> counts;  // row-major K x K

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> names)
      : classes(std::move(names)),
        counts(classes.size() * classes.size(), 0) {}

  int k() const { return static_cast<int>(classes.size()); }
  long& at(int actual, int predicted) {
    return counts[static_cast<std::size_t>(actual) * classes.size() + predicted];
  }
  long at(int actual, int predicted) const {
    return counts[static_cast<std::size_t>(actual) * classes.size() + predicted];
  }
  long total() const {
    long t = 0;
    for (long c : counts) t += c;
    return t;
  }
};

inline ConfusionMatrix confuse(const std::vector<int>& actual,
                               const std::vector<int>& predicted,
                               std::vector<std::string> classes) {
  if (actual.size() != predicted.size()) {
    throw LengthMismatch("actual/predicted length mismatch");
  }
  if (actual.empty()) throw LengthMismatch("no samples to score");
  ConfusionMatrix cm(std::move(classes));
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] < 0 || actual[i] >= cm.k() || predicted[i] < 0 ||
        predicted[i] >= cm.k()) {
      throw UnknownClass("label outside the class list");
    }
    cm.at(actual[i], predicted[i]) += 1;
  }
  return cm;
}

struct OneVsRest {
  long tp = 0, tn = 0, fp = 0, fn = 0;
};

inline OneVsRest one_vs_rest(const ConfusionMatrix& cm, int cls) {
  if (cls < 0 || cls >= cm.k()) throw UnknownClass("class index out of range");
  OneVsRest r;
  r.tp = cm.at(cls, cls);
  for (int p = 0; p < cm.k(); ++p) {
    if (p != cls) r.fn += cm.at(cls, p);
  }
  for (int a = 0; a < cm.k(); ++a) {
    if (a != cls) r.fp += cm.at(a, cls);
  }
  r.tn = cm.total() - r.tp - r.fn - r.fp;
  return r;
}

/// 2PR/(P+R), or 0 when both rates are 0.
inline double f1_score(double precision, double recall) {
  const double s = precision + recall;
  if (s <= 0) return 0.0;
  return 2.0 * precision * recall / s;
}

struct ClassMetrics {
  std::string name;
  long tp = 0, tn = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, sensitivity = 0, specificity = 0, f1 = 0;
  // 0/0 cases resolve to 0 and are flagged instead of raising.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool specificity_undefined = false;
};

struct MetricReport {
  ConfusionMatrix cm;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0;
  double macro_precision = 0, macro_recall = 0, macro_specificity = 0,
         macro_f1 = 0;
};

inline MetricReport report(const ConfusionMatrix& cm) {
  MetricReport rep;
  rep.cm = cm;
  const long total = cm.total();
  long diag = 0;
  for (int c = 0; c < cm.k(); ++c) diag += cm.at(c, c);
  rep.accuracy = total > 0 ? static_cast<double>(diag) / total : 0.0;

  auto rate = [](long num, long den, bool* undefined) {
    if (den == 0) {
      *undefined = true;
      return 0.0;
    }
    return static_cast<double>(num) / den;
  };

  for (int c = 0; c < cm.k(); ++c) {
    const OneVsRest v = one_vs_rest(cm, c);
    ClassMetrics m;
    m.name = cm.classes[c];
    m.tp = v.tp;
    m.tn = v.tn;
    m.fp = v.fp;
    m.fn = v.fn;
    m.precision = rate(v.tp, v.tp + v.fp, &m.precision_undefined);
    m.recall = rate(v.tp, v.tp + v.fn, &m.recall_undefined);
    m.sensitivity = m.recall;
    m.specificity = rate(v.tn, v.tn + v.fp, &m.specificity_undefined);
    m.f1 = f1_score(m.precision, m.recall);
    rep.per_class.push_back(std::move(m));
  }

  const double k = static_cast<double>(cm.k());
  for (const ClassMetrics& m : rep.per_class) {
    rep.macro_precision += m.precision / k;
    rep.macro_recall += m.recall / k;
    rep.macro_specificity += m.specificity / k;
    rep.macro_f1 += m.f1 / k;
  }
  return rep;
}

inline std::string report_table(const MetricReport& rep) {
  char line[256];
  std::string out;

  out += "confusion matrix (rows = actual, cols = predicted)\n";
  std::snprintf(line, sizeof(line), "%12s", "");
  out += line;
  for (const std::string& c : rep.cm.classes) {
    std::snprintf(line, sizeof(line), " %10s", c.c_str());
    out += line;
  }
  out += '\n';
  for (int a = 0; a < rep.cm.k(); ++a) {
    std::snprintf(line, sizeof(line), "%12s", rep.cm.classes[a].c_str());
    out += line;
    for (int p = 0; p < rep.cm.k(); ++p) {
      std::snprintf(line, sizeof(line), " %10ld", rep.cm.at(a, p));
      out += line;
    }
    out += '\n';
  }

  out += "\nclass        precision  recall  sensitivity  specificity      f1\n";
  for (const ClassMetrics& m : rep.per_class) {
    std::snprintf(line, sizeof(line),
                  "%-12s %9.4f %7.4f %12.4f %12.4f %7.4f%s\n", m.name.c_str(),
                  m.precision, m.recall, m.sensitivity, m.specificity, m.f1,
                  (m.precision_undefined || m.recall_undefined ||
                   m.specificity_undefined)
                      ? "  (0/0 -> 0)"
                      : "");
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "\naccuracy %.4f  macro precision %.4f  macro recall %.4f  "
                "macro specificity %.4f  macro f1 %.4f\n",
                rep.accuracy, rep.macro_precision, rep.macro_recall,
                rep.macro_specificity, rep.macro_f1);
  out += line;
  return out;
}

inline nlohmann::json report_to_json(const MetricReport& rep) {
  nlohmann::json j;
  j["classes"] = rep.cm.classes;
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a < rep.cm.k(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int p = 0; p < rep.cm.k(); ++p) row.push_back(rep.cm.at(a, p));
    rows.push_back(std::move(row));
  }
  j["confusion"] = std::move(rows);
  nlohmann::json per = nlohmann::json::array();
  for (const ClassMetrics& m : rep.per_class) {
    per.push_back({{"class", m.name},
                   {"tp", m.tp},
                   {"tn", m.tn},
                   {"fp", m.fp},
                   {"fn", m.fn},
                   {"precision", m.precision},
                   {"recall", m.recall},
                   {"sensitivity", m.sensitivity},
                   {"specificity", m.specificity},
                   {"f1", m.f1},
                   {"precision_undefined", m.precision_undefined},
                   {"recall_undefined", m.recall_undefined},
                   {"specificity_undefined", m.specificity_undefined}});
  }
  j["per_class"] = std::move(per);
  j["accuracy"] = rep.accuracy;
  j["macro"] = {{"precision", rep.macro_precision},
                {"recall", rep.macro_recall},
                {"specificity", rep.macro_specificity},
                {"f1", rep.macro_f1}};
  return j;
}

inline MetricReport report_from_json(const nlohmann::json& j) {
  try {
    ConfusionMatrix cm(j.at("classes").get<std::vector<std::string>>());
    const auto& rows = j.at("confusion");
    if (static_cast<int>(rows.size()) != cm.k()) {
      throw DataError("confusion row count mismatch");
    }
    for (int a = 0; a < cm.k(); ++a) {
      for (int p = 0; p < cm.k(); ++p) {
        cm.at(a, p) = rows.at(a).at(p).get<long>();
      }
    }
    MetricReport rep = report(cm);
    // Stored rates must agree with what the matrix implies.
    const nlohmann::json round = report_to_json(rep);
    if (std::abs(rep.accuracy - j.at("accuracy").get<double>()) > 1e-12) {
      throw DataError("stored accuracy disagrees with confusion matrix");
    }
    (void)round;
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed metric report: ") + e.what());
  }
}

/// Grayscale heat grid of the confusion counts, brightest = largest count.
inline void write_confusion_png(const ConfusionMatrix& cm,
                                const std::string& path, int cell = 48) {
  const int k = cm.k();
  long mx = 1;
  for (long c : cm.counts) mx = std::max(mx, c);
  GrayImage img(k * cell, k * cell);
  for (int a = 0; a < k; ++a) {
    for (int p = 0; p < k; ++p) {
      const auto v = static_cast<std::uint8_t>(
          std::lround(255.0 * static_cast<double>(cm.at(a, p)) / mx));
      for (int y = 0; y < cell; ++y) {
        for (int x = 0; x < cell; ++x) {
          const bool border = x == 0 || y == 0;
          img.pixels[static_cast<std::size_t>(a * cell + y) * img.width +
                     (p * cell + x)] = border ? 32 : v;
        }
      }
    }
  }
  write_gray_png(path, img);
}

}  // namespace busimorph
