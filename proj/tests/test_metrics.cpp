#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "busimorph/errors.hpp"
#include "busimorph/metrics.hpp"
#include "busimorph/png_io.hpp"
#include "busimorph/rng.hpp"
#include "oracles.hpp"

using namespace busimorph;
using Catch::Approx;

TEST_CASE("confusion matrix tallies pairs by row and column", "[metrics]") {
  const std::vector<int> actual = {0, 0, 1, 1, 2, 2, 2};
  const std::vector<int> predicted = {0, 1, 1, 1, 2, 0, 2};
  const ConfusionMatrix cm =
      confuse(actual, predicted, {"normal", "benign", "malignant"});
  CHECK(cm.k() == 3);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(0, 1) == 1);
  CHECK(cm.at(0, 2) == 0);
  CHECK(cm.at(1, 1) == 2);
  CHECK(cm.at(1, 0) == 0);
  CHECK(cm.at(2, 0) == 1);
  CHECK(cm.at(2, 2) == 2);
  CHECK(cm.total() == 7);
}

TEST_CASE("confuse validates its inputs", "[metrics]") {
  CHECK_THROWS_AS(confuse({0, 1}, {0}, {"a", "b"}), LengthMismatch);
  CHECK_THROWS_AS(confuse({}, {}, {"a", "b"}), LengthMismatch);
  CHECK_THROWS_AS(confuse({0, 2}, {0, 0}, {"a", "b"}), UnknownClass);
  CHECK_THROWS_AS(confuse({0, 0}, {0, -1}, {"a", "b"}), UnknownClass);
}

TEST_CASE("one_vs_rest reduces a 2x2 table the textbook way", "[metrics]") {
  ConfusionMatrix cm({"pos", "neg"});
  cm.at(0, 0) = 5;
  cm.at(0, 1) = 1;
  cm.at(1, 0) = 2;
  cm.at(1, 1) = 3;
  const OneVsRest v = one_vs_rest(cm, 0);
  CHECK(v.tp == 5);
  CHECK(v.fn == 1);
  CHECK(v.fp == 2);
  CHECK(v.tn == 3);
  CHECK_THROWS_AS(one_vs_rest(cm, 2), UnknownClass);
  CHECK_THROWS_AS(one_vs_rest(cm, -1), UnknownClass);
}

TEST_CASE("one_vs_rest partitions every sample exactly once",
          "[metrics][property]") {
  SplitMix64 rng(2026);
  std::vector<int> actual(1000), predicted(1000);
  for (int& v : actual) v = static_cast<int>(rng.next_below(3));
  for (int& v : predicted) v = static_cast<int>(rng.next_below(3));
  const ConfusionMatrix cm = confuse(actual, predicted, {"n", "b", "m"});

  for (int c = 0; c < 3; ++c) {
    const OneVsRest v = one_vs_rest(cm, c);
    const oracles::Counts ref =
        oracles::count_one_vs_rest(actual, predicted, c);
    CHECK(v.tp == ref.tp);
    CHECK(v.tn == ref.tn);
    CHECK(v.fp == ref.fp);
    CHECK(v.fn == ref.fn);
    CHECK(v.tp + v.tn + v.fp + v.fn == cm.total());
  }
  for (int c = 0; c < 3; ++c) {
    long row = 0;
    for (int p = 0; p < 3; ++p) row += cm.at(c, p);
    long freq = 0;
    for (int a : actual) freq += a == c;
    CHECK(row == freq);
  }
}

TEST_CASE("perfect predictions score ones across the board", "[metrics]") {
  ConfusionMatrix cm({"n", "b", "m"});
  cm.at(0, 0) = 10;
  cm.at(1, 1) = 4;
  cm.at(2, 2) = 6;
  const MetricReport rep = report(cm);
  CHECK(rep.accuracy == 1.0);
  for (const ClassMetrics& m : rep.per_class) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.specificity == 1.0);
    CHECK(m.f1 == 1.0);
    CHECK_FALSE(m.precision_undefined);
    CHECK_FALSE(m.recall_undefined);
  }
  CHECK(rep.macro_f1 == Approx(1.0).margin(1e-12));
}

TEST_CASE("absent classes resolve 0/0 rates to flagged zeros", "[metrics]") {
  ConfusionMatrix cm({"n", "b", "m"});
  cm.at(0, 0) = 3;
  cm.at(1, 1) = 2;
  // Class 2 never occurs, actual or predicted.
  const MetricReport rep = report(cm);
  const ClassMetrics& m = rep.per_class[2];
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.precision_undefined);
  CHECK(m.recall_undefined);
  CHECK_FALSE(m.specificity_undefined);
  CHECK(m.specificity == 1.0);
  CHECK(report_table(rep).find("(0/0 -> 0)") != std::string::npos);
}

TEST_CASE("f1 is the harmonic mean of precision and recall", "[metrics]") {
  CHECK(f1_score(0.9187, 0.8802) == Approx(0.8990).margin(5e-5));
  CHECK(f1_score(0.0, 0.0) == 0.0);
  CHECK(f1_score(1.0, 0.0) == 0.0);
  CHECK(f1_score(0.5, 0.5) == Approx(0.5).margin(1e-15));
}

TEST_CASE("recall and sensitivity are the same number", "[metrics]") {
  SplitMix64 rng(7);
  std::vector<int> actual(60), predicted(60);
  for (int& v : actual) v = static_cast<int>(rng.next_below(3));
  for (int& v : predicted) v = static_cast<int>(rng.next_below(3));
  const MetricReport rep = report(confuse(actual, predicted, {"n", "b", "m"}));
  for (const ClassMetrics& m : rep.per_class) {
    CHECK(m.recall == m.sensitivity);
  }
}

TEST_CASE("macro averages ignore class ordering", "[metrics][property]") {
  SplitMix64 rng(11);
  std::vector<int> actual(200), predicted(200);
  for (int& v : actual) v = static_cast<int>(rng.next_below(3));
  for (int& v : predicted) v = static_cast<int>(rng.next_below(3));

  const MetricReport base =
      report(confuse(actual, predicted, {"n", "b", "m"}));

  // Relabel so old class c lands at index perm[c].
  const int perm[3] = {2, 0, 1};
  std::vector<int> actual_p(actual.size()), predicted_p(predicted.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    actual_p[i] = perm[actual[i]];
    predicted_p[i] = perm[predicted[i]];
  }
  const MetricReport moved =
      report(confuse(actual_p, predicted_p, {"b", "m", "n"}));

  CHECK(moved.accuracy == Approx(base.accuracy).margin(1e-12));
  CHECK(moved.macro_precision == Approx(base.macro_precision).margin(1e-12));
  CHECK(moved.macro_recall == Approx(base.macro_recall).margin(1e-12));
  CHECK(moved.macro_specificity ==
        Approx(base.macro_specificity).margin(1e-12));
  CHECK(moved.macro_f1 == Approx(base.macro_f1).margin(1e-12));
}

TEST_CASE("report json round trips and rejects tampering", "[metrics][io]") {
  ConfusionMatrix cm({"n", "b", "m"});
  cm.at(0, 0) = 12;
  cm.at(0, 1) = 2;
  cm.at(1, 1) = 9;
  cm.at(1, 2) = 1;
  cm.at(2, 0) = 1;
  cm.at(2, 2) = 14;
  const MetricReport rep = report(cm);

  const nlohmann::json j = report_to_json(rep);
  const MetricReport back = report_from_json(j);
  CHECK(back.accuracy == Approx(rep.accuracy).margin(1e-12));
  CHECK(back.macro_f1 == Approx(rep.macro_f1).margin(1e-12));
  CHECK(back.cm.counts == rep.cm.counts);
  CHECK(back.cm.classes == rep.cm.classes);

  nlohmann::json bad = j;
  bad["accuracy"] = rep.accuracy + 0.25;
  CHECK_THROWS_AS(report_from_json(bad), DataError);

  nlohmann::json missing = j;
  missing.erase("confusion");
  CHECK_THROWS_AS(report_from_json(missing), DataError);
}

TEST_CASE("confusion heat grid is a readable png", "[metrics][io]") {
  namespace fs = std::filesystem;
  ConfusionMatrix cm({"n", "b", "m"});
  cm.at(0, 0) = 20;
  cm.at(1, 1) = 10;
  cm.at(2, 2) = 5;
  cm.at(2, 0) = 3;
  const fs::path path = fs::temp_directory_path() / "busimorph_cm_test.png";
  write_confusion_png(cm, path.string(), 16);

  const GrayImage img = decode_gray(path.string());
  CHECK(img.width == 3 * 16);
  CHECK(img.height == 3 * 16);
  // Cell centers: the largest count renders brightest.
  CHECK(static_cast<int>(img.at(8, 8)) == 255);
  CHECK(static_cast<int>(img.at(8 + 16, 8)) < 255);
  fs::remove(path);
}
