#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "busimorph/imgproc.hpp"
#include "busimorph/png_io.hpp"

using namespace busimorph;

namespace {
std::filesystem::path temp_png(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("binarize thresholds at >=", "[imgproc]") {
  GrayImage zeros(4, 4, 0);
  CHECK(binarize(zeros, 128).foreground_count() == 0);

  GrayImage full(4, 4, 255);
  CHECK(binarize(full, 128).foreground_count() == 16);

  GrayImage checker(4, 4, 0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      if ((x + y) % 2 == 0) checker.at(x, y) = 255;
  CHECK(binarize(checker, 128).foreground_count() == 8);

  GrayImage edge(1, 1, 128);
  CHECK(binarize(edge, 128).foreground_count() == 1);
}

TEST_CASE("binarize is idempotent on its own 0/255 rendering", "[imgproc]") {
  GrayImage g(5, 5, 0);
  g.at(1, 1) = 200;
  g.at(3, 2) = 90;
  for (int threshold : {1, 100, 128, 255}) {
    const MaskImage once = binarize(g, threshold);
    GrayImage rendered(5, 5, 0);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) rendered.at(x, y) = once.at(x, y) ? 255 : 0;
    CHECK(binarize(rendered, threshold) == once);
  }
}

TEST_CASE("nearest neighbor resize", "[imgproc]") {
  MaskImage m(2, 2);
  m.set(1, 0, true);

  CHECK(resize_nearest(m, 2, 2) == m);

  const MaskImage up = resize_nearest(m, 4, 4);
  CHECK(up.foreground_count() == 4);
  CHECK(up.at(2, 0) == 1);
  CHECK(up.at(3, 0) == 1);
  CHECK(up.at(2, 1) == 1);
  CHECK(up.at(3, 1) == 1);

  MaskImage big(500, 500, 1);
  const MaskImage down = resize_nearest(big, 256, 256);
  CHECK(down.foreground_count() == 256 * 256);
}

TEST_CASE("largest component selection", "[imgproc]") {
  MaskImage m(12, 6);
  for (int x = 1; x <= 5; ++x)
    for (int y = 1; y <= 2; ++y) m.set(x, y, true);  // 10 px blob
  m.set(8, 4, true);
  m.set(9, 4, true);
  m.set(9, 5, true);  // 3 px blob

  const MaskImage kept = largest_component(m, Connectivity::Eight);
  CHECK(kept.foreground_count() == 10);
  CHECK(kept.at(8, 4) == 0);

  // Subset of the input foreground.
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (kept.at(x, y)) CHECK(m.at(x, y) == 1);

  MaskImage empty(4, 4);
  CHECK(largest_component(empty, Connectivity::Eight).foreground_count() == 0);

  MaskImage single(4, 4);
  single.set(2, 2, true);
  CHECK(largest_component(single, Connectivity::Four) == single);
}

TEST_CASE("largest component tie breaks on first row-major pixel",
          "[imgproc]") {
  MaskImage m(9, 3);
  m.set(1, 1, true);
  m.set(2, 1, true);
  m.set(6, 0, true);
  m.set(6, 1, true);
  const MaskImage kept = largest_component(m, Connectivity::Four);
  CHECK(kept.foreground_count() == 2);
  // (6,0) precedes (1,1) in row-major order.
  CHECK(kept.at(6, 0) == 1);
  CHECK(kept.at(1, 1) == 0);
}

TEST_CASE("four vs eight connectivity", "[imgproc]") {
  MaskImage m(4, 4);
  m.set(0, 0, true);
  m.set(1, 1, true);
  m.set(2, 2, true);
  CHECK(largest_component(m, Connectivity::Eight).foreground_count() == 3);
  CHECK(largest_component(m, Connectivity::Four).foreground_count() == 1);
}

TEST_CASE("png gray decode follows Rec. 601 luma", "[imgproc][png]") {
  const auto rgb_path = temp_png("busimorph_rgb_test.png");
  RgbImage rgb(2, 1);
  rgb.set(0, 0, 255, 0, 0);
  rgb.set(1, 0, 255, 255, 255);
  write_rgb_png(rgb_path.string(), rgb);
  const GrayImage g = decode_gray(rgb_path.string());
  CHECK(int(g.at(0, 0)) == 76);  // round(0.299 * 255)
  CHECK(int(g.at(1, 0)) == 255);

  const auto gray_path = temp_png("busimorph_gray_test.png");
  GrayImage one(1, 1, 255);
  write_gray_png(gray_path.string(), one);
  CHECK(int(decode_gray(gray_path.string()).at(0, 0)) == 255);

  std::filesystem::remove(rgb_path);
  std::filesystem::remove(gray_path);
}

TEST_CASE("mask png round trip", "[imgproc][png]") {
  const auto path = temp_png("busimorph_mask_test.png");
  MaskImage m(7, 5);
  m.set(2, 2, true);
  m.set(3, 2, true);
  m.set(6, 4, true);
  write_mask_png(path.string(), m);
  const MaskImage back = binarize(decode_gray(path.string()), 128);
  CHECK(back == m);
  std::filesystem::remove(path);
}
