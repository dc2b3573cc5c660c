#include <catch2/catch_amalgamated.hpp>

#include "busimorph/errors.hpp"
#include "busimorph/skeleton.hpp"
#include "busimorph/synth.hpp"
#include "oracles.hpp"

using namespace busimorph;

TEST_CASE("already thin line survives unchanged", "[skeleton]") {
  MaskImage m(26, 5);
  for (int x = 3; x < 23; ++x) m.set(x, 2, true);
  CHECK(skeleton_size(m) == 20);
  CHECK(thin_mask(m) == m);
}

TEST_CASE("empty mask rejected", "[skeleton]") {
  MaskImage m(8, 8);
  CHECK_THROWS_AS(skeleton_size(m), EmptyMask);
}

TEST_CASE("filled square matches the table-driven oracle", "[skeleton]") {
  for (int n : {5, 8, 13}) {
    MaskImage m(n + 6, n + 6);
    for (int y = 3; y < 3 + n; ++y)
      for (int x = 3; x < 3 + n; ++x) m.set(x, y, true);
    const MaskImage ours = thin_mask(m);
    const MaskImage ref = oracles::lut_thin(m);
    CHECK(ours == ref);
    CHECK(skeleton_size(m) == oracles::pixel_area(ref));
  }
}

TEST_CASE("synthetic blobs match the oracle bit for bit",
          "[skeleton][property]") {
  for (std::uint64_t seed : {3u, 9u, 27u}) {
    ShapeSpec spec;
    spec.kind = ShapeKind::Star;
    spec.canvas_w = spec.canvas_h = 96;
    spec.a = 30;
    spec.lobes = 5 + int(seed % 3);
    spec.depth = 0.5;
    spec.jitter = 0.05;
    spec.seed = seed;
    const MaskImage m = render(spec);
    const MaskImage ours = thin_mask(m);
    CHECK(ours == oracles::lut_thin(m));

    // Thinning never adds pixels.
    for (int y = 0; y < m.height; ++y)
      for (int x = 0; x < m.width; ++x)
        if (ours.at(x, y)) CHECK(m.at(x, y) == 1);
  }
}

TEST_CASE("spiky outline has the larger skeleton", "[skeleton]") {
  ShapeSpec disk;
  disk.kind = ShapeKind::Disk;
  disk.canvas_w = disk.canvas_h = 128;
  disk.a = 40;

  ShapeSpec star = disk;
  star.kind = ShapeKind::Star;
  star.lobes = 6;
  star.depth = 0.6;

  CHECK(skeleton_size(render(disk)) < skeleton_size(render(star)));
}
