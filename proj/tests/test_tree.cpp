#include <doctest.h>

#include <algorithm>

#include "fmmcomm/error.hpp"
#include "fmmcomm/tree.hpp"

using namespace fmmcomm;

TEST_CASE("global depth follows the smallest covering octree level") {
  CHECK(global_depth(128) == 4);
  CHECK(global_depth(1024) == 5);
  CHECK(global_depth(8192) == 6);
  CHECK(global_depth(1) == 1);
  CHECK(global_depth(512) == 4);
  CHECK(global_depth(513) == 5);
  CHECK(global_depth(8) == 2);
  CHECK(global_depth(9) == 3);
}

TEST_CASE("global depth rejects zero processes") {
  try {
    (void)global_depth(0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("global depth on powers of eight puts one cell per process at the leaf") {
  Count p = 1;
  for (int k = 0; k <= 20; ++k, p *= 8) {
    CAPTURE(k);
    const int depth = global_depth(p);
    CHECK(depth == k + 1);
    CHECK(cells_at_level(depth - 1) == p);
  }
}

TEST_CASE("global depth is the smallest level with 8^(L-1) >= P") {
  for (Count p = 1; p <= 5000; ++p) {
    const int depth = global_depth(p);
    CHECK(cells_at_level(depth - 1) >= p);
    if (depth >= 2) CHECK(cells_at_level(depth - 2) < p);
    if (p > 1) CHECK(depth >= global_depth(p - 1));
  }
}

TEST_CASE("local depth") {
  CHECK(local_depth(62500, 16) == 4);
  CHECK(local_depth(8, 16) == 1);
  CHECK(local_depth(4096 * 16, 16) == 4);
  CHECK(local_depth(4096 * 16 + 1, 16) == 5);
  CHECK(local_depth(1, 1) == 1);
  CHECK_THROWS_AS((void)local_depth(0, 16), Error);
  CHECK_THROWS_AS((void)local_depth(10, 0), Error);

  int previous = 1;
  for (Count ppp = 1; ppp < 200000; ppp += 97) {
    const int d = local_depth(ppp, 16);
    CHECK(d >= previous);
    previous = d;
  }
}

TEST_CASE("process grid splits bits evenly with extras to x") {
  CHECK(process_grid(8192) == Grid3{32, 16, 16});
  CHECK(process_grid(8) == Grid3{2, 2, 2});
  CHECK(process_grid(128) == Grid3{8, 4, 4});
  CHECK(process_grid(1) == Grid3{1, 1, 1});
  CHECK(process_grid(256) == Grid3{8, 8, 4});

  for (int k = 0; k <= 30; ++k) {
    const Count p = Count{1} << k;
    const Grid3 g = process_grid(p);
    CHECK(g[0] * g[1] * g[2] == p);
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    CHECK(*hi <= 2 * *lo);
    CHECK(g[0] >= g[1]);
    CHECK(g[1] >= g[2]);
  }
}

TEST_CASE("process grid rejects non-powers of two") {
  for (Count p : {Count{0}, Count{3}, Count{12}, Count{1000}}) {
    try {
      (void)process_grid(p);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedConfiguration);
    }
  }
}

TEST_CASE("cells at level") {
  CHECK(cells_at_level(0) == 1);
  CHECK(cells_at_level(7) == 2097152);
  CHECK(cells_at_level(9) == 134217728);
  CHECK(cells_at_level(21) == (Count{1} << 63));
  try {
    (void)cells_at_level(22);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RangeError);
  }
}

TEST_CASE("tree layouts of the three benchmark runs") {
  const std::pair<Count, std::pair<int, int>> runs[] = {
      {128, {4, 4}}, {1024, {5, 4}}, {8192, {6, 4}}};
  for (const auto& [procs, depths] : runs) {
    const auto cfg = TreeConfig::make(procs, 62500);
    CHECK(cfg.global_depth() == depths.first);
    CHECK(cfg.local_depth() == depths.second);
    CHECK(cfg.total_levels() == depths.first + depths.second);
    CHECK(cfg.cell_bytes() == 224);
    CHECK(cfg.total_particles() == procs * 62500);
  }
}

TEST_CASE("levels carry their zone and local index") {
  const auto cfg = TreeConfig::make(128, 62500);
  for (int index = 0; index < cfg.total_levels(); ++index) {
    const Level l = cfg.level(index);
    CHECK(l.index == index);
    if (index < cfg.global_depth()) {
      CHECK(l.zone == Zone::Global);
    } else {
      CHECK(l.zone == Zone::Local);
      CHECK(l.local_index == index - cfg.global_depth() + 1);
    }
  }
  CHECK(cfg.local_level(1).index == 4);
  CHECK(cfg.local_level(4).index == 7);
  CHECK_THROWS_AS((void)cfg.level(8), Error);
  CHECK_THROWS_AS((void)cfg.local_level(0), Error);
}

TEST_CASE("local depth override bypasses derivation") {
  TreeOptions options;
  options.local_depth_override = 2;
  const auto cfg = TreeConfig::make(64, 62500, options);
  CHECK(cfg.local_depth() == 2);
  CHECK(cfg.particles_per_leaf() == doctest::Approx(62500.0 / 64.0));

  options.local_depth_override = 0;
  CHECK_THROWS_AS((void)TreeConfig::make(64, 62500, options), Error);
}
