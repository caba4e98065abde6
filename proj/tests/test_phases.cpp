#include <doctest.h>

#include <cmath>

#include "fmmcomm/error.hpp"
#include "fmmcomm/phases.hpp"
#include "oracles.hpp"

using namespace fmmcomm;

namespace {

Count pow_int(Count base, int e) {
  Count r = 1;
  while (e-- > 0) r *= base;
  return r;
}

void check_wrong_phase(auto&& fn) {
  try {
    fn();
    FAIL("expected wrong-phase error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongPhase);
  }
}

}  // namespace

TEST_CASE("global M2L plan") {
  const auto cfg = TreeConfig::make(128, 62500);

  const auto l2 = global_m2l_plan(cfg, cfg.level(2));
  CHECK(l2.total_sends == 26);
  CHECK(l2.total_cells == 26 * 8);
  CHECK(l2.total_bytes == 46592);

  const auto l3 = global_m2l_plan(cfg, cfg.level(3));
  REQUIRE(l3.groups.size() == 1);
  CHECK(l3.groups[0].cls == PartnerClass::Uniform);
  CHECK(l3.groups[0].bytes_per_partner == 1792);

  for (int index : {0, 1}) {
    const auto p = global_m2l_plan(cfg, cfg.level(index));
    CHECK(p.empty());
    CHECK(p.total_bytes == 0);
  }
  check_wrong_phase([&] { (void)global_m2l_plan(cfg, cfg.level(4)); });
}

TEST_CASE("global M2L traffic is identical at every level and process count") {
  for (int k = 3; k <= 20; ++k) {
    const auto cfg = TreeConfig::make(Count{1} << k, 62500);
    for (int index = 2; index < cfg.global_depth(); ++index) {
      const auto p = global_m2l_plan(cfg, cfg.level(index));
      CHECK(p.total_bytes == 46592);
      CHECK(p.total_sends == 26);
    }
  }
}

TEST_CASE("global M2M plan") {
  const auto cfg = TreeConfig::make(8192, 62500);
  const auto l3 = global_m2m_plan(cfg, cfg.level(3));
  CHECK(l3.total_sends == 7);
  CHECK(l3.total_cells == 7);
  CHECK(l3.total_bytes == 1568);

  const auto l1 = global_m2m_plan(cfg, cfg.level(1));
  CHECK(l1.total_sends == 7);
  CHECK(l1.total_cells == 7);

  CHECK(global_m2m_plan(cfg, cfg.level(0)).total_sends == 0);
  check_wrong_phase([&] { (void)global_m2m_plan(cfg, cfg.level(6)); });
}

TEST_CASE("local M2L plan") {
  const auto cfg = TreeConfig::make(128, 62500);
  const auto i1 = local_m2l_plan(cfg, cfg.local_level(1));
  CHECK(i1.total_cells == 208);
  CHECK(i1.total_bytes == 46592);
  CHECK(i1.total_sends == 26);

  const auto i2 = local_m2l_plan(cfg, cfg.local_level(2));
  CHECK(i2.total_cells == 448);
  CHECK(i2.total_bytes == 100352);

  const auto i4 = local_m2l_plan(cfg, cfg.local_level(4));
  CHECK(i4.total_cells == 3904);
  CHECK(i4.total_bytes == 874496);

  const auto i3 = local_m2l_plan(cfg, cfg.local_level(3));
  REQUIRE(i3.group(PartnerClass::Face) != nullptr);
  CHECK(i3.group(PartnerClass::Face)->cells_per_partner == 128);
  CHECK(i3.total_cells == 1216);

  check_wrong_phase([&] { (void)local_m2l_plan(cfg, cfg.level(3)); });
  Level bogus{9, Zone::Local, 6};
  check_wrong_phase([&] { (void)local_m2l_plan(cfg, bogus); });
}

TEST_CASE("local M2L classes match enumerated halo directions") {
  for (int i = 1; i <= 6; ++i) {
    CAPTURE(i);
    TreeOptions options;
    options.local_depth_override = i;
    const auto cfg = TreeConfig::make(8, 62500, options);
    const auto plan = local_m2l_plan(cfg, cfg.local_level(i));
    const auto by_dir = oracle::halo_by_direction(i, 2);
    CHECK(by_dir.size() == 26);
    for (const auto& [dir, cells] : by_dir) {
      const PartnerClass cls = oracle::direction_order(dir) == 1   ? PartnerClass::Face
                               : oracle::direction_order(dir) == 2 ? PartnerClass::Edge
                                                                   : PartnerClass::Corner;
      REQUIRE(plan.group(cls) != nullptr);
      CHECK(plan.group(cls)->cells_per_partner == cells);
    }
  }
}

TEST_CASE("local P2P plan") {
  const auto cfg = TreeConfig::make(128, 62500);
  const auto p = local_p2p_plan(cfg);
  CHECK(p.level.index == 7);
  CHECK(p.level.local_index == 4);
  CHECK(p.total_sends == 26);
  CHECK(p.total_cells == 1736);
  CHECK(p.total_cells == oracle::brute_force_total(4, 1));
  // Frozen from the enumerated halo and per-cell expected payload:
  // faces 256 cells -> 62500 B, edges 16 -> 3906 B, corners 1 -> 244 B.
  CHECK(p.group(PartnerClass::Face)->bytes_per_partner == 62500);
  CHECK(p.group(PartnerClass::Edge)->bytes_per_partner == 3906);
  CHECK(p.group(PartnerClass::Corner)->bytes_per_partner == 244);
  CHECK(p.total_bytes == 423824);

  const auto by_dir = oracle::halo_by_direction(4, 1);
  for (const auto& [dir, cells] : by_dir) {
    const int order = oracle::direction_order(dir);
    const auto* g = p.group(order == 1 ? PartnerClass::Face
                            : order == 2 ? PartnerClass::Edge
                                         : PartnerClass::Corner);
    CHECK(g->cells_per_partner == cells);
    CHECK(g->bytes_per_partner == oracle::particle_payload(cells, 62500, 4, 4, 4));
  }

  TreeOptions options;
  options.local_depth_override = 1;
  const auto shallow = local_p2p_plan(TreeConfig::make(8, 64, options));
  CHECK(shallow.total_cells == 56);
}

TEST_CASE("phase applicability") {
  const auto cfg = TreeConfig::make(128, 62500);
  CHECK(phase_applies(cfg, PhaseKind::GlobalM2L, cfg.level(0)));
  CHECK_FALSE(phase_applies(cfg, PhaseKind::GlobalM2L, cfg.level(4)));
  CHECK(phase_applies(cfg, PhaseKind::LocalM2L, cfg.level(4)));
  CHECK_FALSE(phase_applies(cfg, PhaseKind::LocalP2P, cfg.level(6)));
  CHECK(phase_applies(cfg, PhaseKind::LocalP2P, cfg.level(7)));
  check_wrong_phase([&] { (void)phase_plan(cfg, PhaseKind::LocalP2P, cfg.level(6)); });
  CHECK(parse_phase("local_p2p") == PhaseKind::LocalP2P);
  CHECK_FALSE(parse_phase("p2p").has_value());
}

TEST_CASE("partition identities for the halo classes") {
  for (int i = 1; i <= 10; ++i) {
    const Count side = Count{1} << i;
    const Count m2l = pow_int(side + 4, 3) - pow_int(8, i);
    const Count p2p = pow_int(side + 2, 3) - pow_int(8, i);
    CHECK(6 * (2 * pow_int(4, i)) + 12 * (4 * side) + 8 * 8 == m2l);
    CHECK(6 * pow_int(4, i) + 12 * side + 8 == p2p);

    TreeOptions options;
    options.local_depth_override = i;
    const auto cfg = TreeConfig::make(8, 1, options);
    CHECK(local_m2l_plan(cfg, cfg.local_level(i)).total_cells == m2l);
    CHECK(local_p2p_plan(cfg).total_cells == p2p);
  }
}

TEST_CASE("halo surface-to-volume ratio") {
  for (int i = 7; i <= 20; ++i) {
    const double side = std::ldexp(1.0, i);
    const double halo = (side + 4) * (side + 4) * (side + 4) - side * side * side;
    const double ratio = halo / (side * side);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 13.0);
  }
}

TEST_CASE("brute-force halo enumeration") {
  CHECK(brute_force_halo(1, 2) == 208);
  CHECK(brute_force_halo(0, 1) == 26);
  CHECK(brute_force_halo(4, 1) == 1736);
  for (int i = 1; i <= 6; ++i) {
    TreeOptions options;
    options.local_depth_override = i;
    const auto cfg = TreeConfig::make(8, 1, options);
    CHECK(brute_force_halo(i, 2) == local_m2l_plan(cfg, cfg.local_level(i)).total_cells);
    CHECK(brute_force_halo(i, 1) == local_p2p_plan(cfg).total_cells);
  }
  CHECK_THROWS_AS((void)brute_force_halo(3, 3), Error);
  CHECK_THROWS_AS((void)brute_force_halo(-1, 1), Error);
}

TEST_CASE("comm stats reproduce the benchmark tables") {
  const auto p128 = comm_stats(TreeConfig::make(128, 62500));
  const Count bytes128[] = {0, 0, 46592, 46592, 46592, 100352, 272384, 874496};
  REQUIRE(p128.size() == 8);
  for (int l = 0; l < 8; ++l) {
    CHECK(p128[l].level == l);
    CHECK(p128[l].cells == pow_int(8, l));
    CHECK(p128[l].sends == (l < 2 ? 0 : 26));
    CHECK(p128[l].bytes == bytes128[l]);
  }

  const auto p8192 = comm_stats(TreeConfig::make(8192, 62500));
  REQUIRE(p8192.size() == 10);
  CHECK(p8192.back().bytes == 874496);
  CHECK(p8192.back().cells == 134217728);

  const auto p1024 = comm_stats(TreeConfig::make(1024, 62500));
  REQUIRE(p1024.size() == 9);
  for (int l = 2; l < 9; ++l) CHECK(p1024[l].sends == 26);
}

TEST_CASE("every traffic-bearing level has 26 sends") {
  for (int k = 0; k <= 24; ++k) {
    for (const auto& row : comm_stats(TreeConfig::make(Count{1} << k, 62500))) {
      if (row.bytes != 0) CHECK(row.sends == 26);
    }
  }
}
