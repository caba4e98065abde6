#include "fmmcomm/phases.hpp"

#include <string>

#include "fmmcomm/error.hpp"

namespace fmmcomm {

namespace {

void finalize(PhasePlan& plan) {
  plan.total_sends = plan.total_cells = plan.total_bytes = 0;
  for (const auto& g : plan.groups) {
    plan.total_sends += g.partner_count;
    plan.total_cells += g.partner_count * g.cells_per_partner;
    plan.total_bytes += g.partner_count * g.bytes_per_partner;
  }
}

void require_zone(const Level& level, Zone zone, PhaseKind phase) {
  if (level.zone != zone) {
    throw Error(ErrorCode::WrongPhase,
                std::string(to_string(phase)) + " does not apply at level " +
                    std::to_string(level.index));
  }
}

void require_local_index(const TreeConfig& cfg, const Level& level,
                         PhaseKind phase) {
  require_zone(level, Zone::Local, phase);
  if (level.local_index < 1 || level.local_index > cfg.local_depth() ||
      level.index != cfg.global_depth() + level.local_index - 1) {
    throw Error(ErrorCode::WrongPhase,
                std::string(to_string(phase)) + ": local index " +
                    std::to_string(level.local_index) + " outside [1, " +
                    std::to_string(cfg.local_depth()) + "]");
  }
}

// Rounded expected particle payload of `cells` leaf cells.
Count particle_bytes(const TreeConfig& cfg, Count cells) {
  using u128 = unsigned __int128;
  const u128 numerator = u128{cells} * cfg.particles_per_process() *
                         cfg.values_per_particle() * cfg.precision_bytes();
  const u128 denominator = cells_at_level(cfg.local_depth());
  return static_cast<Count>((numerator + denominator / 2) / denominator);
}

}  // namespace

std::string_view to_string(PhaseKind phase) {
  switch (phase) {
    case PhaseKind::GlobalM2L: return "global_m2l";
    case PhaseKind::GlobalM2M: return "global_m2m";
    case PhaseKind::LocalM2L: return "local_m2l";
    case PhaseKind::LocalP2P: return "local_p2p";
  }
  return "unknown";
}

std::optional<PhaseKind> parse_phase(std::string_view name) {
  for (auto phase : kAllPhases) {
    if (to_string(phase) == name) return phase;
  }
  return std::nullopt;
}

std::string_view to_string(PartnerClass cls) {
  switch (cls) {
    case PartnerClass::Uniform: return "uniform";
    case PartnerClass::Face: return "face";
    case PartnerClass::Edge: return "edge";
    case PartnerClass::Corner: return "corner";
  }
  return "unknown";
}

bool phase_applies(const TreeConfig& cfg, PhaseKind phase, const Level& level) {
  switch (phase) {
    case PhaseKind::GlobalM2L:
    case PhaseKind::GlobalM2M:
      return level.zone == Zone::Global;
    case PhaseKind::LocalM2L:
      return level.zone == Zone::Local;
    case PhaseKind::LocalP2P:
      return level.zone == Zone::Local && level.local_index == cfg.local_depth();
  }
  return false;
}

const PartnerGroup* PhasePlan::group(PartnerClass cls) const {
  for (const auto& g : groups) {
    if (g.cls == cls) return &g;
  }
  return nullptr;
}

PhasePlan global_m2l_plan(const TreeConfig& cfg, const Level& level) {
  require_zone(level, Zone::Global, PhaseKind::GlobalM2L);
  PhasePlan plan{PhaseKind::GlobalM2L, level, {}, 0, 0, 0};
  // Levels 0 and 1 have no well-separated cells.
  if (level.index >= 2) {
    plan.groups.push_back({PartnerClass::Uniform, 26, 8, 8 * cfg.cell_bytes()});
  }
  finalize(plan);
  return plan;
}

PhasePlan global_m2m_plan(const TreeConfig& cfg, const Level& level) {
  require_zone(level, Zone::Global, PhaseKind::GlobalM2M);
  PhasePlan plan{PhaseKind::GlobalM2M, level, {}, 0, 0, 0};
  if (level.index >= 1) {
    plan.groups.push_back({PartnerClass::Uniform, 7, 1, cfg.cell_bytes()});
  }
  finalize(plan);
  return plan;
}

PhasePlan local_m2l_plan(const TreeConfig& cfg, const Level& level) {
  require_local_index(cfg, level, PhaseKind::LocalM2L);
  const int i = level.local_index;
  const Count side = Count{1} << i;
  const Count b = cfg.cell_bytes();
  PhasePlan plan{PhaseKind::LocalM2L, level, {}, 0, 0, 0};
  // Two halo layers: faces are 2 x side x side, edges 2 x 2 x side, corners 2x2x2.
  plan.groups.push_back({PartnerClass::Face, 6, 2 * side * side, 2 * side * side * b});
  plan.groups.push_back({PartnerClass::Edge, 12, 4 * side, 4 * side * b});
  plan.groups.push_back({PartnerClass::Corner, 8, 8, 8 * b});
  finalize(plan);
  return plan;
}

PhasePlan local_p2p_plan(const TreeConfig& cfg) {
  const Level level = cfg.local_level(cfg.local_depth());
  const int i = level.local_index;
  const Count side = Count{1} << i;
  PhasePlan plan{PhaseKind::LocalP2P, level, {}, 0, 0, 0};
  plan.groups.push_back({PartnerClass::Face, 6, side * side,
                         particle_bytes(cfg, side * side)});
  plan.groups.push_back({PartnerClass::Edge, 12, side, particle_bytes(cfg, side)});
  plan.groups.push_back({PartnerClass::Corner, 8, 1, particle_bytes(cfg, 1)});
  finalize(plan);
  return plan;
}

PhasePlan phase_plan(const TreeConfig& cfg, PhaseKind phase, const Level& level) {
  switch (phase) {
    case PhaseKind::GlobalM2L: return global_m2l_plan(cfg, level);
    case PhaseKind::GlobalM2M: return global_m2m_plan(cfg, level);
    case PhaseKind::LocalM2L: return local_m2l_plan(cfg, level);
    case PhaseKind::LocalP2P:
      if (!phase_applies(cfg, phase, level)) {
        throw Error(ErrorCode::WrongPhase,
                    "local_p2p only applies at the leaf level " +
                        std::to_string(cfg.total_levels() - 1));
      }
      return local_p2p_plan(cfg);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown phase");
}

PhasePlan m2l_plan(const TreeConfig& cfg, const Level& level) {
  return level.zone == Zone::Global ? global_m2l_plan(cfg, level)
                                    : local_m2l_plan(cfg, level);
}

std::vector<CommStatsRow> comm_stats(const TreeConfig& cfg) {
  std::vector<CommStatsRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.total_levels()));
  for (int index = 0; index < cfg.total_levels(); ++index) {
    const PhasePlan plan = m2l_plan(cfg, cfg.level(index));
    rows.push_back({index, cells_at_level(index), plan.total_sends,
                    plan.total_bytes});
  }
  return rows;
}

Count brute_force_halo(int i, int layers) {
  if (i < 0 || i > 10 || layers < 1 || layers > 2) {
    throw Error(ErrorCode::InvalidArgument,
                "brute_force_halo supports 0 <= i <= 10 and layers in {1, 2}");
  }
  const long side = 1L << i;
  Count count = 0;
  for (long x = -layers; x < side + layers; ++x) {
    for (long y = -layers; y < side + layers; ++y) {
      for (long z = -layers; z < side + layers; ++z) {
        const bool inside = x >= 0 && x < side && y >= 0 && y < side &&
                            z >= 0 && z < side;
        if (!inside) ++count;
      }
    }
  }
  return count;
}

}  // namespace fmmcomm
