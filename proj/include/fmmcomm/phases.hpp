#pragma once

// Per-level message plans for the four FMM communication phases.
//
// Global phases exchange a fixed number of cells with a fixed partner set at
// every global level. Local phases exchange the halo of a process's local
// subtree, split geometrically into 6 faces, 12 edges and 8 corners.

#include <optional>
#include <string_view>
#include <vector>

#include "fmmcomm/tree.hpp"

namespace fmmcomm {

enum class PhaseKind { GlobalM2L, GlobalM2M, LocalM2L, LocalP2P };

inline constexpr PhaseKind kAllPhases[] = {
    PhaseKind::GlobalM2L, PhaseKind::GlobalM2M, PhaseKind::LocalM2L,
    PhaseKind::LocalP2P};

/// Wire names: global_m2l, global_m2m, local_m2l, local_p2p.
std::string_view to_string(PhaseKind phase);
std::optional<PhaseKind> parse_phase(std::string_view name);

/// Whether `phase` exchanges data at `level` of `cfg` (possibly empty plans
/// at the top of the global tree still count as applicable).
bool phase_applies(const TreeConfig& cfg, PhaseKind phase, const Level& level);

enum class PartnerClass { Uniform, Face, Edge, Corner };

std::string_view to_string(PartnerClass cls);

struct PartnerGroup {
  PartnerClass cls = PartnerClass::Uniform;
  Count partner_count = 0;
  Count cells_per_partner = 0;
  Count bytes_per_partner = 0;
};

struct PhasePlan {
  PhaseKind phase = PhaseKind::GlobalM2L;
  Level level;
  std::vector<PartnerGroup> groups;
  Count total_sends = 0;
  Count total_cells = 0;
  Count total_bytes = 0;

  bool empty() const { return total_sends == 0; }
  /// Group for a partner class, or nullptr.
  const PartnerGroup* group(PartnerClass cls) const;
};

PhasePlan global_m2l_plan(const TreeConfig& cfg, const Level& level);
PhasePlan global_m2m_plan(const TreeConfig& cfg, const Level& level);
PhasePlan local_m2l_plan(const TreeConfig& cfg, const Level& level);
/// Leaf-level particle halo. Bytes per message are the expected particle
/// payload rounded to the nearest byte.
PhasePlan local_p2p_plan(const TreeConfig& cfg);

/// Dispatches to the plan builder for `phase`.
PhasePlan phase_plan(const TreeConfig& cfg, PhaseKind phase, const Level& level);

/// The M2L plan of a level: global M2L above the local tree, local M2L inside.
PhasePlan m2l_plan(const TreeConfig& cfg, const Level& level);

struct CommStatsRow {
  int level = 0;
  Count cells = 0;
  Count sends = 0;
  Count bytes = 0;

  bool operator==(const CommStatsRow&) const = default;
};

/// M2L statistics for every level of the tree.
std::vector<CommStatsRow> comm_stats(const TreeConfig& cfg);

/// Counts lattice cells in [-layers, 2^i + layers)^3 outside [0, 2^i)^3 by
/// enumeration.
Count brute_force_halo(int i, int layers);

}  // namespace fmmcomm
