#pragma once

// Torus interconnects and the placement of FMM processes onto them.
//
// Ranks are laid out on the process grid in Morton order, the leaf order of
// the global octree. Consecutive ranks sharing a node form a fold block of
// the process grid; the resulting node grid is embedded into the torus either
// directly (3-D torus large enough in every dimension) or by splitting the
// node-grid coordinate bits over the torus dimensions, x first.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "fmmcomm/phases.hpp"
#include "fmmcomm/tree.hpp"

namespace fmmcomm {

using NodeCoord = std::vector<int>;
using Offset3 = std::array<int, 3>;

class TorusTopology {
 public:
  /// Throws InvalidArgument for an empty list or an extent < 1.
  static TorusTopology make(std::vector<int> dims);
  /// Parses "8x4x4" or "4x4x4x4x2".
  static TorusTopology parse(std::string_view text);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  Count node_count() const;

  /// Linear node index, x fastest.
  Count index_of(const NodeCoord& c) const;
  NodeCoord coord_of(Count index) const;
  /// Throws InvalidArgument when c has the wrong rank or is out of range.
  void check(const NodeCoord& c) const;

  /// Maximum possible hop distance, sum of floor(extent / 2).
  int diameter() const;

  std::string to_string() const;

  bool operator==(const TorusTopology&) const = default;

 private:
  std::vector<int> dims_;
};

/// Wrapped Manhattan distance.
int hop_distance(const TorusTopology& t, const NodeCoord& a, const NodeCoord& b);

/// Fold factors for `ranks_per_node` ranks per node: repeatedly halve the
/// node-grid dimension with the largest extent, ties to the one folded least,
/// then to x.
Grid3 default_fold(const Grid3& process_grid, Count ranks_per_node);

class RankMapping {
 public:
  /// Throws UnsupportedConfiguration unless every extent and fold factor is a
  /// power of two, each fold factor divides its extent, and their product is
  /// ranks_per_node.
  static RankMapping make(const Grid3& process_grid, Count ranks_per_node,
                          const std::optional<Grid3>& fold = std::nullopt);

  const Grid3& process_grid() const { return grid_; }
  Count ranks_per_node() const { return ranks_per_node_; }
  const Grid3& fold() const { return fold_; }
  Count num_ranks() const { return grid_[0] * grid_[1] * grid_[2]; }
  /// Process grid divided by the fold factors.
  Grid3 node_grid() const;

  Grid3 grid_coord(Rank rank) const;
  Rank rank_at(const Grid3& coord) const;
  /// Node-grid coordinate (fold block) of a process-grid coordinate.
  Grid3 node_grid_coord(const Grid3& coord) const;

 private:
  RankMapping() = default;

  Grid3 grid_{1, 1, 1};
  Count ranks_per_node_ = 1;
  Grid3 fold_{1, 1, 1};
  std::array<int, 3> bits_{0, 0, 0};
};

enum class Embedding { Direct, BitSplit };

std::string_view to_string(Embedding e);

/// A rank mapping bound to a torus.
class Placement {
 public:
  /// Throws TopologyMismatch when the node grid does not fit the torus.
  static Placement make(const RankMapping& mapping, const TorusTopology& torus);

  const RankMapping& mapping() const { return mapping_; }
  const TorusTopology& torus() const { return torus_; }
  Embedding embedding() const { return embedding_; }

  NodeCoord node_of(Rank rank) const;
  NodeCoord node_of_grid(const Grid3& coord) const;

 private:
  Placement(RankMapping m, TorusTopology t) : mapping_(m), torus_(std::move(t)) {}

  struct BitSlot {
    int torus_dim;
    int position;
  };

  RankMapping mapping_;
  TorusTopology torus_;
  Embedding embedding_ = Embedding::Direct;
  // slots_[d][j]: where bit j of node-grid coordinate d lands (BitSplit only).
  std::array<std::vector<BitSlot>, 3> slots_;
};

NodeCoord map_rank_to_node(const RankMapping& m, const TorusTopology& t, Rank rank);

/// Torus shaped like the node grid (the identity embedding).
TorusTopology identity_torus(const RankMapping& m);

/// Per-dimension rank separation between representative processes of
/// adjacent cells at a global level: max(1, G_d / 2^level), and 1 at the root.
Grid3 global_partner_stride(const TreeConfig& cfg, const Level& level);

struct PartnerOffset {
  Offset3 offset;
  PartnerClass cls;
};

/// Partner offsets in cell units for a phase, as seen from `coord`.
/// M2L and P2P: the 26 neighbors. M2M: the 7 siblings in the parent octant.
std::vector<PartnerOffset> partner_offsets(const TreeConfig& cfg,
                                           const PhasePlan& plan,
                                           const Grid3& coord);

/// Process-grid stride between cells of the plan's level.
Grid3 plan_stride(const TreeConfig& cfg, const PhasePlan& plan);

struct PartnerMessage {
  Offset3 offset{0, 0, 0};
  PartnerClass cls = PartnerClass::Uniform;
  Rank partner = 0;
  Count bytes = 0;
  int hops = 0;      // h
  int min_hops = 0;  // h_m: torus dimensions crossed, 0 on the same node

  int extra_hops() const { return hops - min_hops; }
};

struct HopAnnotatedPlan {
  PhasePlan plan;
  Rank rank = 0;
  std::vector<PartnerMessage> messages;

  double mean_hops() const;
  double mean_extra_hops() const;
};

HopAnnotatedPlan annotate_hops(const TreeConfig& cfg, const PhasePlan& plan,
                               const Placement& placement, Rank rank);

HopAnnotatedPlan annotate_hops(const TreeConfig& cfg, const PhasePlan& plan,
                               const RankMapping& m, const TorusTopology& t,
                               Rank rank);

inline constexpr Count kPatternRankLimit = Count{1} << 16;

struct PatternEntry {
  Rank src = 0;
  Rank dst = 0;
  Count bytes = 0;

  bool operator==(const PatternEntry&) const = default;
};

/// Sparse rank-to-rank byte matrix, entries sorted by (src, dst).
struct PatternMatrix {
  Count ranks = 0;
  std::vector<PatternEntry> entries;

  Count row_sum(Rank src) const;
  Count row_nonzeros(Rank src) const;
};

/// Throws SizeLimit above kPatternRankLimit ranks.
PatternMatrix pattern_matrix(const TreeConfig& cfg, const Level& level,
                             PhaseKind phase, const RankMapping& m);

}  // namespace fmmcomm
