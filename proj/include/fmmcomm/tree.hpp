#pragma once

// Dual global/local octree geometry of a distributed FMM run.
//
// The global tree spans the processes: its leaf level holds at least one cell
// per process. Each process owns a full local octree below that. Levels are
// numbered from the root of the global tree; the first local level carries
// local index i = 1.

#include <array>
#include <cstdint>
#include <optional>

namespace fmmcomm {

using Count = std::uint64_t;
using Rank = std::uint64_t;
using Grid3 = std::array<Count, 3>;

enum class Zone { Global, Local };

struct Level {
  int index = 0;
  Zone zone = Zone::Global;
  int local_index = 0;  // 1..local_depth when zone == Local, 0 otherwise

  bool operator==(const Level&) const = default;
};

/// Smallest depth L with 8^(L-1) >= procs. Throws InvalidArgument for 0.
int global_depth(Count procs);

/// Smallest L >= 1 with 8^L * max_particles_per_leaf >= particles_per_process.
int local_depth(Count particles_per_process, Count max_particles_per_leaf);

/// Balanced split of log2(procs) bits over (x, y, z), extra bits to x first.
/// Throws UnsupportedConfiguration if procs is not a power of two.
Grid3 process_grid(Count procs);

/// 8^level. Throws RangeError once the value no longer fits in 64 bits.
Count cells_at_level(int level);

struct TreeOptions {
  Count max_particles_per_leaf = 16;
  std::optional<int> local_depth_override;
  Count coeffs_per_cell = 56;
  Count precision_bytes = 4;
  Count values_per_particle = 4;
};

class TreeConfig {
 public:
  static TreeConfig make(Count procs, Count particles_per_process,
                         const TreeOptions& options = {});

  Count total_particles() const { return procs_ * particles_per_process_; }
  Count num_processes() const { return procs_; }
  Count particles_per_process() const { return particles_per_process_; }
  int global_depth() const { return global_depth_; }
  int local_depth() const { return local_depth_; }
  int total_levels() const { return global_depth_ + local_depth_; }
  const Grid3& process_grid() const { return grid_; }
  Count coeffs_per_cell() const { return coeffs_per_cell_; }
  Count precision_bytes() const { return precision_bytes_; }
  Count values_per_particle() const { return values_per_particle_; }

  /// Multipole payload of one cell (224 bytes with the defaults).
  Count cell_bytes() const { return coeffs_per_cell_ * precision_bytes_; }

  /// Expected particle count of one local leaf cell (fractional).
  double particles_per_leaf() const;

  /// Throws RangeError when index is outside [0, total_levels).
  Level level(int index) const;
  /// Local-tree level by its local index i in [1, local_depth].
  Level local_level(int i) const;

 private:
  TreeConfig() = default;

  Count procs_ = 1;
  Count particles_per_process_ = 1;
  int global_depth_ = 1;
  int local_depth_ = 1;
  Grid3 grid_{1, 1, 1};
  Count coeffs_per_cell_ = 56;
  Count precision_bytes_ = 4;
  Count values_per_particle_ = 4;
};

}  // namespace fmmcomm
