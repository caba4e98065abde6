#include "fmmcomm/tree.hpp"

#include <bit>
#include <string>

#include "fmmcomm/error.hpp"

namespace fmmcomm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::UnsupportedConfiguration: return "unsupported-configuration";
    case ErrorCode::RangeError: return "range-error";
    case ErrorCode::WrongPhase: return "wrong-phase";
    case ErrorCode::TopologyMismatch: return "topology-mismatch";
    case ErrorCode::SizeLimit: return "size-limit";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::DuplicateKey: return "duplicate-key";
    case ErrorCode::NoOverlap: return "no-overlap";
    case ErrorCode::ConfigError: return "config-error";
  }
  return "unknown";
}

int global_depth(Count procs) {
  if (procs == 0) {
    throw Error(ErrorCode::InvalidArgument, "process count must be at least 1");
  }
  // 8^(L-1) >= procs  <=>  3(L-1) >= ceil(log2(procs))
  const int bits = std::bit_width(procs - 1);
  return 1 + (bits + 2) / 3;
}

int local_depth(Count particles_per_process, Count max_particles_per_leaf) {
  if (particles_per_process == 0 || max_particles_per_leaf == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "particle counts for local depth must be at least 1");
  }
  int depth = 1;
  // capacity = 8^depth * max_particles_per_leaf, saturating
  unsigned __int128 capacity =
      static_cast<unsigned __int128>(max_particles_per_leaf) * 8;
  while (capacity < particles_per_process) {
    capacity *= 8;
    ++depth;
  }
  return depth;
}

Grid3 process_grid(Count procs) {
  if (procs == 0 || !std::has_single_bit(procs)) {
    throw Error(ErrorCode::UnsupportedConfiguration,
                "process count " + std::to_string(procs) +
                    " is not a power of two");
  }
  const int bits = std::countr_zero(procs);
  Grid3 grid{};
  for (int d = 0; d < 3; ++d) {
    const int share = bits / 3 + (d < bits % 3 ? 1 : 0);
    grid[d] = Count{1} << share;
  }
  return grid;
}

Count cells_at_level(int level) {
  if (level < 0) {
    throw Error(ErrorCode::InvalidArgument, "level must be non-negative");
  }
  if (3 * level >= 64) {
    throw Error(ErrorCode::RangeError,
                "8^" + std::to_string(level) + " exceeds 64-bit range");
  }
  return Count{1} << (3 * level);
}

TreeConfig TreeConfig::make(Count procs, Count particles_per_process,
                            const TreeOptions& options) {
  if (particles_per_process == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "particles per process must be at least 1");
  }
  if (options.coeffs_per_cell == 0 || options.precision_bytes == 0 ||
      options.values_per_particle == 0) {
    throw Error(ErrorCode::InvalidArgument, "payload constants must be positive");
  }
  TreeConfig cfg;
  cfg.procs_ = procs;
  cfg.particles_per_process_ = particles_per_process;
  cfg.global_depth_ = fmmcomm::global_depth(procs);
  cfg.grid_ = fmmcomm::process_grid(procs);
  if (options.local_depth_override) {
    if (*options.local_depth_override < 1) {
      throw Error(ErrorCode::InvalidArgument, "local depth must be at least 1");
    }
    cfg.local_depth_ = *options.local_depth_override;
  } else {
    cfg.local_depth_ = fmmcomm::local_depth(particles_per_process,
                                            options.max_particles_per_leaf);
  }
  // Leaf cells of the deepest level must stay countable.
  (void)cells_at_level(cfg.total_levels() - 1);
  cfg.coeffs_per_cell_ = options.coeffs_per_cell;
  cfg.precision_bytes_ = options.precision_bytes;
  cfg.values_per_particle_ = options.values_per_particle;
  return cfg;
}

double TreeConfig::particles_per_leaf() const {
  return static_cast<double>(particles_per_process_) /
         static_cast<double>(cells_at_level(local_depth_));
}

Level TreeConfig::level(int index) const {
  if (index < 0 || index >= total_levels()) {
    throw Error(ErrorCode::RangeError,
                "level " + std::to_string(index) + " outside [0, " +
                    std::to_string(total_levels()) + ")");
  }
  if (index < global_depth_) return Level{index, Zone::Global, 0};
  return Level{index, Zone::Local, index - global_depth_ + 1};
}

Level TreeConfig::local_level(int i) const {
  if (i < 1 || i > local_depth_) {
    throw Error(ErrorCode::WrongPhase,
                "local level " + std::to_string(i) + " outside [1, " +
                    std::to_string(local_depth_) + "]");
  }
  return level(global_depth_ + i - 1);
}

}  // namespace fmmcomm
