#pragma once

// Test-only reference computations. None of these call into the library's
// plan, topology or model code paths.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Direction = std::array<int, 3>;

/// Halo cells around a 2^i cube with `layers` layers, grouped by the
/// direction (sign vector) of the neighbor that owns them. Enumerated.
std::map<Direction, std::uint64_t> halo_by_direction(int i, int layers);

/// Total halo cells from halo_by_direction.
std::uint64_t brute_force_total(int i, int layers);

/// Number of nonzero components of a direction: 1 face, 2 edge, 3 corner.
int direction_order(const Direction& d);

/// Shortest ring walk per dimension, found by stepping both ways.
int walked_torus_distance(const std::vector<int>& dims, const std::vector<int>& a,
                          const std::vector<int>& b);

/// Rounded bytes of `cells` leaf cells holding ppp / 8^depth particles each.
std::uint64_t particle_payload(std::uint64_t cells, std::uint64_t ppp, int depth,
                               int values_per_particle, int precision_bytes);

std::string read_file(const std::string& path);
std::string golden(const std::string& name);

}  // namespace oracle
