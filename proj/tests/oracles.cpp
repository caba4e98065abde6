#include "oracles.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace oracle {

std::map<Direction, std::uint64_t> halo_by_direction(int i, int layers) {
  const long side = 1L << i;
  auto sign = [side](long c) { return c < 0 ? -1 : (c >= side ? 1 : 0); };
  std::map<Direction, std::uint64_t> out;
  for (long x = -layers; x < side + layers; ++x) {
    for (long y = -layers; y < side + layers; ++y) {
      for (long z = -layers; z < side + layers; ++z) {
        const Direction d{sign(x), sign(y), sign(z)};
        if (d == Direction{0, 0, 0}) continue;
        ++out[d];
      }
    }
  }
  return out;
}

std::uint64_t brute_force_total(int i, int layers) {
  std::uint64_t total = 0;
  for (const auto& [dir, cells] : halo_by_direction(i, layers)) total += cells;
  return total;
}

int direction_order(const Direction& d) {
  return (d[0] != 0) + (d[1] != 0) + (d[2] != 0);
}

int walked_torus_distance(const std::vector<int>& dims, const std::vector<int>& a,
                          const std::vector<int>& b) {
  int total = 0;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    int forward = 0;
    for (int p = a[d]; p != b[d]; p = (p + 1) % dims[d]) ++forward;
    int backward = 0;
    for (int p = a[d]; p != b[d]; p = (p - 1 + dims[d]) % dims[d]) ++backward;
    total += forward < backward ? forward : backward;
  }
  return total;
}

std::uint64_t particle_payload(std::uint64_t cells, std::uint64_t ppp, int depth,
                               int values_per_particle, int precision_bytes) {
  const double per_cell = static_cast<double>(ppp) / std::pow(8.0, depth);
  const double bytes = static_cast<double>(cells) * per_cell * values_per_particle *
                       precision_bytes;
  return static_cast<std::uint64_t>(std::llround(bytes));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string golden(const std::string& name) {
  return read_file(std::string(FMMCOMM_GOLDEN_DIR) + "/" + name);
}

}  // namespace oracle
