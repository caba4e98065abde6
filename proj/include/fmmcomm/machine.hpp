#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fmmcomm/topology.hpp"

namespace fmmcomm {

/// Torus description of a machine: explicit extents, or only a
/// dimensionality whose extents are derived from the job's node grid.
struct TorusShape {
  int rank = 3;
  std::vector<int> dims;  // explicit when non-empty

  /// 3-D: the node grid itself. 5-D: node-count bits spread over A..D,
  /// extras to A first, with E holding a single bit (extent 2).
  TorusTopology resolve(const RankMapping& mapping) const;
  std::string to_string() const;
};

/// Network parameters. Times in seconds, rates in bytes per second.
struct MachineParams {
  std::string name;
  double alpha = 0.0;  // latency per message
  double beta = 0.0;   // send time per byte
  double gamma = 0.0;  // delay per extra hop
  double b_max = 0.0;  // peak injection bandwidth per node
  double b_eff = 0.0;  // effective (benchmarked) bandwidth
  Count cores_per_node = 1;
  TorusShape torus;

  /// Throws ConfigError when a rate is not positive, b_eff > b_max, or there
  /// are no cores.
  void validate() const;

  double bandwidth_penalty() const { return b_max / b_eff; }
};

std::vector<std::string_view> preset_names();

/// Built-in machines: shaheen (BG/P), mira (BG/Q), titan (XK7). Effective
/// bandwidth defaults to 1 / beta. Throws ConfigError for unknown names.
MachineParams machine_preset(std::string_view name);

/// Flat JSON with fields alpha_s, beta_s_per_byte, gamma_s_per_hop,
/// b_max_bytes_per_s, cores_per_node, torus_dims and optional
/// b_eff_bytes_per_s and name. torus_dims is "8x4x4", an array of extents,
/// or the dimensionality 3 or 5.
MachineParams parse_machine_config(std::string_view json_text,
                                   std::string_view fallback_name = "custom");

/// Preset name, or path to a JSON config file.
MachineParams load_machine(std::string_view source);

}  // namespace fmmcomm
