#include "fmmcomm/machine.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fmmcomm/error.hpp"

namespace fmmcomm {

namespace {

MachineParams preset(std::string name, double alpha, double beta, double gamma,
                     double b_max, Count cores, int torus_rank) {
  MachineParams p;
  p.name = std::move(name);
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.b_max = b_max;
  p.b_eff = 1.0 / beta;
  p.cores_per_node = cores;
  p.torus.rank = torus_rank;
  return p;
}

[[noreturn]] void missing(std::string_view field) {
  throw Error(ErrorCode::ConfigError,
              "machine config: missing field '" + std::string(field) + "'");
}

double positive_number(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) missing(field);
  const auto& v = j.at(field);
  if (!v.is_number() || !(v.get<double>() > 0.0)) {
    throw Error(ErrorCode::ConfigError, std::string("machine config: field '") +
                                            field + "' must be a positive number");
  }
  return v.get<double>();
}

}  // namespace

TorusTopology TorusShape::resolve(const RankMapping& mapping) const {
  if (!dims.empty()) return TorusTopology::make(dims);
  if (rank == 3) return identity_torus(mapping);
  if (rank != 5) {
    throw Error(ErrorCode::ConfigError,
                "automatic torus shapes exist for 3 or 5 dimensions only");
  }
  const Grid3 nodes = mapping.node_grid();
  const int bits = std::countr_zero(nodes[0] * nodes[1] * nodes[2]);
  std::vector<int> out(5, 1);
  if (bits > 0) out[4] = 2;
  const int rest = bits > 0 ? bits - 1 : 0;
  for (int d = 0; d < 4; ++d) {
    out[d] = 1 << (rest / 4 + (d < rest % 4 ? 1 : 0));
  }
  return TorusTopology::make(std::move(out));
}

std::string TorusShape::to_string() const {
  if (!dims.empty()) return TorusTopology::make(dims).to_string();
  return std::to_string(rank) + "-D";
}

void MachineParams::validate() const {
  auto positive = [&](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::ConfigError,
                  "machine '" + name + "': " + what + " must be positive");
    }
  };
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(gamma, "gamma");
  positive(b_max, "b_max");
  positive(b_eff, "b_eff");
  if (b_eff > b_max) {
    throw Error(ErrorCode::ConfigError,
                "machine '" + name + "': effective bandwidth exceeds peak");
  }
  if (cores_per_node < 1) {
    throw Error(ErrorCode::ConfigError,
                "machine '" + name + "': cores_per_node must be >= 1");
  }
}

std::vector<std::string_view> preset_names() { return {"shaheen", "mira", "titan"}; }

MachineParams machine_preset(std::string_view name) {
  // Latency, inverse bandwidth and hop delay as benchmarked; injection
  // bandwidth and cores per node from the hardware description.
  if (name == "shaheen") return preset("shaheen", 4.12e-6, 2.14e-9, 29.9e-9, 5.1e9, 4, 3);
  if (name == "mira") return preset("mira", 5.33e-6, 1.32e-9, 134e-9, 20e9, 16, 5);
  if (name == "titan") return preset("titan", 1.67e-6, 1.62e-9, 284e-9, 20e9, 16, 3);
  throw Error(ErrorCode::ConfigError, "unknown machine preset '" + std::string(name) + "'");
}

MachineParams parse_machine_config(std::string_view json_text,
                                   std::string_view fallback_name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("machine config: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::ConfigError, "machine config must be a JSON object");
  }
  MachineParams p;
  p.name = j.value("name", std::string(fallback_name));
  p.alpha = positive_number(j, "alpha_s");
  p.beta = positive_number(j, "beta_s_per_byte");
  p.gamma = positive_number(j, "gamma_s_per_hop");
  p.b_max = positive_number(j, "b_max_bytes_per_s");
  p.b_eff = j.contains("b_eff_bytes_per_s") ? positive_number(j, "b_eff_bytes_per_s")
                                            : 1.0 / p.beta;
  if (!j.contains("cores_per_node")) missing("cores_per_node");
  if (!j["cores_per_node"].is_number_integer() || j["cores_per_node"].get<long>() < 1) {
    throw Error(ErrorCode::ConfigError,
                "machine config: field 'cores_per_node' must be a positive integer");
  }
  p.cores_per_node = j["cores_per_node"].get<Count>();

  if (!j.contains("torus_dims")) missing("torus_dims");
  const auto& t = j["torus_dims"];
  try {
    if (t.is_string()) {
      p.torus.dims = TorusTopology::parse(t.get<std::string>()).dims();
      p.torus.rank = static_cast<int>(p.torus.dims.size());
    } else if (t.is_array()) {
      p.torus.dims = TorusTopology::make(t.get<std::vector<int>>()).dims();
      p.torus.rank = static_cast<int>(p.torus.dims.size());
    } else if (t.is_number_integer() && (t.get<int>() == 3 || t.get<int>() == 5)) {
      p.torus.rank = t.get<int>();
    } else {
      throw Error(ErrorCode::ConfigError, "bad torus_dims");
    }
  } catch (const Error&) {
    throw Error(ErrorCode::ConfigError,
                "machine config: field 'torus_dims' must be \"AxBxC\", an array of "
                "extents, 3, or 5");
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::ConfigError,
                "machine config: field 'torus_dims' must be \"AxBxC\", an array of "
                "extents, 3, or 5");
  }
  p.validate();
  return p;
}

MachineParams load_machine(std::string_view source) {
  for (auto name : preset_names()) {
    if (name == source) return machine_preset(source);
  }
  std::ifstream in{std::string(source)};
  if (!in) {
    throw Error(ErrorCode::ConfigError,
                "'" + std::string(source) +
                    "' is neither a machine preset nor a readable config file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_machine_config(text.str(), source);
}

}  // namespace fmmcomm
