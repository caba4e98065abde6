#include "fmmcomm/model.hpp"

#include <algorithm>
#include <string>

#include "fmmcomm/error.hpp"

namespace fmmcomm {

VariantFlags flags(ModelVariant v) {
  switch (v) {
    case ModelVariant::Baseline: return {false, false, false, false};
    case ModelVariant::Distance: return {true, false, false, false};
    case ModelVariant::BandwidthPenalty: return {true, true, false, false};
    case ModelVariant::AlphaPenalty: return {true, true, true, false};
    case ModelVariant::GammaPenalty: return {true, true, false, true};
    case ModelVariant::FullPenalty: return {true, true, true, true};
  }
  return {};
}

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Baseline: return "baseline";
    case ModelVariant::Distance: return "distance";
    case ModelVariant::BandwidthPenalty: return "bandwidth_penalty";
    case ModelVariant::AlphaPenalty: return "alpha_penalty";
    case ModelVariant::GammaPenalty: return "gamma_penalty";
    case ModelVariant::FullPenalty: return "full_penalty";
  }
  return "unknown";
}

std::optional<ModelVariant> parse_variant(std::string_view name) {
  for (auto v : kAllVariants) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view to_string(Aggregation a) {
  return a == Aggregation::Sum ? "sum" : "max";
}

kernels::LinearCost cost_coefficients(ModelVariant v, const MachineParams& p) {
  const VariantFlags f = flags(v);
  const double cores = static_cast<double>(p.cores_per_node);
  kernels::LinearCost cost;
  cost.fixed = f.multicore_on_alpha ? cores * p.alpha : p.alpha;
  cost.per_byte = f.use_beta_penalty ? p.beta * p.bandwidth_penalty() : p.beta;
  if (f.use_gamma) {
    cost.per_extra_hop = f.multicore_on_gamma ? cores * p.gamma : p.gamma;
  }
  return cost;
}

double message_time(ModelVariant v, const MachineParams& p, double n, int h,
                    int h_m) {
  if (h < h_m) {
    throw Error(ErrorCode::InvalidArgument,
                "hops " + std::to_string(h) + " below minimum " + std::to_string(h_m));
  }
  if (n < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "message size must be non-negative");
  }
  const auto cost = cost_coefficients(v, p);
  // Same evaluation order as the batched kernels.
  const double transfer = n * cost.per_byte;
  const double distance = static_cast<double>(h - h_m) * cost.per_extra_hop;
  return (cost.fixed + transfer) + distance;
}

double level_time(ModelVariant v, const MachineParams& p,
                  const HopAnnotatedPlan& hp, Aggregation agg) {
  const std::size_t n = hp.messages.size();
  if (n == 0) return 0.0;
  std::vector<double> bytes(n), extra(n), times(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (hp.messages[k].extra_hops() < 0) {
      throw Error(ErrorCode::InvalidArgument, "message with hops below minimum");
    }
    bytes[k] = static_cast<double>(hp.messages[k].bytes);
    extra[k] = static_cast<double>(hp.messages[k].extra_hops());
  }
  kernels::message_times(cost_coefficients(v, p), bytes, extra, times);
  if (agg == Aggregation::Max) return *std::max_element(times.begin(), times.end());
  double total = 0.0;
  for (double t : times) total += t;
  return total;
}

const PredictionRow* PredictionReport::find(int level, PhaseKind phase) const {
  for (const auto& row : rows) {
    if (row.level == level && row.phase == phase) return &row;
  }
  return nullptr;
}

PredictionReport predict(const TreeConfig& cfg, const MachineParams& p,
                         const Placement& placement,
                         const std::set<ModelVariant>& variants,
                         const std::set<PhaseKind>& phases, Aggregation agg) {
  p.validate();
  PredictionReport report;
  report.machine = p.name;
  report.procs = cfg.num_processes();
  report.particles_per_process = cfg.particles_per_process();
  report.aggregation = agg;
  report.variants.assign(variants.begin(), variants.end());

  constexpr Rank kRepresentative = 0;  // grid origin in Morton order
  for (int index = 0; index < cfg.total_levels(); ++index) {
    const Level level = cfg.level(index);
    for (PhaseKind phase : phases) {
      if (!phase_applies(cfg, phase, level)) continue;
      const PhasePlan plan = phase_plan(cfg, phase, level);
      const HopAnnotatedPlan hp = annotate_hops(cfg, plan, placement, kRepresentative);
      PredictionRow row;
      row.level = index;
      row.phase = phase;
      row.sends = plan.total_sends;
      row.bytes = plan.total_bytes;
      row.mean_hops = hp.mean_hops();
      row.mean_extra_hops = hp.mean_extra_hops();
      for (ModelVariant v : variants) {
        row.seconds[static_cast<std::size_t>(v)] = level_time(v, p, hp, agg);
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

PredictionReport predict(const TreeConfig& cfg, const MachineParams& p,
                         const RankMapping& m, const TorusTopology& t,
                         const std::set<ModelVariant>& variants,
                         const std::set<PhaseKind>& phases, Aggregation agg) {
  return predict(cfg, p, Placement::make(m, t), variants, phases, agg);
}

}  // namespace fmmcomm
