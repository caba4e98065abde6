#pragma once

// Latency / bandwidth / distance cost model family.
//
// A message of n bytes travelling h hops, of which h_m are unavoidable, costs
//
//   T = A * alpha + n * beta * K + C * (h - h_m) * gamma
//
// where the distance term is present only for hop-aware variants,
// K = B_max / B when the bandwidth penalty applies, and A and C become the
// number of active cores per node under the multicore penalties.

#include <array>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "fmmcomm/kernels.hpp"
#include "fmmcomm/machine.hpp"
#include "fmmcomm/phases.hpp"
#include "fmmcomm/topology.hpp"

namespace fmmcomm {

enum class ModelVariant {
  Baseline,
  Distance,
  BandwidthPenalty,
  AlphaPenalty,
  GammaPenalty,
  FullPenalty,
};

inline constexpr std::array<ModelVariant, 6> kAllVariants{
    ModelVariant::Baseline,     ModelVariant::Distance,
    ModelVariant::BandwidthPenalty, ModelVariant::AlphaPenalty,
    ModelVariant::GammaPenalty, ModelVariant::FullPenalty};

struct VariantFlags {
  bool use_gamma = false;
  bool use_beta_penalty = false;
  bool multicore_on_alpha = false;
  bool multicore_on_gamma = false;
};

VariantFlags flags(ModelVariant v);
std::string_view to_string(ModelVariant v);
std::optional<ModelVariant> parse_variant(std::string_view name);

/// Per-message coefficients of a variant on a machine.
kernels::LinearCost cost_coefficients(ModelVariant v, const MachineParams& p);

/// Throws InvalidArgument when h < h_m or n < 0.
double message_time(ModelVariant v, const MachineParams& p, double n, int h, int h_m);

enum class Aggregation { Sum, Max };

std::string_view to_string(Aggregation a);

/// Time of one level: sum (or max) of the plan's message times.
double level_time(ModelVariant v, const MachineParams& p,
                  const HopAnnotatedPlan& hp, Aggregation agg = Aggregation::Sum);

struct PredictionRow {
  int level = 0;
  PhaseKind phase = PhaseKind::GlobalM2L;
  Count sends = 0;
  Count bytes = 0;
  double mean_hops = 0.0;
  double mean_extra_hops = 0.0;
  std::array<std::optional<double>, 6> seconds{};  // indexed by ModelVariant

  std::optional<double> time(ModelVariant v) const {
    return seconds[static_cast<std::size_t>(v)];
  }
};

struct PredictionReport {
  std::string machine;
  Count procs = 0;
  Count particles_per_process = 0;
  Aggregation aggregation = Aggregation::Sum;
  std::vector<ModelVariant> variants;  // in canonical order
  std::vector<PredictionRow> rows;     // by level, then phase

  const PredictionRow* find(int level, PhaseKind phase) const;
};

/// Global M2L above the local tree and local M2L inside it.
inline const std::set<PhaseKind> kM2LPhases{PhaseKind::GlobalM2L,
                                             PhaseKind::LocalM2L};

/// Predicted time per level and phase for the representative rank at the
/// grid origin. Levels where a requested phase does not apply are skipped.
PredictionReport predict(const TreeConfig& cfg, const MachineParams& p,
                         const Placement& placement,
                         const std::set<ModelVariant>& variants,
                         const std::set<PhaseKind>& phases = kM2LPhases,
                         Aggregation agg = Aggregation::Sum);

PredictionReport predict(const TreeConfig& cfg, const MachineParams& p,
                         const RankMapping& m, const TorusTopology& t,
                         const std::set<ModelVariant>& variants,
                         const std::set<PhaseKind>& phases = kM2LPhases,
                         Aggregation agg = Aggregation::Sum);

}  // namespace fmmcomm
