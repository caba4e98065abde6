#pragma once

// Measured per-rank communication timings and their comparison with model
// predictions.
//
// Measurement files are CSV with the header `rank,level,phase,seconds`.
// Optional `# key=value` lines before the header carry metadata: procs,
// particles_per_proc, machine, steps. Times are per-step averages.

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fmmcomm/model.hpp"

namespace fmmcomm {

struct MeasurementRecord {
  Rank rank = 0;
  int level = 0;
  PhaseKind phase = PhaseKind::GlobalM2L;
  double seconds = 0.0;

  bool operator==(const MeasurementRecord&) const = default;
};

struct MeasurementMetadata {
  std::optional<Count> procs;
  std::optional<Count> particles_per_process;
  std::string machine;
  std::optional<Count> steps;

  bool operator==(const MeasurementMetadata&) const = default;
};

class MeasurementSet {
 public:
  /// Throws DuplicateKey for a repeated (rank, level, phase) and ParseError
  /// for negative or non-finite times or ranks beyond metadata procs.
  static MeasurementSet make(std::vector<MeasurementRecord> records,
                             MeasurementMetadata metadata = {});

  const std::vector<MeasurementRecord>& records() const { return records_; }
  const MeasurementMetadata& metadata() const { return metadata_; }
  /// Metadata process count, else highest rank + 1.
  Count procs() const;
  bool empty() const { return records_.empty(); }

  bool operator==(const MeasurementSet&) const = default;

 private:
  std::vector<MeasurementRecord> records_;
  MeasurementMetadata metadata_;
};

/// Throws ParseError or DuplicateKey naming the line (and field).
MeasurementSet parse_measurements(std::istream& in);
/// Writes full-precision values, so parsing the output reproduces `ms`.
void write_measurements(std::ostream& out, const MeasurementSet& ms);

struct LevelStats {
  int level = 0;
  PhaseKind phase = PhaseKind::GlobalM2L;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  Count rank_count = 0;
};

/// One entry per (level, phase), sorted. Throws InvalidArgument when empty.
std::vector<LevelStats> level_statistics(const MeasurementSet& ms);

enum class MeasuredStat { Mean, Max };

std::string_view to_string(MeasuredStat s);

struct ComparisonRow {
  int level = 0;
  PhaseKind phase = PhaseKind::GlobalM2L;
  ModelVariant variant = ModelVariant::Baseline;
  double predicted = 0.0;
  double measured_mean = 0.0;
  double measured_stddev = 0.0;
  double measured_max = 0.0;
  double measured = 0.0;        // the statistic selected for comparison
  std::optional<double> ratio;  // predicted / measured; 1 when both are 0
  bool within_band = false;     // measured inside [min, max] over the variants
};

struct LevelKey {
  int level = 0;
  PhaseKind phase = PhaseKind::GlobalM2L;

  auto operator<=>(const LevelKey&) const = default;
};

struct ComparisonReport {
  MeasuredStat stat = MeasuredStat::Mean;
  std::vector<ComparisonRow> rows;  // every (level, phase, variant) matched
  std::vector<LevelKey> prediction_only;
  std::vector<LevelKey> measurement_only;
};

/// Joins on (level, phase). Throws NoOverlap when nothing matches.
ComparisonReport compare(const PredictionReport& pred,
                         const std::vector<LevelStats>& stats,
                         MeasuredStat stat = MeasuredStat::Mean);

struct LoadBalanceRow {
  Rank rank = 0;
  double total = 0.0;
  std::vector<double> components;  // aligned with LoadBalanceReport::levels
};

struct LoadBalanceReport {
  std::vector<int> levels;
  std::vector<LoadBalanceRow> rows;  // ascending total, ties by rank
};

LoadBalanceReport load_balance_report(const MeasurementSet& ms,
                                      const std::set<PhaseKind>& phases = kM2LPhases);

}  // namespace fmmcomm
