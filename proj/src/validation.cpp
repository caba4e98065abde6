#include "fmmcomm/validation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>
#include <tuple>

#include "fmmcomm/error.hpp"
#include "fmmcomm/kernels.hpp"

namespace fmmcomm {

namespace {

constexpr std::string_view kHeader = "rank,level,phase,seconds";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, std::string_view field,
                       const std::string& message) {
  std::string what = "line " + std::to_string(line);
  if (!field.empty()) what += ", field '" + std::string(field) + "'";
  throw Error(ErrorCode::ParseError, what + ": " + message);
}

template <typename T>
T parse_integer(std::string_view token, std::size_t line, std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    fail(line, field, "expected a non-negative integer, got '" + std::string(token) + "'");
  }
  return value;
}

double parse_seconds(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    fail(line, "seconds", "expected a number, got '" + std::string(token) + "'");
  }
  if (value < 0.0) fail(line, "seconds", "negative time");
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

void apply_metadata(MeasurementMetadata& meta, std::string_view body, std::size_t line) {
  const auto eq = body.find('=');
  if (eq == std::string_view::npos) return;  // plain comment
  const auto key = trim(body.substr(0, eq));
  const auto value = trim(body.substr(eq + 1));
  if (key == "procs") {
    meta.procs = parse_integer<Count>(value, line, "procs");
  } else if (key == "particles_per_proc") {
    meta.particles_per_process = parse_integer<Count>(value, line, "particles_per_proc");
  } else if (key == "machine") {
    meta.machine = std::string(value);
  } else if (key == "steps") {
    meta.steps = parse_integer<Count>(value, line, "steps");
  }
}

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// MeasurementSet

MeasurementSet MeasurementSet::make(std::vector<MeasurementRecord> records,
                                    MeasurementMetadata metadata) {
  std::set<std::tuple<Rank, int, PhaseKind>> seen;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (!(r.seconds >= 0.0) || !std::isfinite(r.seconds)) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(k) + ": time must be finite and >= 0");
    }
    if (r.level < 0) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(k) + ": level must be >= 0");
    }
    if (metadata.procs && r.rank >= *metadata.procs) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(k) + ": rank " + std::to_string(r.rank) +
                      " outside procs=" + std::to_string(*metadata.procs));
    }
    if (!seen.insert({r.rank, r.level, r.phase}).second) {
      throw Error(ErrorCode::DuplicateKey,
                  "record " + std::to_string(k) + ": duplicate (rank " +
                      std::to_string(r.rank) + ", level " + std::to_string(r.level) +
                      ", " + std::string(to_string(r.phase)) + ")");
    }
  }
  MeasurementSet ms;
  ms.records_ = std::move(records);
  ms.metadata_ = std::move(metadata);
  return ms;
}

Count MeasurementSet::procs() const {
  if (metadata_.procs) return *metadata_.procs;
  Count highest = 0;
  for (const auto& r : records_) highest = std::max(highest, r.rank + 1);
  return highest;
}

MeasurementSet parse_measurements(std::istream& in) {
  MeasurementMetadata meta;
  std::vector<MeasurementRecord> records;
  std::map<std::tuple<Rank, int, PhaseKind>, std::size_t> first_line;
  bool header_seen = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '#') {
      apply_metadata(meta, text.substr(1), line);
      continue;
    }
    if (!header_seen) {
      if (text != kHeader) {
        fail(line, "", "expected header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(text);
    if (fields.size() != 4) {
      fail(line, "", "expected 4 fields, got " + std::to_string(fields.size()));
    }
    MeasurementRecord r;
    r.rank = parse_integer<Rank>(fields[0], line, "rank");
    r.level = parse_integer<int>(fields[1], line, "level");
    const auto phase = parse_phase(fields[2]);
    if (!phase) fail(line, "phase", "unknown phase '" + std::string(fields[2]) + "'");
    r.phase = *phase;
    r.seconds = parse_seconds(fields[3], line);
    if (meta.procs && r.rank >= *meta.procs) {
      fail(line, "rank", "rank " + std::to_string(r.rank) + " outside procs=" +
                             std::to_string(*meta.procs));
    }
    const auto [it, inserted] = first_line.emplace(std::tuple{r.rank, r.level, r.phase}, line);
    if (!inserted) {
      throw Error(ErrorCode::DuplicateKey,
                  "line " + std::to_string(line) + ": duplicate key (rank " +
                      std::to_string(r.rank) + ", level " + std::to_string(r.level) +
                      ", " + std::string(to_string(r.phase)) + ") first seen on line " +
                      std::to_string(it->second));
    }
    records.push_back(r);
  }
  if (!header_seen) fail(line, "", "missing header '" + std::string(kHeader) + "'");
  return MeasurementSet::make(std::move(records), std::move(meta));
}

void write_measurements(std::ostream& out, const MeasurementSet& ms) {
  const auto& meta = ms.metadata();
  if (meta.procs) out << "# procs=" << *meta.procs << '\n';
  if (meta.particles_per_process) {
    out << "# particles_per_proc=" << *meta.particles_per_process << '\n';
  }
  if (!meta.machine.empty()) out << "# machine=" << meta.machine << '\n';
  if (meta.steps) out << "# steps=" << *meta.steps << '\n';
  out << kHeader << '\n';
  for (const auto& r : ms.records()) {
    out << r.rank << ',' << r.level << ',' << to_string(r.phase) << ','
        << full_precision(r.seconds) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Statistics

std::vector<LevelStats> level_statistics(const MeasurementSet& ms) {
  if (ms.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no measurements");
  }
  std::map<LevelKey, std::vector<double>> groups;
  for (const auto& r : ms.records()) groups[{r.level, r.phase}].push_back(r.seconds);

  std::vector<LevelStats> out;
  out.reserve(groups.size());
  for (const auto& [key, values] : groups) {
    const double n = static_cast<double>(values.size());
    const auto range = kernels::extrema(values);
    // Shifting by the minimum keeps identical samples exact.
    double mean = range.min + kernels::shifted_sum(values, range.min) / n;
    mean = std::clamp(mean, range.min, range.max);
    LevelStats s;
    s.level = key.level;
    s.phase = key.phase;
    s.mean = mean;
    s.stddev = std::sqrt(kernels::squared_deviation_sum(values, mean) / n);
    s.min = range.min;
    s.max = range.max;
    s.rank_count = values.size();
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison

std::string_view to_string(MeasuredStat s) {
  return s == MeasuredStat::Mean ? "mean" : "max";
}

ComparisonReport compare(const PredictionReport& pred,
                         const std::vector<LevelStats>& stats, MeasuredStat stat) {
  std::map<LevelKey, const LevelStats*> measured;
  for (const auto& s : stats) measured[{s.level, s.phase}] = &s;

  ComparisonReport report;
  report.stat = stat;
  std::set<LevelKey> matched;
  for (const auto& row : pred.rows) {
    const LevelKey key{row.level, row.phase};
    const auto it = measured.find(key);
    if (it == measured.end()) {
      report.prediction_only.push_back(key);
      continue;
    }
    matched.insert(key);
    const LevelStats& s = *it->second;
    const double value = stat == MeasuredStat::Mean ? s.mean : s.max;

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (ModelVariant v : pred.variants) {
      const auto t = row.time(v);
      if (!t) continue;
      lo = any ? std::min(lo, *t) : *t;
      hi = any ? std::max(hi, *t) : *t;
      any = true;
    }
    for (ModelVariant v : pred.variants) {
      const auto t = row.time(v);
      if (!t) continue;
      ComparisonRow c;
      c.level = row.level;
      c.phase = row.phase;
      c.variant = v;
      c.predicted = *t;
      c.measured_mean = s.mean;
      c.measured_stddev = s.stddev;
      c.measured_max = s.max;
      c.measured = value;
      if (value > 0.0) {
        c.ratio = *t / value;
      } else if (*t == 0.0) {
        c.ratio = 1.0;
      }
      c.within_band = value >= lo && value <= hi;
      report.rows.push_back(c);
    }
  }
  for (const auto& [key, _] : measured) {
    if (!matched.count(key)) report.measurement_only.push_back(key);
  }
  if (matched.empty()) {
    throw Error(ErrorCode::NoOverlap,
                "prediction and measurements share no (level, phase)");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Load balance

LoadBalanceReport load_balance_report(const MeasurementSet& ms,
                                      const std::set<PhaseKind>& phases) {
  std::set<int> level_set;
  std::map<Rank, std::map<int, double>> per_rank;
  for (const auto& r : ms.records()) {
    per_rank[r.rank];  // ranks with only filtered phases still appear
    if (!phases.count(r.phase)) continue;
    level_set.insert(r.level);
    per_rank[r.rank][r.level] += r.seconds;
  }
  LoadBalanceReport report;
  report.levels.assign(level_set.begin(), level_set.end());
  for (const auto& [rank, by_level] : per_rank) {
    LoadBalanceRow row;
    row.rank = rank;
    for (int level : report.levels) {
      const auto it = by_level.find(level);
      const double v = it == by_level.end() ? 0.0 : it->second;
      row.components.push_back(v);
      row.total += v;
    }
    report.rows.push_back(std::move(row));
  }
  // per_rank iterates by rank, so a stable sort breaks ties by rank id.
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const LoadBalanceRow& a, const LoadBalanceRow& b) {
                     return a.total < b.total;
                   });
  return report;
}

}  // namespace fmmcomm
