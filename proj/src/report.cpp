#include "fmmcomm/report.hpp"

#include <cstdio>
#include <ostream>

namespace fmmcomm {

namespace {

using nlohmann::json;

// nlohmann::json prints doubles at full precision; round them the same way
// the CSV writer does so both formats carry identical values.
double rounded(double seconds) { return std::stod(format_seconds(seconds)); }

json level_key(const LevelKey& k) {
  return {{"level", k.level}, {"phase", to_string(k.phase)}};
}

}  // namespace

std::string format_seconds(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", seconds);
  return buf;
}

// --- stats -----------------------------------------------------------------

void write_csv(std::ostream& out, const std::vector<CommStatsRow>& rows) {
  out << "level,cells,sends,bytes\n";
  for (const auto& r : rows) {
    out << r.level << ',' << r.cells << ',' << r.sends << ',' << r.bytes << '\n';
  }
}

json to_json(const TreeConfig& cfg, const std::vector<CommStatsRow>& rows) {
  json j;
  j["procs"] = cfg.num_processes();
  j["particles_per_proc"] = cfg.particles_per_process();
  j["global_depth"] = cfg.global_depth();
  j["local_depth"] = cfg.local_depth();
  j["rows"] = json::array();
  for (const auto& r : rows) {
    j["rows"].push_back(
        {{"level", r.level}, {"cells", r.cells}, {"sends", r.sends}, {"bytes", r.bytes}});
  }
  return j;
}

// --- predict ---------------------------------------------------------------

void write_csv(std::ostream& out, const PredictionReport& report) {
  out << "level,phase,sends,bytes,mean_hops";
  for (auto v : report.variants) out << ',' << to_string(v);
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.level << ',' << to_string(row.phase) << ',' << row.sends << ','
        << row.bytes << ',' << format_seconds(row.mean_hops);
    for (auto v : report.variants) out << ',' << format_seconds(row.time(v).value_or(0.0));
    out << '\n';
  }
}

json to_json(const PredictionReport& report) {
  json j;
  j["machine"] = report.machine;
  j["procs"] = report.procs;
  j["particles_per_proc"] = report.particles_per_process;
  j["aggregation"] = to_string(report.aggregation);
  j["hops_model_derived"] = true;
  j["variants"] = json::array();
  for (auto v : report.variants) j["variants"].push_back(to_string(v));
  j["rows"] = json::array();
  for (const auto& row : report.rows) {
    json r{{"level", row.level},
           {"phase", to_string(row.phase)},
           {"sends", row.sends},
           {"bytes", row.bytes},
           {"mean_hops", rounded(row.mean_hops)},
           {"mean_extra_hops", rounded(row.mean_extra_hops)}};
    r["seconds"] = json::object();
    for (auto v : report.variants) {
      r["seconds"][std::string(to_string(v))] = rounded(row.time(v).value_or(0.0));
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

// --- compare ---------------------------------------------------------------

void write_csv(std::ostream& out, const ComparisonReport& report) {
  out << "status,level,phase,variant,predicted_s,measured_s,measured_mean_s,"
         "measured_stddev_s,measured_max_s,ratio,within_band\n";
  for (const auto& r : report.rows) {
    out << "matched," << r.level << ',' << to_string(r.phase) << ','
        << to_string(r.variant) << ',' << format_seconds(r.predicted) << ','
        << format_seconds(r.measured) << ',' << format_seconds(r.measured_mean) << ','
        << format_seconds(r.measured_stddev) << ',' << format_seconds(r.measured_max)
        << ',' << (r.ratio ? format_seconds(*r.ratio) : std::string()) << ','
        << (r.within_band ? "true" : "false") << '\n';
  }
  for (const auto& k : report.prediction_only) {
    out << "prediction_only," << k.level << ',' << to_string(k.phase) << ",,,,,,,,\n";
  }
  for (const auto& k : report.measurement_only) {
    out << "measurement_only," << k.level << ',' << to_string(k.phase) << ",,,,,,,,\n";
  }
}

json to_json(const ComparisonReport& report) {
  json j;
  j["stat"] = to_string(report.stat);
  j["rows"] = json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"level", r.level},
                         {"phase", to_string(r.phase)},
                         {"variant", to_string(r.variant)},
                         {"predicted", rounded(r.predicted)},
                         {"measured", rounded(r.measured)},
                         {"measured_mean", rounded(r.measured_mean)},
                         {"measured_stddev", rounded(r.measured_stddev)},
                         {"measured_max", rounded(r.measured_max)},
                         {"ratio", r.ratio ? json(rounded(*r.ratio)) : json(nullptr)},
                         {"within_band", r.within_band}});
  }
  j["prediction_only"] = json::array();
  for (const auto& k : report.prediction_only) j["prediction_only"].push_back(level_key(k));
  j["measurement_only"] = json::array();
  for (const auto& k : report.measurement_only) j["measurement_only"].push_back(level_key(k));

  // Plot-ready: one series per variant plus measured mean and stddev.
  json series;
  series["levels"] = json::array();
  series["phases"] = json::array();
  series["measured_mean"] = json::array();
  series["measured_stddev"] = json::array();
  series["models"] = json::object();
  std::optional<LevelKey> last;
  for (const auto& r : report.rows) {
    const LevelKey key{r.level, r.phase};
    if (!last || *last != key) {
      series["levels"].push_back(r.level);
      series["phases"].push_back(to_string(r.phase));
      series["measured_mean"].push_back(rounded(r.measured_mean));
      series["measured_stddev"].push_back(rounded(r.measured_stddev));
      last = key;
    }
    series["models"][std::string(to_string(r.variant))].push_back(rounded(r.predicted));
  }
  j["series"] = std::move(series);
  return j;
}

// --- loadbalance -----------------------------------------------------------

void write_csv(std::ostream& out, const LoadBalanceReport& report) {
  out << "position,rank,total_s";
  for (int level : report.levels) out << ",level_" << level;
  out << '\n';
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& row = report.rows[k];
    out << k << ',' << row.rank << ',' << format_seconds(row.total);
    for (double c : row.components) out << ',' << format_seconds(c);
    out << '\n';
  }
}

json to_json(const LoadBalanceReport& report) {
  json j;
  j["levels"] = report.levels;
  j["rows"] = json::array();
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& row = report.rows[k];
    json components = json::array();
    for (double c : row.components) components.push_back(rounded(c));
    j["rows"].push_back({{"position", k},
                         {"rank", row.rank},
                         {"total", rounded(row.total)},
                         {"components", std::move(components)}});
  }
  return j;
}

// --- pattern ---------------------------------------------------------------

void write_csv(std::ostream& out, const PatternMatrix& matrix) {
  out << "src,dst,bytes\n";
  for (const auto& e : matrix.entries) {
    out << e.src << ',' << e.dst << ',' << e.bytes << '\n';
  }
}

json to_json(const PatternMatrix& matrix, const Level& level, PhaseKind phase) {
  json j;
  j["ranks"] = matrix.ranks;
  j["level"] = level.index;
  j["phase"] = to_string(phase);
  j["entries"] = json::array();
  for (const auto& e : matrix.entries) j["entries"].push_back({e.src, e.dst, e.bytes});
  return j;
}

// --- hops ------------------------------------------------------------------

void write_csv(std::ostream& out, const HopAnnotatedPlan& plan) {
  out << "offset_x,offset_y,offset_z,class,partner,bytes,hops,min_hops,extra_hops\n";
  for (const auto& m : plan.messages) {
    out << m.offset[0] << ',' << m.offset[1] << ',' << m.offset[2] << ','
        << to_string(m.cls) << ',' << m.partner << ',' << m.bytes << ',' << m.hops
        << ',' << m.min_hops << ',' << m.extra_hops() << '\n';
  }
}

json to_json(const HopAnnotatedPlan& plan) {
  json j;
  j["rank"] = plan.rank;
  j["level"] = plan.plan.level.index;
  j["phase"] = to_string(plan.plan.phase);
  j["hops_model_derived"] = true;
  j["messages"] = json::array();
  for (const auto& m : plan.messages) {
    j["messages"].push_back({{"offset", m.offset},
                             {"class", to_string(m.cls)},
                             {"partner", m.partner},
                             {"bytes", m.bytes},
                             {"hops", m.hops},
                             {"min_hops", m.min_hops}});
  }
  return j;
}

}  // namespace fmmcomm
