#include "fmmcomm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fmmcomm/error.hpp"
#include "fmmcomm/report.hpp"

namespace fmmcomm::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct TreeFlags {
  Count procs = 0;
  Count particles_per_proc = 0;
  int local_depth = 0;  // 0: derive
  Count max_per_leaf = 16;
  Count coeffs = 56;
  Count precision = 4;
  Count values_per_particle = 4;
};

struct MappingFlags {
  Count ranks_per_node = 0;  // 0: command default
  std::string fold;
  std::string dims;
};

struct OutputFlags {
  std::string format = "csv";
  std::string out;
};

void add_tree_flags(CLI::App* app, TreeFlags& f, bool required) {
  auto* procs = app->add_option("--procs", f.procs, "Number of MPI processes (power of two)");
  auto* ppp = app->add_option("--particles-per-proc", f.particles_per_proc,
                              "Particles per process (N/P)");
  if (required) {
    procs->required();
    ppp->required();
  }
  app->add_option("--local-depth", f.local_depth, "Override the local tree depth");
  app->add_option("--max-per-leaf", f.max_per_leaf, "Particles per leaf for local depth")
      ->capture_default_str();
  app->add_option("--coeffs", f.coeffs, "Multipole coefficients per cell")->capture_default_str();
  app->add_option("--precision", f.precision, "Bytes per value")->capture_default_str();
  app->add_option("--values-per-particle", f.values_per_particle,
                  "Values sent per particle in P2P")
      ->capture_default_str();
}

void add_mapping_flags(CLI::App* app, MappingFlags& f) {
  app->add_option("--ranks-per-node", f.ranks_per_node, "MPI ranks sharing one node");
  app->add_option("--fold", f.fold, "Fold factors of a node block, e.g. 1x2x2");
  app->add_option("--dims", f.dims, "Torus extents, e.g. 8x4x4 or 4x4x4x4x2");
}

void add_output_flags(CLI::App* app, OutputFlags& f) {
  app->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app->add_option("--out", f.out, "Write output to a file instead of stdout");
}

TreeConfig make_tree(const TreeFlags& f) {
  TreeOptions options;
  options.max_particles_per_leaf = f.max_per_leaf;
  if (f.local_depth != 0) options.local_depth_override = f.local_depth;
  options.coeffs_per_cell = f.coeffs;
  options.precision_bytes = f.precision;
  options.values_per_particle = f.values_per_particle;
  return TreeConfig::make(f.procs, f.particles_per_proc, options);
}

Grid3 parse_fold(const std::string& text) {
  const auto parts = split_list(text, 'x');
  if (parts.size() != 3) throw UsageError("--fold expects three factors, e.g. 1x2x2");
  Grid3 fold{};
  for (int d = 0; d < 3; ++d) {
    try {
      fold[d] = std::stoull(parts[d]);
    } catch (const std::exception&) {
      throw UsageError("--fold: bad factor '" + parts[d] + "'");
    }
  }
  return fold;
}

RankMapping make_mapping(const TreeConfig& cfg, const MappingFlags& f,
                         Count default_ranks_per_node) {
  Count rpn = f.ranks_per_node != 0 ? f.ranks_per_node : default_ranks_per_node;
  std::optional<Grid3> fold;
  if (!f.fold.empty()) {
    fold = parse_fold(f.fold);
    const Count product = (*fold)[0] * (*fold)[1] * (*fold)[2];
    if (f.ranks_per_node != 0 && product != f.ranks_per_node) {
      throw UsageError("--fold multiplies to " + std::to_string(product) +
                       " but --ranks-per-node is " + std::to_string(f.ranks_per_node));
    }
    rpn = product;
  }
  return RankMapping::make(cfg.process_grid(), rpn, fold);
}

std::set<ModelVariant> parse_models(const std::string& text) {
  if (text == "all") return {kAllVariants.begin(), kAllVariants.end()};
  std::set<ModelVariant> out;
  for (const auto& name : split_list(text, ',')) {
    const auto v = parse_variant(name);
    if (!v) throw UsageError("unknown model '" + name + "'");
    out.insert(*v);
  }
  if (out.empty()) throw UsageError("--models selects nothing");
  return out;
}

std::set<PhaseKind> parse_phases(const std::string& text) {
  if (text == "m2l") return kM2LPhases;
  if (text == "all") return {std::begin(kAllPhases), std::end(kAllPhases)};
  std::set<PhaseKind> out;
  for (const auto& name : split_list(text, ',')) {
    const auto p = parse_phase(name);
    if (!p) throw UsageError("unknown phase '" + name + "'");
    out.insert(*p);
  }
  if (out.empty()) throw UsageError("--phases selects nothing");
  return out;
}

MeasurementSet read_measurements(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read measurements '" + path + "'");
  return parse_measurements(in);
}

// Writes text to stdout or the --out file.
void emit(const OutputFlags& o, std::ostream& out, const std::function<void(std::ostream&)>& csv,
          const std::function<nlohmann::json()>& json) {
  std::ostringstream buffer;
  if (o.format == "json") {
    buffer << json().dump(2) << '\n';
  } else {
    csv(buffer);
  }
  if (o.out.empty()) {
    out << buffer.str();
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + o.out + "'");
  file << buffer.str();
}

struct ModelFlags {
  std::string machine;
  std::string models = "all";
  std::string phases = "m2l";
  std::string aggregation = "sum";
  double b_eff = 0.0;
  Count cores_per_node = 0;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--machine", f.machine, "Preset (shaheen, mira, titan) or JSON config path")
      ->required();
  app->add_option("--models", f.models, "all, or a comma list of model variants")
      ->capture_default_str();
  app->add_option("--phases", f.phases, "m2l, all, or a comma list of phases")
      ->capture_default_str();
  app->add_option("--aggregation", f.aggregation, "Per-level aggregation of messages")
      ->check(CLI::IsMember({"sum", "max"}))
      ->capture_default_str();
  app->add_option("--b-eff", f.b_eff, "Effective bandwidth override, bytes/s");
  app->add_option("--cores-per-node", f.cores_per_node, "Active cores per node override");
}

PredictionReport run_prediction(const TreeConfig& cfg, const ModelFlags& mf,
                                const MappingFlags& map_flags,
                                const std::set<ModelVariant>& variants) {
  MachineParams machine = load_machine(mf.machine);
  if (mf.b_eff > 0.0) machine.b_eff = mf.b_eff;
  if (mf.cores_per_node != 0) machine.cores_per_node = mf.cores_per_node;
  if (!map_flags.dims.empty()) {
    machine.torus.dims = TorusTopology::parse(map_flags.dims).dims();
    machine.torus.rank = static_cast<int>(machine.torus.dims.size());
  }
  machine.validate();
  const Count default_rpn = std::min(machine.cores_per_node, cfg.num_processes());
  const RankMapping mapping = make_mapping(cfg, map_flags, default_rpn);
  const TorusTopology torus = machine.torus.resolve(mapping);
  const Aggregation agg = mf.aggregation == "max" ? Aggregation::Max : Aggregation::Sum;
  return predict(cfg, machine, mapping, torus, variants, parse_phases(mf.phases), agg);
}

NodeCoord parse_node(const TorusTopology& t, const std::string& text) {
  try {
    if (text.find(',') == std::string::npos) {
      std::size_t used = 0;
      const Count index = std::stoull(text, &used);
      if (used != text.size()) throw UsageError("bad node '" + text + "'");
      return t.coord_of(index);
    }
    NodeCoord c;
    for (const auto& part : split_list(text, ',')) {
      std::size_t used = 0;
      c.push_back(std::stoi(part, &used));
      if (used != part.size()) throw UsageError("bad node '" + text + "'");
    }
    t.check(c);
    return c;
  } catch (const std::invalid_argument&) {
    throw UsageError("bad node '" + text + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("bad node '" + text + "'");
  }
}

Level level_arg(const TreeConfig& cfg, int index) { return cfg.level(index); }

PhaseKind resolve_phase(const TreeConfig& cfg, const Level& level, const std::string& name) {
  if (name == "m2l") {
    return level.zone == Zone::Global ? PhaseKind::GlobalM2L : PhaseKind::LocalM2L;
  }
  const auto p = parse_phase(name);
  if (!p) throw UsageError("unknown phase '" + name + "'");
  (void)cfg;
  return *p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Communication cost modeling for the distributed fast multipole method",
               "fmmcomm"};
  app.require_subcommand(1);

  OutputFlags output;
  TreeFlags tree;
  MappingFlags mapping;
  ModelFlags model;
  std::string measurements_path;
  std::string measured_stat = "mean";
  int level_index = -1;
  std::string phase_name = "m2l";
  Rank rank = 0;
  std::vector<std::string> nodes;

  auto* stats = app.add_subcommand("stats", "M2L communication statistics per level");
  add_tree_flags(stats, tree, true);
  add_output_flags(stats, output);

  auto* predict_cmd = app.add_subcommand("predict", "Predicted communication time per level");
  add_tree_flags(predict_cmd, tree, true);
  add_mapping_flags(predict_cmd, mapping);
  add_model_flags(predict_cmd, model);
  add_output_flags(predict_cmd, output);

  auto* compare_cmd = app.add_subcommand("compare", "Compare predictions with measurements");
  add_tree_flags(compare_cmd, tree, false);
  add_mapping_flags(compare_cmd, mapping);
  add_model_flags(compare_cmd, model);
  add_output_flags(compare_cmd, output);
  compare_cmd->add_option("--measurements", measurements_path, "Measurement CSV")->required();
  compare_cmd->add_option("--measured-stat", measured_stat, "Statistic compared to the models")
      ->check(CLI::IsMember({"mean", "max"}))
      ->capture_default_str();

  auto* lb = app.add_subcommand("loadbalance", "Per-rank stacked M2L times, sorted by total");
  lb->add_option("--measurements", measurements_path, "Measurement CSV")->required();
  lb->add_option("--phases", model.phases, "m2l, all, or a comma list of phases")
      ->capture_default_str();
  add_output_flags(lb, output);

  auto* topo = app.add_subcommand("topology", "Inspect torus distances and rank placement");
  topo->require_subcommand(1);
  topo->fallthrough();
  add_mapping_flags(topo, mapping);
  add_output_flags(topo, output);
  auto* distance = topo->add_subcommand("distance", "Hops between two nodes");
  distance->add_option("nodes", nodes, "Two nodes: linear index (x fastest) or x,y,z")
      ->expected(2)
      ->required();
  auto* map_cmd = topo->add_subcommand("map", "Rank to node placement");
  map_cmd->add_option("--procs", tree.procs, "Number of MPI processes")->required();
  auto* hops = topo->add_subcommand("hops", "Per-partner hop annotation of one rank");
  add_tree_flags(hops, tree, true);
  hops->add_option("--level", level_index, "Tree level")->required();
  hops->add_option("--phase", phase_name, "m2l or a phase name")->capture_default_str();
  hops->add_option("--rank", rank, "Sending rank")->capture_default_str();

  auto* pattern = app.add_subcommand("pattern", "Rank-to-rank byte matrix of one level");
  add_tree_flags(pattern, tree, true);
  add_mapping_flags(pattern, mapping);
  add_output_flags(pattern, output);
  pattern->add_option("--level", level_index, "Tree level")->required();
  pattern->add_option("--phase", phase_name, "m2l or a phase name")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fmmcomm: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (stats->parsed()) {
      const TreeConfig cfg = make_tree(tree);
      const auto rows = comm_stats(cfg);
      emit(output, out, [&](std::ostream& o) { write_csv(o, rows); },
           [&] { return to_json(cfg, rows); });
    } else if (predict_cmd->parsed()) {
      const TreeConfig cfg = make_tree(tree);
      const auto report = run_prediction(cfg, model, mapping, parse_models(model.models));
      emit(output, out, [&](std::ostream& o) { write_csv(o, report); },
           [&] { return to_json(report); });
    } else if (compare_cmd->parsed()) {
      const MeasurementSet ms = read_measurements(measurements_path);
      if (tree.procs == 0) tree.procs = ms.procs();
      if (tree.particles_per_proc == 0) {
        if (!ms.metadata().particles_per_process) {
          throw UsageError(
              "--particles-per-proc is required when the measurements lack it");
        }
        tree.particles_per_proc = *ms.metadata().particles_per_process;
      }
      const TreeConfig cfg = make_tree(tree);
      const auto prediction = run_prediction(cfg, model, mapping, parse_models(model.models));
      const auto report =
          compare(prediction, level_statistics(ms),
                  measured_stat == "max" ? MeasuredStat::Max : MeasuredStat::Mean);
      emit(output, out, [&](std::ostream& o) { write_csv(o, report); },
           [&] { return to_json(report); });
    } else if (lb->parsed()) {
      const MeasurementSet ms = read_measurements(measurements_path);
      const auto report = load_balance_report(ms, parse_phases(model.phases));
      emit(output, out, [&](std::ostream& o) { write_csv(o, report); },
           [&] { return to_json(report); });
    } else if (topo->parsed()) {
      if (distance->parsed()) {
        if (mapping.dims.empty()) throw UsageError("topology distance needs --dims");
        const TorusTopology t = TorusTopology::parse(mapping.dims);
        const NodeCoord a = parse_node(t, nodes[0]);
        const NodeCoord b = parse_node(t, nodes[1]);
        const int h = hop_distance(t, a, b);
        emit(output, out,
             [&](std::ostream& o) {
               o << "from,to,hops\n"
                 << t.index_of(a) << ',' << t.index_of(b) << ',' << h << '\n';
             },
             [&] {
               return nlohmann::json{{"dims", t.dims()}, {"from", a}, {"to", b}, {"hops", h}};
             });
      } else if (map_cmd->parsed()) {
        const Grid3 grid = process_grid(tree.procs);
        Count rpn = mapping.ranks_per_node != 0 ? mapping.ranks_per_node : 1;
        std::optional<Grid3> fold;
        if (!mapping.fold.empty()) {
          fold = parse_fold(mapping.fold);
          rpn = (*fold)[0] * (*fold)[1] * (*fold)[2];
        }
        const RankMapping m = RankMapping::make(grid, rpn, fold);
        const TorusTopology t =
            mapping.dims.empty() ? identity_torus(m) : TorusTopology::parse(mapping.dims);
        const Placement placement = Placement::make(m, t);
        emit(output, out,
             [&](std::ostream& o) {
               o << "rank,gx,gy,gz,node";
               for (std::size_t d = 0; d < t.rank(); ++d) o << ",t" << d;
               o << '\n';
               for (Rank r = 0; r < m.num_ranks(); ++r) {
                 const Grid3 g = m.grid_coord(r);
                 const NodeCoord n = placement.node_of(r);
                 o << r << ',' << g[0] << ',' << g[1] << ',' << g[2] << ',' << t.index_of(n);
                 for (int c : n) o << ',' << c;
                 o << '\n';
               }
             },
             [&] {
               nlohmann::json j{{"dims", t.dims()},
                                {"embedding", to_string(placement.embedding())},
                                {"fold", m.fold()},
                                {"ranks", nlohmann::json::array()}};
               for (Rank r = 0; r < m.num_ranks(); ++r) {
                 j["ranks"].push_back({{"rank", r},
                                       {"grid", m.grid_coord(r)},
                                       {"node", placement.node_of(r)}});
               }
               return j;
             });
      } else if (hops->parsed()) {
        const TreeConfig cfg = make_tree(tree);
        const Level level = level_arg(cfg, level_index);
        const PhaseKind phase = resolve_phase(cfg, level, phase_name);
        const RankMapping m = make_mapping(cfg, mapping, 1);
        const TorusTopology t =
            mapping.dims.empty() ? identity_torus(m) : TorusTopology::parse(mapping.dims);
        const auto annotated = annotate_hops(cfg, phase_plan(cfg, phase, level), m, t, rank);
        emit(output, out, [&](std::ostream& o) { write_csv(o, annotated); },
             [&] { return to_json(annotated); });
      }
    } else if (pattern->parsed()) {
      const TreeConfig cfg = make_tree(tree);
      const Level level = level_arg(cfg, level_index);
      const PhaseKind phase = resolve_phase(cfg, level, phase_name);
      const RankMapping m = make_mapping(cfg, mapping, 1);
      const auto matrix = pattern_matrix(cfg, level, phase, m);
      emit(output, out, [&](std::ostream& o) { write_csv(o, matrix); },
           [&] { return to_json(matrix, level, phase); });
    }
  } catch (const UsageError& e) {
    err << "fmmcomm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "fmmcomm: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? kExitUsage : kExitDomainError;
  }
  return kExitOk;
}

}  // namespace fmmcomm::cli
