#include "fmmcomm/topology.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <map>
#include <numeric>

#include "fmmcomm/error.hpp"
#include "fmmcomm/kernels.hpp"

namespace fmmcomm {

namespace {

int log2_exact(Count v) { return std::countr_zero(v); }

bool is_pow2(Count v) { return v != 0 && std::has_single_bit(v); }

int wrap(long value, long extent) {
  const long r = value % extent;
  return static_cast<int>(r < 0 ? r + extent : r);
}

PartnerClass classify(const Offset3& o) {
  const int nonzero = (o[0] != 0) + (o[1] != 0) + (o[2] != 0);
  switch (nonzero) {
    case 1: return PartnerClass::Face;
    case 2: return PartnerClass::Edge;
    default: return PartnerClass::Corner;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// TorusTopology

TorusTopology TorusTopology::make(std::vector<int> dims) {
  if (dims.empty()) {
    throw Error(ErrorCode::InvalidArgument, "torus needs at least one dimension");
  }
  for (int extent : dims) {
    if (extent < 1) {
      throw Error(ErrorCode::InvalidArgument, "torus extents must be >= 1");
    }
  }
  TorusTopology t;
  t.dims_ = std::move(dims);
  return t;
}

TorusTopology TorusTopology::parse(std::string_view text) {
  std::vector<int> dims;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('x', start), text.size());
    const std::string_view token = text.substr(start, end - start);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() ||
        ptr != token.data() + token.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "malformed torus descriptor '" + std::string(text) + "'");
    }
    dims.push_back(value);
    start = end + 1;
  }
  return make(std::move(dims));
}

Count TorusTopology::node_count() const {
  Count n = 1;
  for (int e : dims_) n *= static_cast<Count>(e);
  return n;
}

Count TorusTopology::index_of(const NodeCoord& c) const {
  check(c);
  Count index = 0;
  for (std::size_t d = dims_.size(); d-- > 0;) {
    index = index * static_cast<Count>(dims_[d]) + static_cast<Count>(c[d]);
  }
  return index;
}

NodeCoord TorusTopology::coord_of(Count index) const {
  if (index >= node_count()) {
    throw Error(ErrorCode::InvalidArgument,
                "node index " + std::to_string(index) + " outside torus " +
                    to_string());
  }
  NodeCoord c(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    c[d] = static_cast<int>(index % static_cast<Count>(dims_[d]));
    index /= static_cast<Count>(dims_[d]);
  }
  return c;
}

void TorusTopology::check(const NodeCoord& c) const {
  if (c.size() != dims_.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "coordinate rank " + std::to_string(c.size()) +
                    " does not match torus " + to_string());
  }
  for (std::size_t d = 0; d < c.size(); ++d) {
    if (c[d] < 0 || c[d] >= dims_[d]) {
      throw Error(ErrorCode::InvalidArgument,
                  "coordinate " + std::to_string(c[d]) + " out of range in dimension " +
                      std::to_string(d) + " of torus " + to_string());
    }
  }
}

int TorusTopology::diameter() const {
  int total = 0;
  for (int e : dims_) total += e / 2;
  return total;
}

std::string TorusTopology::to_string() const {
  std::string s;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (d) s += 'x';
    s += std::to_string(dims_[d]);
  }
  return s;
}

int hop_distance(const TorusTopology& t, const NodeCoord& a, const NodeCoord& b) {
  t.check(a);
  t.check(b);
  int total = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const int diff = std::abs(a[d] - b[d]);
    total += std::min(diff, t.dims()[d] - diff);
  }
  return total;
}

// ---------------------------------------------------------------------------
// RankMapping

Grid3 default_fold(const Grid3& process_grid, Count ranks_per_node) {
  if (!is_pow2(ranks_per_node)) {
    throw Error(ErrorCode::UnsupportedConfiguration,
                "ranks per node must be a power of two");
  }
  Grid3 fold{1, 1, 1};
  for (Count placed = 1; placed < ranks_per_node; placed *= 2) {
    int best = -1;
    for (int d = 0; d < 3; ++d) {
      const Count extent = process_grid[d] / fold[d];
      if (extent < 2) continue;
      if (best < 0) {
        best = d;
        continue;
      }
      const Count best_extent = process_grid[best] / fold[best];
      if (extent > best_extent ||
          (extent == best_extent && fold[d] < fold[best])) {
        best = d;
      }
    }
    if (best < 0) {
      throw Error(ErrorCode::UnsupportedConfiguration,
                  "more ranks per node than processes");
    }
    fold[best] *= 2;
  }
  return fold;
}

RankMapping RankMapping::make(const Grid3& process_grid, Count ranks_per_node,
                              const std::optional<Grid3>& fold) {
  for (Count extent : process_grid) {
    if (!is_pow2(extent)) {
      throw Error(ErrorCode::UnsupportedConfiguration,
                  "process grid extents must be powers of two");
    }
  }
  RankMapping m;
  m.grid_ = process_grid;
  m.ranks_per_node_ = ranks_per_node;
  m.fold_ = fold ? *fold : default_fold(process_grid, ranks_per_node);
  Count product = 1;
  for (int d = 0; d < 3; ++d) {
    if (!is_pow2(m.fold_[d]) || m.fold_[d] > process_grid[d]) {
      throw Error(ErrorCode::UnsupportedConfiguration,
                  "fold factors must be powers of two within the process grid");
    }
    product *= m.fold_[d];
    m.bits_[d] = log2_exact(process_grid[d]);
  }
  if (product != ranks_per_node) {
    throw Error(ErrorCode::UnsupportedConfiguration,
                "fold factors multiply to " + std::to_string(product) +
                    ", expected " + std::to_string(ranks_per_node) +
                    " ranks per node");
  }
  return m;
}

Grid3 RankMapping::node_grid() const {
  return {grid_[0] / fold_[0], grid_[1] / fold_[1], grid_[2] / fold_[2]};
}

Grid3 RankMapping::grid_coord(Rank rank) const {
  if (rank >= num_ranks()) {
    throw Error(ErrorCode::InvalidArgument,
                "rank " + std::to_string(rank) + " outside " +
                    std::to_string(num_ranks()) + " processes");
  }
  Grid3 coord{0, 0, 0};
  std::array<int, 3> used{0, 0, 0};
  int d = 0;
  for (int bit = 0; rank >> bit; ++bit) {
    while (used[d] == bits_[d]) d = (d + 1) % 3;
    coord[d] |= ((rank >> bit) & 1) << used[d];
    ++used[d];
    d = (d + 1) % 3;
  }
  return coord;
}

Rank RankMapping::rank_at(const Grid3& coord) const {
  for (int d = 0; d < 3; ++d) {
    if (coord[d] >= grid_[d]) {
      throw Error(ErrorCode::InvalidArgument, "grid coordinate out of range");
    }
  }
  Rank rank = 0;
  std::array<int, 3> used{0, 0, 0};
  const int total = bits_[0] + bits_[1] + bits_[2];
  int d = 0;
  for (int bit = 0; bit < total; ++bit) {
    while (used[d] == bits_[d]) d = (d + 1) % 3;
    rank |= ((coord[d] >> used[d]) & 1) << bit;
    ++used[d];
    d = (d + 1) % 3;
  }
  return rank;
}

Grid3 RankMapping::node_grid_coord(const Grid3& coord) const {
  return {coord[0] / fold_[0], coord[1] / fold_[1], coord[2] / fold_[2]};
}

// ---------------------------------------------------------------------------
// Placement

std::string_view to_string(Embedding e) {
  return e == Embedding::Direct ? "direct" : "bit-split";
}

Placement Placement::make(const RankMapping& mapping, const TorusTopology& torus) {
  Placement p(mapping, torus);
  const Grid3 nodes = mapping.node_grid();
  const auto& dims = torus.dims();

  if (dims.size() == 3 && static_cast<Count>(dims[0]) >= nodes[0] &&
      static_cast<Count>(dims[1]) >= nodes[1] &&
      static_cast<Count>(dims[2]) >= nodes[2]) {
    p.embedding_ = Embedding::Direct;
    return p;
  }

  const bool pow2_torus = std::all_of(dims.begin(), dims.end(), [](int e) {
    return is_pow2(static_cast<Count>(e));
  });
  int node_bits = 0;
  for (Count e : nodes) node_bits += log2_exact(e);
  int torus_bits = 0;
  for (int e : dims) torus_bits += pow2_torus ? log2_exact(static_cast<Count>(e)) : 0;
  if (!pow2_torus || node_bits > torus_bits) {
    throw Error(ErrorCode::TopologyMismatch,
                "node grid " + std::to_string(nodes[0]) + "x" +
                    std::to_string(nodes[1]) + "x" + std::to_string(nodes[2]) +
                    " does not fit torus " + torus.to_string());
  }

  // Fill torus dimensions in order with node-grid bits, x low-to-high first.
  p.embedding_ = Embedding::BitSplit;
  int torus_dim = 0;
  int position = 0;
  for (int d = 0; d < 3; ++d) {
    const int bits = log2_exact(nodes[d]);
    for (int j = 0; j < bits; ++j) {
      while (position == log2_exact(static_cast<Count>(dims[torus_dim]))) {
        ++torus_dim;
        position = 0;
      }
      p.slots_[d].push_back({torus_dim, position});
      ++position;
    }
  }
  return p;
}

NodeCoord Placement::node_of_grid(const Grid3& coord) const {
  const Grid3 node = mapping_.node_grid_coord(coord);
  NodeCoord out(torus_.rank(), 0);
  if (embedding_ == Embedding::Direct) {
    for (int d = 0; d < 3; ++d) out[d] = static_cast<int>(node[d]);
    return out;
  }
  for (int d = 0; d < 3; ++d) {
    for (std::size_t j = 0; j < slots_[d].size(); ++j) {
      if ((node[d] >> j) & 1) {
        out[slots_[d][j].torus_dim] |= 1 << slots_[d][j].position;
      }
    }
  }
  return out;
}

NodeCoord Placement::node_of(Rank rank) const {
  return node_of_grid(mapping_.grid_coord(rank));
}

NodeCoord map_rank_to_node(const RankMapping& m, const TorusTopology& t, Rank rank) {
  return Placement::make(m, t).node_of(rank);
}

TorusTopology identity_torus(const RankMapping& m) {
  const Grid3 nodes = m.node_grid();
  return TorusTopology::make({static_cast<int>(nodes[0]), static_cast<int>(nodes[1]),
                              static_cast<int>(nodes[2])});
}

// ---------------------------------------------------------------------------
// Partners and hop annotation

Grid3 global_partner_stride(const TreeConfig& cfg, const Level& level) {
  if (level.zone != Zone::Global) {
    throw Error(ErrorCode::WrongPhase, "partner stride is defined for global levels");
  }
  // The root is a single cell with no distinct neighbors.
  if (level.index == 0) return {1, 1, 1};
  Grid3 stride{};
  for (int d = 0; d < 3; ++d) {
    const Count cells = Count{1} << level.index;
    stride[d] = std::max<Count>(1, cfg.process_grid()[d] / cells);
  }
  return stride;
}

Grid3 plan_stride(const TreeConfig& cfg, const PhasePlan& plan) {
  if (plan.level.zone == Zone::Global) return global_partner_stride(cfg, plan.level);
  return {1, 1, 1};
}

std::vector<PartnerOffset> partner_offsets(const TreeConfig& cfg,
                                           const PhasePlan& plan,
                                           const Grid3& coord) {
  std::vector<PartnerOffset> out;
  if (plan.empty()) return out;
  const bool uniform = plan.groups.front().cls == PartnerClass::Uniform;

  if (plan.phase == PhaseKind::GlobalM2M) {
    const Grid3 stride = plan_stride(cfg, plan);
    Offset3 step{};
    for (int d = 0; d < 3; ++d) {
      const bool upper_child = (coord[d] / stride[d]) % 2 == 1;
      step[d] = upper_child ? -1 : 1;
    }
    for (int mask = 1; mask < 8; ++mask) {
      Offset3 o{(mask & 1) ? step[0] : 0, (mask & 2) ? step[1] : 0,
                (mask & 4) ? step[2] : 0};
      out.push_back({o, PartnerClass::Uniform});
    }
    return out;
  }

  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const Offset3 o{dx, dy, dz};
        out.push_back({o, uniform ? PartnerClass::Uniform : classify(o)});
      }
    }
  }
  return out;
}

double HopAnnotatedPlan::mean_hops() const {
  if (messages.empty()) return 0.0;
  double total = 0.0;
  for (const auto& m : messages) total += m.hops;
  return total / static_cast<double>(messages.size());
}

double HopAnnotatedPlan::mean_extra_hops() const {
  if (messages.empty()) return 0.0;
  double total = 0.0;
  for (const auto& m : messages) total += m.extra_hops();
  return total / static_cast<double>(messages.size());
}

HopAnnotatedPlan annotate_hops(const TreeConfig& cfg, const PhasePlan& plan,
                               const Placement& placement, Rank rank) {
  const RankMapping& mapping = placement.mapping();
  if (mapping.process_grid() != cfg.process_grid()) {
    throw Error(ErrorCode::TopologyMismatch,
                "rank mapping process grid differs from the tree configuration");
  }
  HopAnnotatedPlan out{plan, rank, {}};
  const Grid3 own = mapping.grid_coord(rank);
  const auto offsets = partner_offsets(cfg, plan, own);
  if (offsets.empty()) return out;

  const Grid3 stride = plan_stride(cfg, plan);
  const Grid3& grid = cfg.process_grid();
  const NodeCoord own_node = placement.node_of_grid(own);
  const std::size_t n = offsets.size();
  const std::size_t rank_dims = placement.torus().rank();

  std::vector<std::int32_t> a(rank_dims * n), b(rank_dims * n), hops(n);
  out.messages.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& po = offsets[k];
    Grid3 partner{};
    for (int d = 0; d < 3; ++d) {
      partner[d] = static_cast<Count>(
          wrap(static_cast<long>(own[d]) +
                   static_cast<long>(po.offset[d]) * static_cast<long>(stride[d]),
               static_cast<long>(grid[d])));
    }
    const NodeCoord node = placement.node_of_grid(partner);
    int crossed = 0;
    for (std::size_t d = 0; d < rank_dims; ++d) {
      a[d * n + k] = own_node[d];
      b[d * n + k] = node[d];
      crossed += own_node[d] != node[d];
    }
    const PartnerGroup* group = plan.group(po.cls);
    PartnerMessage msg;
    msg.offset = po.offset;
    msg.cls = po.cls;
    msg.partner = mapping.rank_at(partner);
    msg.bytes = group ? group->bytes_per_partner : 0;
    msg.min_hops = crossed;
    out.messages.push_back(msg);
  }

  std::vector<std::int32_t> dims(placement.torus().dims().begin(),
                                 placement.torus().dims().end());
  kernels::torus_distances(dims, a, b, hops);
  for (std::size_t k = 0; k < n; ++k) out.messages[k].hops = hops[k];
  return out;
}

HopAnnotatedPlan annotate_hops(const TreeConfig& cfg, const PhasePlan& plan,
                               const RankMapping& m, const TorusTopology& t,
                               Rank rank) {
  return annotate_hops(cfg, plan, Placement::make(m, t), rank);
}

// ---------------------------------------------------------------------------
// Pattern matrix

Count PatternMatrix::row_sum(Rank src) const {
  Count total = 0;
  for (const auto& e : entries) {
    if (e.src == src) total += e.bytes;
  }
  return total;
}

Count PatternMatrix::row_nonzeros(Rank src) const {
  return static_cast<Count>(std::count_if(
      entries.begin(), entries.end(),
      [src](const PatternEntry& e) { return e.src == src && e.bytes != 0; }));
}

PatternMatrix pattern_matrix(const TreeConfig& cfg, const Level& level,
                             PhaseKind phase, const RankMapping& m) {
  if (cfg.num_processes() > kPatternRankLimit) {
    throw Error(ErrorCode::SizeLimit,
                "pattern matrix limited to " + std::to_string(kPatternRankLimit) +
                    " ranks");
  }
  const PhasePlan plan = phase_plan(cfg, phase, level);
  const Placement placement = Placement::make(m, identity_torus(m));
  PatternMatrix matrix{cfg.num_processes(), {}};
  for (Rank src = 0; src < cfg.num_processes(); ++src) {
    std::map<Rank, Count> row;
    for (const auto& msg : annotate_hops(cfg, plan, placement, src).messages) {
      row[msg.partner] += msg.bytes;
    }
    for (const auto& [dst, bytes] : row) {
      if (bytes != 0) matrix.entries.push_back({src, dst, bytes});
    }
  }
  return matrix;
}

}  // namespace fmmcomm
