#pragma once

// Spatial networks: uniform point clouds, fiber edge lists, and the
// repeater-augmented versions of the latter. SpatialNetwork is the read-only
// distance oracle the percolation engine consumes.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "qperc/errors.hpp"
#include "qperc/quantum_math.hpp"
#include "qperc/random.hpp"

namespace qperc {

using NodeId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// ---------------------------------------------------------------------------
// Point clouds

struct PointCloud {
  std::vector<Point> positions;
  double box_side = 1.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return positions.size(); }
};

inline PointCloud generate_uniform_points(std::size_t n, double box_side, std::uint64_t seed) {
  if (n < 1) throw DomainError("point cloud needs at least one point");
  if (!(box_side > 0.0) || !std::isfinite(box_side)) throw DomainError("box side must be positive");
  PointCloud cloud;
  cloud.box_side = box_side;
  cloud.seed = seed;
  cloud.positions.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(0.0, box_side);
    const double y = rng.uniform(0.0, box_side);
    cloud.positions.push_back({x, y});
  }
  return cloud;
}

inline double euclidean_distance(const PointCloud& cloud, std::size_t i, std::size_t j) {
  if (i >= cloud.size() || j >= cloud.size()) throw DomainError("point index out of range");
  if (i == j) return 0.0;
  return distance(cloud.positions[i], cloud.positions[j]);
}

// ---------------------------------------------------------------------------
// Edge lists

enum class NodeKind { Station, Repeater };

inline const char* to_string(NodeKind k) { return k == NodeKind::Station ? "station" : "repeater"; }

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double length_km = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Cable network. Node ids are opaque strings; pairs without a cable are
/// unreachable. At most one edge per unordered pair: duplicates keep the
/// shorter length.
class EdgeListNetwork {
 public:
  NodeId add_node(const std::string& id, NodeKind kind = NodeKind::Station,
                  std::optional<Point> position = std::nullopt) {
    if (id.empty()) throw ValidationError("node id must not be empty");
    if (auto it = index_.find(id); it != index_.end()) return it->second;
    const auto n = static_cast<NodeId>(ids_.size());
    ids_.push_back(id);
    kinds_.push_back(kind);
    positions_.push_back(position);
    index_.emplace(id, n);
    return n;
  }

  /// Returns true if a new edge was created, false if an existing one was
  /// kept or shortened.
  bool add_edge(NodeId u, NodeId v, double length_km) {
    if (u >= ids_.size() || v >= ids_.size()) throw ValidationError("edge endpoint out of range");
    if (u == v) throw ValidationError("self-loop on node '" + ids_[u] + "'");
    if (!(length_km > 0.0) || !std::isfinite(length_km))
      throw ValidationError("edge " + ids_[u] + "-" + ids_[v] + " has non-positive length");
    if (u > v) std::swap(u, v);
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
    if (auto it = edge_index_.find(key); it != edge_index_.end()) {
      auto& e = edges_[it->second];
      e.length_km = std::min(e.length_km, length_km);
      return false;
    }
    edge_index_.emplace(key, edges_.size());
    edges_.push_back({u, v, length_km});
    return true;
  }

  bool add_edge(const std::string& u, const std::string& v, double length_km) {
    const NodeId a = add_node(u);
    const NodeId b = add_node(v);
    return add_edge(a, b, length_km);
  }

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& node_ids() const { return ids_; }
  const std::string& id(NodeId n) const { return ids_.at(n); }
  NodeKind kind(NodeId n) const { return kinds_.at(n); }
  void set_kind(NodeId n, NodeKind k) { kinds_.at(n) = k; }
  const std::optional<Point>& position(NodeId n) const { return positions_.at(n); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::optional<NodeId> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double total_length() const {
    double sum = 0.0;
    for (const auto& e : edges_) sum += e.length_km;
    return sum;
  }

  /// Nodes sorted by id, edges by (id(u), id(v)) with id(u) < id(v).
  EdgeListNetwork canonical() const {
    std::vector<NodeId> order(ids_.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return ids_[a] < ids_[b]; });
    EdgeListNetwork out;
    for (NodeId n : order) out.add_node(ids_[n], kinds_[n], positions_[n]);
    std::vector<Edge> sorted;
    sorted.reserve(edges_.size());
    for (const auto& e : edges_) {
      NodeId u = *out.find(ids_[e.u]);
      NodeId v = *out.find(ids_[e.v]);
      if (u > v) std::swap(u, v);
      sorted.push_back({u, v, e.length_km});
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    for (const auto& e : sorted) out.add_edge(e.u, e.v, e.length_km);
    return out;
  }

  friend bool operator==(const EdgeListNetwork& a, const EdgeListNetwork& b) {
    return a.ids_ == b.ids_ && a.kinds_ == b.kinds_ && a.positions_ == b.positions_ &&
           a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<NodeKind> kinds_;
  std::vector<std::optional<Point>> positions_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
};

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_number(std::string_view field, std::size_t line, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
  return v;
}

/// Yields (line number, content) for non-blank, non-comment lines.
template <class F>
void for_each_data_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    f(number, t);
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Edge-list CSV with header `u,v,length_km`. A row with empty v and length
/// (`id,,`) declares a node without cables. Lines starting with '#' are
/// comments.
inline EdgeListNetwork parse_edge_list(std::istream& in) {
  EdgeListNetwork net;
  bool header_seen = false;
  detail::for_each_data_line(in, [&](std::size_t line, std::string_view text) {
    auto fields = detail::split_csv(text);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "u" || fields[1] != "v" || fields[2] != "length_km")
        throw ParseError("expected header 'u,v,length_km'", line);
      header_seen = true;
      return;
    }
    if (fields.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line);
    if (fields[0].empty()) throw ParseError("empty node id", line);
    if (fields[1].empty() && fields[2].empty()) {
      net.add_node(std::string(fields[0]));
      return;
    }
    if (fields[1].empty()) throw ParseError("empty node id", line);
    const double len = detail::parse_number(fields[2], line, "length");
    try {
      net.add_edge(std::string(fields[0]), std::string(fields[1]), len);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
  });
  if (!header_seen) throw ParseError("missing header 'u,v,length_km'", 1);
  return net;
}

inline EdgeListNetwork load_edge_list(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_edge_list(in);
}

/// Writes the canonical form; `comment` lines (without '#') go first.
inline void write_edge_list(std::ostream& out, const EdgeListNetwork& net,
                            const std::vector<std::string>& comment = {}) {
  const auto canon = net.canonical();
  for (const auto& c : comment) out << "# " << c << '\n';
  out << "u,v,length_km\n";
  std::vector<bool> has_edge(canon.node_count(), false);
  for (const auto& e : canon.edges()) has_edge[e.u] = has_edge[e.v] = true;
  for (NodeId n = 0; n < canon.node_count(); ++n)
    if (!has_edge[n]) out << canon.id(n) << ",,\n";
  for (const auto& e : canon.edges())
    out << canon.id(e.u) << ',' << canon.id(e.v) << ',' << detail::format_double(e.length_km) << '\n';
}

inline void save_edge_list(const std::string& path, const EdgeListNetwork& net,
                           const std::vector<std::string>& comment = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_edge_list(out, net, comment);
}

/// Point-cloud CSV with header `id,x,y`. Rows must be ids 0..N-1 in order.
inline PointCloud parse_point_cloud(std::istream& in, double box_side = 0.0) {
  PointCloud cloud;
  bool header_seen = false;
  double max_coord = 0.0;
  detail::for_each_data_line(in, [&](std::size_t line, std::string_view text) {
    auto fields = detail::split_csv(text);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "id" || fields[1] != "x" || fields[2] != "y")
        throw ParseError("expected header 'id,x,y'", line);
      header_seen = true;
      return;
    }
    if (fields.size() != 3) throw ParseError("expected 3 fields", line);
    const double id = detail::parse_number(fields[0], line, "id");
    if (id != static_cast<double>(cloud.size()))
      throw ParseError("point ids must be 0..N-1 in order", line);
    const double x = detail::parse_number(fields[1], line, "x");
    const double y = detail::parse_number(fields[2], line, "y");
    if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0 || y < 0.0)
      throw ParseError("coordinates must be finite and non-negative", line);
    max_coord = std::max({max_coord, x, y});
    cloud.positions.push_back({x, y});
  });
  if (!header_seen) throw ParseError("missing header 'id,x,y'", 1);
  if (cloud.positions.empty()) throw ValidationError("point cloud is empty");
  cloud.box_side = box_side > max_coord ? box_side : std::nextafter(max_coord, kUnreachable);
  return cloud;
}

inline PointCloud load_point_cloud(const std::string& path, double box_side = 0.0) {
  auto in = detail::open_input(path);
  return parse_point_cloud(in, box_side);
}

inline void write_point_cloud(std::ostream& out, const PointCloud& cloud,
                              const std::vector<std::string>& comment = {}) {
  for (const auto& c : comment) out << "# " << c << '\n';
  out << "id,x,y\n";
  for (std::size_t i = 0; i < cloud.size(); ++i)
    out << i << ',' << detail::format_double(cloud.positions[i].x) << ','
        << detail::format_double(cloud.positions[i].y) << '\n';
}

// ---------------------------------------------------------------------------
// Repeaters

struct RepeaterConfig {
  double mean_segment_km = 50.0;
  std::uint64_t seed = 0;
};

/// Cuts every cable at the points of a homogeneous Poisson process of
/// intensity 1/mean_segment_km and inserts a repeater at each cut. Cable i is
/// cut with its own sub-seed, so changing one cable does not move the cuts on
/// any other.
inline EdgeListNetwork insert_repeaters(const EdgeListNetwork& net, const RepeaterConfig& cfg) {
  if (!(cfg.mean_segment_km > 0.0) || !std::isfinite(cfg.mean_segment_km))
    throw DomainError("mean segment length must be positive");
  EdgeListNetwork out;
  for (NodeId n = 0; n < net.node_count(); ++n) out.add_node(net.id(n), net.kind(n), net.position(n));
  std::vector<double> cuts;
  for (std::size_t i = 0; i < net.edges().size(); ++i) {
    const auto& e = net.edges()[i];
    Rng rng(derive_seed(cfg.seed, "edge", i));
    cuts.clear();
    double t = 0.0;
    for (;;) {
      const double gap = rng.exponential(cfg.mean_segment_km);
      if (gap <= 0.0) continue;
      t += gap;
      if (t >= e.length_km) break;
      cuts.push_back(t);
    }
    NodeId prev = e.u;
    double prev_t = 0.0;
    const auto& pu = net.position(e.u);
    const auto& pv = net.position(e.v);
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      const std::string id = net.id(e.u) + "~" + net.id(e.v) + "#" + std::to_string(k + 1);
      if (out.find(id)) throw ValidationError("repeater id '" + id + "' collides with an existing node");
      std::optional<Point> pos;
      if (pu && pv) {
        const double f = cuts[k] / e.length_km;
        pos = Point{pu->x + f * (pv->x - pu->x), pu->y + f * (pv->y - pu->y)};
      }
      const NodeId r = out.add_node(id, NodeKind::Repeater, pos);
      out.add_edge(prev, r, cuts[k] - prev_t);
      prev = r;
      prev_t = cuts[k];
    }
    out.add_edge(prev, e.v, e.length_km - prev_t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic fiber network

namespace detail {

inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Proper crossing of segments pq and rs that do not share an endpoint.
inline bool segments_cross(const Point& p, const Point& q, const Point& r, const Point& s) {
  const double d1 = cross(p, q, r), d2 = cross(p, q, s);
  const double d3 = cross(r, s, p), d4 = cross(r, s, q);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace detail

/// Synthetic stand-in for a continental fiber backbone: stations scattered
/// uniformly, joined by a Euclidean minimum spanning tree plus the shortest
/// non-crossing extra cables until `edges` is reached. Coordinates are scaled
/// so the mean cable length is `mean_length_km`. The result is planar and
/// connected.
inline EdgeListNetwork generate_synthetic_fiber(std::size_t nodes, std::size_t edges,
                                                std::uint64_t seed,
                                                double mean_length_km = 500.0) {
  if (nodes < 2) throw DomainError("fiber network needs at least two stations");
  if (edges + 1 < nodes) throw DomainError("too few edges for a connected network");
  if (nodes >= 3 && edges > 3 * nodes - 6) throw DomainError("too many edges for a planar network");
  if (nodes == 2 && edges != 1) throw DomainError("two stations admit exactly one cable");
  if (!(mean_length_km > 0.0)) throw DomainError("mean cable length must be positive");

  const auto cloud = generate_uniform_points(nodes, 1.0, derive_seed(seed, "stations", 0));
  const auto& pts = cloud.positions;
  std::vector<std::pair<NodeId, NodeId>> chosen;

  // Prim on the complete Euclidean graph.
  {
    std::vector<double> best(nodes, kUnreachable);
    std::vector<NodeId> parent(nodes, 0);
    std::vector<bool> in_tree(nodes, false);
    best[0] = 0.0;
    for (std::size_t step = 0; step < nodes; ++step) {
      NodeId u = 0;
      double bu = kUnreachable;
      for (NodeId i = 0; i < nodes; ++i)
        if (!in_tree[i] && best[i] < bu) bu = best[i], u = i;
      in_tree[u] = true;
      if (step > 0) chosen.emplace_back(std::min(u, parent[u]), std::max(u, parent[u]));
      for (NodeId i = 0; i < nodes; ++i) {
        if (in_tree[i]) continue;
        const double d = distance(pts[u], pts[i]);
        if (d < best[i]) best[i] = d, parent[i] = u;
      }
    }
  }

  std::vector<std::pair<NodeId, NodeId>> candidates;
  candidates.reserve(nodes * (nodes - 1) / 2);
  for (NodeId i = 0; i < nodes; ++i)
    for (NodeId j = i + 1; j < nodes; ++j) candidates.emplace_back(i, j);
  std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    return distance(pts[a.first], pts[a.second]) < distance(pts[b.first], pts[b.second]);
  });
  std::vector<std::uint64_t> present;
  for (auto [u, v] : chosen) present.push_back((std::uint64_t{u} << 32) | v);
  std::sort(present.begin(), present.end());
  for (auto [u, v] : candidates) {
    if (chosen.size() >= edges) break;
    if (std::binary_search(present.begin(), present.end(), (std::uint64_t{u} << 32) | v)) continue;
    bool ok = true;
    for (auto [a, b] : chosen) {
      if (a == u || a == v || b == u || b == v) continue;
      if (detail::segments_cross(pts[u], pts[v], pts[a], pts[b])) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.emplace_back(u, v);
  }
  if (chosen.size() < edges) throw DomainError("could not place the requested number of planar edges");

  double mean = 0.0;
  for (auto [u, v] : chosen) mean += distance(pts[u], pts[v]);
  mean /= static_cast<double>(chosen.size());
  const double scale = mean_length_km / mean;

  EdgeListNetwork net;
  const int width = static_cast<int>(std::to_string(nodes - 1).size());
  for (std::size_t i = 0; i < nodes; ++i) {
    std::string num = std::to_string(i);
    num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
    net.add_node("S" + num, NodeKind::Station, Point{pts[i].x * scale, pts[i].y * scale});
  }
  for (auto [u, v] : chosen) net.add_edge(u, v, distance(pts[u], pts[v]) * scale);
  return net;
}

// ---------------------------------------------------------------------------
// Distance oracle

/// Immutable distance oracle over N nodes: Euclidean for point clouds (with a
/// uniform cell grid for radius queries), cable lengths for edge lists with
/// every other pair unreachable.
class SpatialNetwork {
 public:
  static SpatialNetwork from_points(const PointCloud& cloud) {
    if (cloud.size() == 0) throw DomainError("network is empty");
    PointsData data;
    data.points = cloud.positions;
    double lo_x = kUnreachable, lo_y = kUnreachable, hi_x = -kUnreachable, hi_y = -kUnreachable;
    for (const auto& p : data.points) {
      lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
    }
    data.origin = {lo_x, lo_y};
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-300});
    data.grid = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(cloud.size()) / 2.0)));
    data.cell = span / static_cast<double>(data.grid) * (1.0 + 1e-12);
    const std::size_t cells = data.grid * data.grid;
    data.cell_start.assign(cells + 1, 0);
    std::vector<std::size_t> cell_of(data.points.size());
    for (std::size_t i = 0; i < data.points.size(); ++i) {
      cell_of[i] = data.cell_index(data.points[i]);
      ++data.cell_start[cell_of[i] + 1];
    }
    std::partial_sum(data.cell_start.begin(), data.cell_start.end(), data.cell_start.begin());
    data.cell_points.resize(data.points.size());
    auto fill = data.cell_start;
    for (std::size_t i = 0; i < data.points.size(); ++i)
      data.cell_points[fill[cell_of[i]]++] = static_cast<NodeId>(i);
    return SpatialNetwork(std::move(data));
  }

  static SpatialNetwork from_edges(const EdgeListNetwork& edges) {
    if (edges.node_count() == 0) throw DomainError("network is empty");
    EdgesData data;
    data.ids = edges.node_ids();
    data.adjacency.resize(edges.node_count());
    for (const auto& e : edges.edges()) {
      data.adjacency[e.u].push_back({e.v, e.length_km});
      data.adjacency[e.v].push_back({e.u, e.length_km});
    }
    for (auto& row : data.adjacency)
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return SpatialNetwork(std::move(data));
  }

  std::size_t size() const {
    return std::visit([](const auto& d) { return d.size(); }, data_);
  }

  bool is_point_cloud() const { return std::holds_alternative<PointsData>(data_); }

  std::string label(NodeId n) const {
    if (const auto* e = std::get_if<EdgesData>(&data_)) return e->ids.at(n);
    return std::to_string(n);
  }

  /// Direct node-to-node distance; kUnreachable when no cable joins them.
  double distance(NodeId u, NodeId v) const {
    if (u == v) return 0.0;
    if (const auto* p = std::get_if<PointsData>(&data_)) return qperc::distance(p->points[u], p->points[v]);
    const auto& row = std::get<EdgesData>(data_).adjacency[u];
    auto it = std::lower_bound(row.begin(), row.end(), v,
                               [](const auto& a, NodeId key) { return a.first < key; });
    return it != row.end() && it->first == v ? it->second : kUnreachable;
  }

  /// Calls f(v, d) for every v != u with direct distance d < radius.
  template <class F>
  void for_each_within(NodeId u, double radius, F&& f) const {
    if (const auto* e = std::get_if<EdgesData>(&data_)) {
      for (const auto& [v, d] : e->adjacency[u])
        if (d < radius) f(v, d);
      return;
    }
    const auto& p = std::get<PointsData>(data_);
    const Point& pu = p.points[u];
    const auto g = static_cast<long>(p.grid);
    long x0 = 0, x1 = g - 1, y0 = 0, y1 = g - 1;
    if (std::isfinite(radius)) {
      x0 = std::max(0L, p.coord((pu.x - radius - p.origin.x) / p.cell));
      x1 = std::min(g - 1, p.coord((pu.x + radius - p.origin.x) / p.cell));
      y0 = std::max(0L, p.coord((pu.y - radius - p.origin.y) / p.cell));
      y1 = std::min(g - 1, p.coord((pu.y + radius - p.origin.y) / p.cell));
    }
    for (long cy = y0; cy <= y1; ++cy) {
      for (long cx = x0; cx <= x1; ++cx) {
        const auto c = static_cast<std::size_t>(cy * g + cx);
        for (std::size_t k = p.cell_start[c]; k < p.cell_start[c + 1]; ++k) {
          const NodeId v = p.cell_points[k];
          if (v == u) continue;
          const double d = qperc::distance(pu, p.points[v]);
          if (d < radius) f(v, d);
        }
      }
    }
  }

  /// Calls f(u, v, d) once per unordered pair u < v at finite distance.
  template <class F>
  void for_each_pair(F&& f) const {
    if (const auto* e = std::get_if<EdgesData>(&data_)) {
      for (NodeId u = 0; u < e->adjacency.size(); ++u)
        for (const auto& [v, d] : e->adjacency[u])
          if (u < v) f(u, v, d);
      return;
    }
    const auto& p = std::get<PointsData>(data_);
    for (NodeId u = 0; u < p.points.size(); ++u)
      for (NodeId v = u + 1; v < p.points.size(); ++v) f(u, v, qperc::distance(p.points[u], p.points[v]));
  }

 private:
  struct PointsData {
    std::vector<Point> points;
    Point origin;
    std::size_t grid = 1;
    double cell = 1.0;
    std::vector<std::size_t> cell_start;
    std::vector<NodeId> cell_points;

    std::size_t size() const { return points.size(); }
    long coord(double t) const {
      if (t <= 0.0) return 0;
      if (t >= static_cast<double>(grid)) return static_cast<long>(grid) - 1;
      return static_cast<long>(t);
    }
    std::size_t cell_index(const Point& q) const {
      const auto cx = static_cast<std::size_t>(coord((q.x - origin.x) / cell));
      const auto cy = static_cast<std::size_t>(coord((q.y - origin.y) / cell));
      return cy * grid + cx;
    }
  };

  struct EdgesData {
    std::vector<std::string> ids;
    std::vector<std::vector<std::pair<NodeId, double>>> adjacency;
    std::size_t size() const { return ids.size(); }
  };

  template <class Data>
  explicit SpatialNetwork(Data&& data) : data_(std::forward<Data>(data)) {}

  std::variant<PointsData, EdgesData> data_;
};

}  // namespace qperc
