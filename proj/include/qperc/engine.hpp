#pragma once

// The alpha-percolation fixed-point machine.
//
// Every node starts as a singleton component with the base range. Two active
// components a, b connect when their effective distance satisfies
// d_ab < min(r_a, r_b); connecting them (contraction) yields one component of
// size s_a + s_b whose range is recomputed from the size, and whose distance
// to any third component is the smaller of the two it replaces. A component
// that cannot reach any other active component (all d_ab >= r_a) is isolated
// for good; it is reduced exactly once, turning every pair of its neighbors
// b, c into d_bc = min(d_bc, d_ab + d_ac), and leaves the active set. The run
// ends when nothing is active; the removed components are the final
// partition, which does not depend on the order the rules fire in.
//
// Two reduction back ends produce identical partitions:
//  * PercolationState materialises the effective distance graph and inserts
//    shortcuts explicitly, O(k^2) per reduction.
//  * RelayPathRunner never stores shortcuts. It always expands the active
//    component with the smallest range, searching node-level shortest paths
//    that may pass through removed components at no internal cost, bounded by
//    that component's range. Suited to large dense point clouds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "qperc/errors.hpp"
#include "qperc/quantum_math.hpp"
#include "qperc/random.hpp"
#include "qperc/topology.hpp"

namespace qperc {

using ComponentId = std::uint32_t;
using Block = std::vector<NodeId>;
using Partition = std::vector<Block>;

struct Component {
  ComponentId id = 0;
  std::vector<NodeId> members;
  double range = 0.0;

  std::size_t size() const { return members.size(); }
};

struct MergeEvent {
  ComponentId a = 0;
  ComponentId b = 0;
  ComponentId merged = 0;
  std::size_t size = 0;
  double range = 0.0;
  /// Effective distance the connection was made over.
  double distance = 0.0;
  /// The distance was realised through one or more removed relays.
  bool via_shortcut = false;
};

struct ReduceEvent {
  ComponentId component = 0;
  std::size_t size = 0;
  double range = 0.0;
  /// Pairs whose distance the reduction lowered (0 for the relay-path back
  /// end, which never materialises shortcuts).
  std::size_t shortcuts = 0;
};

using Event = std::variant<MergeEvent, ReduceEvent>;

struct Shortcut {
  ComponentId b = 0;
  ComponentId c = 0;
  double before = kUnreachable;
  double after = kUnreachable;
};

enum class ReductionMode { ExplicitShortcuts, ShortestPath };
enum class SelectionPolicy { Lexicographic, Random };

inline const char* to_string(ReductionMode m) {
  return m == ReductionMode::ExplicitShortcuts ? "explicit" : "shortest-path";
}
inline const char* to_string(SelectionPolicy p) {
  return p == SelectionPolicy::Lexicographic ? "lexicographic" : "random";
}
inline ReductionMode parse_reduction_mode(const std::string& s) {
  if (s == "explicit") return ReductionMode::ExplicitShortcuts;
  if (s == "shortest-path") return ReductionMode::ShortestPath;
  throw DomainError("unknown reduction mode '" + s + "'");
}
inline SelectionPolicy parse_selection_policy(const std::string& s) {
  if (s == "lexicographic") return SelectionPolicy::Lexicographic;
  if (s == "random") return SelectionPolicy::Random;
  throw DomainError("unknown selection policy '" + s + "'");
}

struct RunOptions {
  ReductionMode reduction = ReductionMode::ExplicitShortcuts;
  /// Which connectable pair to contract next (explicit back end).
  SelectionPolicy merge_policy = SelectionPolicy::Lexicographic;
  /// Which isolated component to reduce next (explicit back end).
  SelectionPolicy isolated_policy = SelectionPolicy::Lexicographic;
  /// When both a merge and a reduction are available, flip a seeded coin
  /// instead of always merging first.
  bool interleave = false;
  std::uint64_t seed = 0;
  /// Runtime checks of the rule invariants (monotone ranges and distances,
  /// contraction identity, isolation permanence). Throws std::logic_error on
  /// violation.
  bool audit = false;
  bool record_events = true;
};

struct RuleCounts {
  std::size_t merges = 0;
  std::size_t reductions = 0;
  std::size_t shortcuts = 0;
};

struct RunReport {
  std::size_t node_count = 0;
  Partition partition;
  double giant_fraction = 0.0;
  std::vector<Event> events;
  RangeModel model;
  RunOptions options;
  RuleCounts counts;
};

/// Sorts each block and the blocks by their smallest member.
inline Partition canonical_partition(Partition p) {
  for (auto& b : p) std::sort(b.begin(), b.end());
  std::sort(p.begin(), p.end());
  return p;
}

inline double giant_fraction(const Partition& p, std::size_t node_count) {
  if (node_count == 0) throw DomainError("empty partition");
  std::size_t largest = 0;
  for (const auto& b : p) largest = std::max(largest, b.size());
  return static_cast<double>(largest) / static_cast<double>(node_count);
}

inline double giant_fraction(const RunReport& report) {
  return giant_fraction(report.partition, report.node_count);
}

namespace detail {

/// Distance in units in the last place between two finite doubles.
inline std::uint64_t ulp_distance(double a, double b) {
  auto key = [](double x) {
    std::int64_t i;
    static_assert(sizeof(i) == sizeof(x));
    std::memcpy(&i, &x, sizeof x);
    return i < 0 ? std::numeric_limits<std::int64_t>::min() - i : i;
  };
  const std::int64_t ka = key(a), kb = key(b);
  return ka > kb ? static_cast<std::uint64_t>(ka - kb) : static_cast<std::uint64_t>(kb - ka);
}

inline void audit_contraction(const RangeModel& model, double r_a, double r_b, double merged) {
  if (!model.contraction_identity_holds()) return;
  const double expected = contract_ranges(r_a, r_b, model.distill.exponent());
  if (ulp_distance(expected, merged) > 8)
    throw std::logic_error("merged range departs from the contraction rule by more than 8 ulps");
}

inline void audit_range_growth(double r_a, double r_b, double merged) {
  if (merged < r_a || merged < r_b) throw std::logic_error("range decreased on merge");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Effective distance graph

/// Symmetric sparse map from component pairs to effective distance. Absent
/// pairs are unreachable.
class EffectiveGraph {
 public:
  struct Link {
    double distance = kUnreachable;
    bool via_shortcut = false;
  };
  using Row = std::unordered_map<ComponentId, Link>;

  void ensure_vertex(ComponentId a) {
    if (a >= rows_.size()) rows_.resize(a + 1);
  }

  double distance(ComponentId a, ComponentId b) const {
    if (a >= rows_.size()) return kUnreachable;
    auto it = rows_[a].find(b);
    return it == rows_[a].end() ? kUnreachable : it->second.distance;
  }

  std::optional<Link> link(ComponentId a, ComponentId b) const {
    if (a >= rows_.size()) return std::nullopt;
    auto it = rows_[a].find(b);
    if (it == rows_[a].end()) return std::nullopt;
    return it->second;
  }

  /// Sets d_ab = min(d_ab, l.distance). Returns true when the stored distance
  /// changed.
  bool lower(ComponentId a, ComponentId b, Link l) {
    ensure_vertex(std::max(a, b));
    auto [it, inserted] = rows_[a].try_emplace(b, l);
    if (!inserted) {
      if (!(l.distance < it->second.distance)) return false;
      it->second = l;
    }
    rows_[b][a] = l;
    if (inserted) ++edges_;
    return true;
  }

  const Row& neighbors(ComponentId a) const {
    static const Row empty;
    return a < rows_.size() ? rows_[a] : empty;
  }

  /// Neighbors sorted by id.
  std::vector<std::pair<ComponentId, Link>> sorted_neighbors(ComponentId a) const {
    const auto& row = neighbors(a);
    std::vector<std::pair<ComponentId, Link>> out(row.begin(), row.end());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
  }

  void remove_vertex(ComponentId a) {
    if (a >= rows_.size()) return;
    for (const auto& [b, l] : rows_[a]) rows_[b].erase(a);
    edges_ -= rows_[a].size();
    Row().swap(rows_[a]);
  }

  std::size_t edge_count() const { return edges_; }

 private:
  std::vector<Row> rows_;
  std::size_t edges_ = 0;
};

// ---------------------------------------------------------------------------
// Explicit-shortcut state

class PercolationState {
 public:
  /// One singleton per node at the base range; effective distances are the
  /// direct node distances.
  PercolationState(const SpatialNetwork& net, RangeModel model, bool audit = false)
      : model_(std::move(model)), node_count_(net.size()), audit_(audit) {
    if (node_count_ == 0) throw DomainError("network is empty");
    const double r0 = model_.range(1);
    components_.reserve(2 * node_count_);
    for (NodeId n = 0; n < node_count_; ++n) components_.push_back({n, {n}, r0});
    active_.assign(node_count_, 1);
    active_count_ = node_count_;
    graph_.ensure_vertex(static_cast<ComponentId>(node_count_ - 1));
    net.for_each_pair([&](NodeId u, NodeId v, double d) {
      if (!std::isfinite(d)) return;
      if (!(d > 0.0)) throw ValidationError("coincident nodes " + net.label(u) + " and " + net.label(v));
      graph_.lower(u, v, {d, false});
      if (d < r0) connectable_.emplace(u, v);
    });
    for (ComponentId a = 0; a < node_count_; ++a)
      if (compute_isolated(a)) isolated_.insert(a);
  }

  const RangeModel& model() const { return model_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t active_count() const { return active_count_; }
  const EffectiveGraph& graph() const { return graph_; }
  const std::vector<Event>& events() const { return events_; }
  const RuleCounts& counts() const { return counts_; }

  bool is_active(ComponentId a) const { return a < active_.size() && active_[a]; }

  const Component& component(ComponentId a) const {
    if (a >= components_.size()) throw UsageError("unknown component " + std::to_string(a));
    return components_[a];
  }

  std::vector<ComponentId> active_components() const {
    std::vector<ComponentId> out;
    for (ComponentId a = 0; a < active_.size(); ++a)
      if (active_[a]) out.push_back(a);
    return out;
  }

  const std::vector<ComponentId>& removed_components() const { return removed_; }

  /// Pairs (a < b) currently satisfying the connection criterion.
  const std::set<std::pair<ComponentId, ComponentId>>& connectable_pairs() const { return connectable_; }
  /// Active components that currently cannot reach any other active one.
  const std::set<ComponentId>& isolated_components() const { return isolated_; }

  double distance(ComponentId a, ComponentId b) const {
    require_active(a);
    require_active(b);
    return graph_.distance(a, b);
  }

  bool connection_ok(ComponentId a, ComponentId b) const {
    require_active(a);
    require_active(b);
    if (a == b) throw UsageError("a component cannot connect to itself");
    const double d = graph_.distance(a, b);
    return d < std::min(components_[a].range, components_[b].range);
  }

  bool is_isolated(ComponentId a) const {
    require_active(a);
    return compute_isolated(a);
  }

  /// Contracts a and b into a new component and returns its id.
  ComponentId merge(ComponentId a, ComponentId b) {
    if (!connection_ok(a, b))
      throw UsageError("components " + std::to_string(a) + " and " + std::to_string(b) +
                       " do not satisfy the connection criterion");
    const auto id = static_cast<ComponentId>(components_.size());
    const auto via = graph_.link(a, b).value();
    Component& ca = components_[a];
    Component& cb = components_[b];
    const double ra = ca.range, rb = cb.range;

    Component merged;
    merged.id = id;
    if (ca.members.size() >= cb.members.size()) {
      merged.members = std::move(ca.members);
      merged.members.insert(merged.members.end(), cb.members.begin(), cb.members.end());
    } else {
      merged.members = std::move(cb.members);
      merged.members.insert(merged.members.end(), ca.members.begin(), ca.members.end());
    }
    merged.range = model_.range(merged.members.size());
    if (audit_) {
      detail::audit_range_growth(ra, rb, merged.range);
      detail::audit_contraction(model_, ra, rb, merged.range);
    }

    for (ComponentId x : {a, b})
      for (const auto& [y, l] : graph_.neighbors(x)) {
        auto key = std::minmax(x, y);
        connectable_.erase({key.first, key.second});
      }
    graph_.ensure_vertex(id);
    for (ComponentId x : {a, b}) {
      for (const auto& [y, l] : graph_.neighbors(x)) {
        if (y == a || y == b) continue;
        graph_.lower(id, y, l);
        if (audit_ && graph_.distance(id, y) > l.distance)
          throw std::logic_error("min-rule produced a larger distance");
      }
    }
    graph_.remove_vertex(a);
    graph_.remove_vertex(b);
    components_.push_back(std::move(merged));
    active_[a] = active_[b] = 0;
    active_.push_back(1);
    --active_count_;
    isolated_.erase(a);
    isolated_.erase(b);

    const double r = components_[id].range;
    for (const auto& [y, l] : graph_.neighbors(id))
      if (l.distance < std::min(r, components_[y].range)) connectable_.emplace(y, id);
    if (compute_isolated(id)) isolated_.insert(id);

    ++counts_.merges;
    if (record_events_)
      events_.push_back(MergeEvent{a, b, id, components_[id].size(), r, via.distance, via.via_shortcut});
    return id;
  }

  /// Applies the reduction rule to isolated component a and removes it from
  /// the active set. Returns the pairs whose distance decreased.
  std::vector<Shortcut> reduce_and_remove(ComponentId a) {
    require_active(a);
    if (!compute_isolated(a))
      throw UsageError("component " + std::to_string(a) + " is not isolated and cannot be reduced");
    const auto nbrs = graph_.sorted_neighbors(a);
    std::vector<Shortcut> added;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        const ComponentId b = nbrs[i].first, c = nbrs[j].first;
        const double through = nbrs[i].second.distance + nbrs[j].second.distance;
        const double before = graph_.distance(b, c);
        if (graph_.lower(b, c, {through, true})) {
          added.push_back({b, c, before, through});
          if (through < std::min(components_[b].range, components_[c].range))
            connectable_.emplace(std::min(b, c), std::max(b, c));
        }
      }
    }
    graph_.remove_vertex(a);
    active_[a] = 0;
    --active_count_;
    isolated_.erase(a);
    removed_.push_back(a);
    for (const auto& [b, l] : nbrs) {
      if (compute_isolated(b))
        isolated_.insert(b);
      else
        isolated_.erase(b);
    }
    ++counts_.reductions;
    counts_.shortcuts += added.size();
    if (record_events_)
      events_.push_back(ReduceEvent{a, components_[a].size(), components_[a].range, added.size()});
    return added;
  }

  void set_record_events(bool on) { record_events_ = on; }

  /// Removed components as blocks; still-active components (if the run was
  /// not finished) are reported as blocks too.
  Partition partition() const {
    Partition p;
    for (ComponentId a : removed_) p.push_back(components_[a].members);
    for (ComponentId a = 0; a < active_.size(); ++a)
      if (active_[a]) p.push_back(components_[a].members);
    return canonical_partition(std::move(p));
  }

 private:
  void require_active(ComponentId a) const {
    if (!is_active(a)) throw UsageError("component " + std::to_string(a) + " is not active");
  }

  bool compute_isolated(ComponentId a) const {
    const double r = components_[a].range;
    for (const auto& [b, l] : graph_.neighbors(a))
      if (l.distance < r) return false;
    return true;
  }

  RangeModel model_;
  std::size_t node_count_;
  bool audit_;
  bool record_events_ = true;
  std::vector<Component> components_;
  std::vector<char> active_;
  std::size_t active_count_ = 0;
  std::vector<ComponentId> removed_;
  EffectiveGraph graph_;
  std::set<std::pair<ComponentId, ComponentId>> connectable_;
  std::set<ComponentId> isolated_;
  std::vector<Event> events_;
  RuleCounts counts_;
};

/// Drives a state to its fixed point: contract connectable pairs, reduce
/// isolated components, until nothing is active.
inline RunReport run(PercolationState& state, const RunOptions& options = {}) {
  state.set_record_events(options.record_events);
  Rng rng(derive_seed(options.seed, "schedule", 0));
  while (state.active_count() > 0) {
    const auto& pairs = state.connectable_pairs();
    const auto& isolated = state.isolated_components();
    if (pairs.empty() && isolated.empty())
      throw std::logic_error("no rule applies although components remain active");
    bool do_merge = !pairs.empty();
    if (do_merge && options.interleave && !isolated.empty()) do_merge = rng.coin();
    if (do_merge) {
      auto it = pairs.begin();
      if (options.merge_policy == SelectionPolicy::Random) std::advance(it, rng.index(pairs.size()));
      const auto [a, b] = *it;
      state.merge(a, b);
    } else {
      auto it = isolated.begin();
      if (options.isolated_policy == SelectionPolicy::Random) std::advance(it, rng.index(isolated.size()));
      state.reduce_and_remove(*it);
    }
  }
  RunReport report;
  report.node_count = state.node_count();
  report.partition = state.partition();
  report.giant_fraction = giant_fraction(report.partition, report.node_count);
  report.events = state.events();
  report.model = state.model();
  report.options = options;
  report.counts = state.counts();
  if (options.audit) {
    for (const auto& e : report.events) {
      if (const auto* m = std::get_if<MergeEvent>(&e); m && !(m->distance > 0.0))
        throw std::logic_error("merge over a non-positive distance");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Relay shortest-path back end

class RelayPathRunner {
 public:
  RelayPathRunner(const SpatialNetwork& net, RangeModel model, RunOptions options = {})
      : net_(net), model_(std::move(model)), options_(options) {
    const std::size_t n = net_.size();
    if (n == 0) throw DomainError("network is empty");
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), NodeId{0});
    owner_.resize(n);
    std::iota(owner_.begin(), owner_.end(), ComponentId{0});
    const double r0 = model_.range(1);
    components_.reserve(2 * n);
    for (NodeId i = 0; i < n; ++i) components_.push_back({i, {i}, r0});
    state_.assign(n, Status::Active);
    dist_.assign(n, kUnreachable);
  }

  RunReport run() {
    using Entry = std::pair<double, ComponentId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (ComponentId a = 0; a < components_.size(); ++a) queue.emplace(components_[a].range, a);
    while (!queue.empty()) {
      const auto [r, b] = queue.top();
      queue.pop();
      if (state_[b] != Status::Active) continue;
      auto found = search(b);
      if (found.empty()) {
        state_[b] = Status::Removed;
        removed_.push_back(b);
        ++counts_.reductions;
        if (options_.record_events)
          events_.push_back(ReduceEvent{b, components_[b].size(), components_[b].range, 0});
        continue;
      }
      std::sort(found.begin(), found.end(), [](const Hit& x, const Hit& y) {
        return std::tie(x.distance, x.component) < std::tie(y.distance, y.component);
      });
      ComponentId cur = b;
      for (const Hit& h : found) {
        if (!(h.distance < std::min(components_[cur].range, components_[h.component].range)))
          throw std::logic_error("smallest-range component found a neighbor it cannot connect to");
        cur = merge(cur, h);
      }
      queue.emplace(components_[cur].range, cur);
    }
    RunReport report;
    report.node_count = net_.size();
    Partition p;
    for (ComponentId a : removed_) p.push_back(components_[a].members);
    report.partition = canonical_partition(std::move(p));
    report.giant_fraction = giant_fraction(report.partition, report.node_count);
    report.events = std::move(events_);
    report.model = model_;
    report.options = options_;
    report.counts = counts_;
    return report;
  }

 private:
  enum class Status : char { Active, Merged, Removed };

  struct Hit {
    ComponentId component;
    double distance;
    bool via_shortcut;
  };

  NodeId find(NodeId x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  ComponentId owner(NodeId node) { return owner_[find(node)]; }

  ComponentId merge(ComponentId a, const Hit& hit) {
    const ComponentId b = hit.component;
    const auto id = static_cast<ComponentId>(components_.size());
    Component merged;
    merged.id = id;
    Component& ca = components_[a];
    Component& cb = components_[b];
    const double ra = ca.range, rb = cb.range;
    const NodeId root_a = find(ca.members.front());
    const NodeId root_b = find(cb.members.front());
    if (ca.size() >= cb.size()) {
      merged.members = std::move(ca.members);
      merged.members.insert(merged.members.end(), cb.members.begin(), cb.members.end());
    } else {
      merged.members = std::move(cb.members);
      merged.members.insert(merged.members.end(), ca.members.begin(), ca.members.end());
    }
    merged.range = model_.range(merged.members.size());
    if (options_.audit) {
      detail::audit_range_growth(ra, rb, merged.range);
      detail::audit_contraction(model_, ra, rb, merged.range);
    }
    if (root_a != root_b) parent_[root_b] = root_a;
    owner_[root_a] = id;
    state_[a] = state_[b] = Status::Merged;
    state_.push_back(Status::Active);
    components_.push_back(std::move(merged));
    ++counts_.merges;
    if (options_.record_events)
      events_.push_back(MergeEvent{a, b, id, components_[id].size(), components_[id].range,
                                   hit.distance, hit.via_shortcut});
    return id;
  }

  /// Active components reachable from b at effective distance < r_b.
  std::vector<Hit> search(ComponentId b) {
    const double radius = components_[b].range;
    using Entry = std::pair<double, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    touched_.clear();
    std::vector<Hit> hits;
    hit_index_.clear();
    relay_dist_.clear();
    for (NodeId u : components_[b].members) {
      dist_[u] = 0.0;
      touched_.push_back(u);
      heap.emplace(0.0, u);
    }
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist_[u]) continue;
      const bool from_relay = owner(u) != b;
      net_.for_each_within(u, radius - d, [&](NodeId v, double w) {
        const double nd = d + w;
        if (!(nd < radius)) return;
        const ComponentId c = owner(v);
        if (c == b) return;
        if (state_[c] == Status::Active) {
          auto [it, inserted] = hit_index_.try_emplace(c, hits.size());
          if (inserted)
            hits.push_back({c, nd, from_relay});
          else if (nd < hits[it->second].distance)
            hits[it->second] = {c, nd, from_relay};
          return;
        }
        auto [it, inserted] = relay_dist_.try_emplace(c, nd);
        if (!inserted) {
          if (!(nd < it->second)) return;
          it->second = nd;
        }
        for (NodeId x : components_[c].members) {
          if (nd < dist_[x]) {
            if (dist_[x] == kUnreachable) touched_.push_back(x);
            dist_[x] = nd;
            heap.emplace(nd, x);
          }
        }
      });
    }
    for (NodeId x : touched_) dist_[x] = kUnreachable;
    return hits;
  }

  const SpatialNetwork& net_;
  RangeModel model_;
  RunOptions options_;
  std::vector<NodeId> parent_;
  std::vector<ComponentId> owner_;
  std::vector<Component> components_;
  std::vector<Status> state_;
  std::vector<ComponentId> removed_;
  std::vector<Event> events_;
  RuleCounts counts_;
  std::vector<double> dist_;
  std::vector<NodeId> touched_;
  std::unordered_map<ComponentId, std::size_t> hit_index_;
  std::unordered_map<ComponentId, double> relay_dist_;
};

/// Runs alpha-percolation on a network with the back end selected in options.
inline RunReport percolate(const SpatialNetwork& net, const RangeModel& model,
                           const RunOptions& options = {}) {
  if (options.reduction == ReductionMode::ShortestPath) return RelayPathRunner(net, model, options).run();
  PercolationState state(net, model, options.audit);
  return run(state, options);
}

}  // namespace qperc
