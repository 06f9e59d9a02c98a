#pragma once

// JSON and CSV serialization of networks, runs, curves and thresholds.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qperc/analysis.hpp"
#include "qperc/engine.hpp"
#include "qperc/errors.hpp"
#include "qperc/random.hpp"
#include "qperc/topology.hpp"

namespace qperc {

using Json = nlohmann::json;

/// Provenance stamp: FNV-1a of the compact dump (object keys are sorted).
inline std::string config_hash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

inline Json provenance(const Json& config, std::uint64_t seed) {
  return {{"config_hash", config_hash(config)}, {"seed", seed}};
}

// ---------------------------------------------------------------------------
// Network JSON

inline Json network_to_json(const EdgeListNetwork& net) {
  Json nodes = Json::array();
  for (NodeId n = 0; n < net.node_count(); ++n) {
    Json node{{"id", net.id(n)}, {"kind", to_string(net.kind(n))}};
    if (const auto& p = net.position(n)) {
      node["x"] = p->x;
      node["y"] = p->y;
    }
    nodes.push_back(std::move(node));
  }
  Json edges = Json::array();
  for (const auto& e : net.edges())
    edges.push_back({{"u", net.id(e.u)}, {"v", net.id(e.v)}, {"length_km", e.length_km}});
  return {{"nodes", nodes}, {"edges", edges}};
}

inline EdgeListNetwork network_from_json(const Json& j) {
  try {
    EdgeListNetwork net;
    for (const auto& node : j.at("nodes")) {
      const std::string kind = node.value("kind", std::string("station"));
      NodeKind k;
      if (kind == "station")
        k = NodeKind::Station;
      else if (kind == "repeater")
        k = NodeKind::Repeater;
      else
        throw ValidationError("unknown node kind '" + kind + "'");
      std::optional<Point> pos;
      if (node.contains("x") != node.contains("y"))
        throw ValidationError("node '" + node.at("id").get<std::string>() + "' has only one coordinate");
      if (node.contains("x")) pos = Point{node.at("x").get<double>(), node.at("y").get<double>()};
      const auto id = node.at("id").get<std::string>();
      if (net.find(id)) throw ValidationError("duplicate node id '" + id + "'");
      net.add_node(id, k, pos);
    }
    for (const auto& e : j.at("edges")) {
      const auto u = e.at("u").get<std::string>();
      const auto v = e.at("v").get<std::string>();
      if (!net.find(u) || !net.find(v))
        throw ValidationError("edge " + u + "-" + v + " references an undeclared node");
      net.add_edge(*net.find(u), *net.find(v), e.at("length_km").get<double>());
    }
    return net;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed network JSON: ") + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Runs

inline Json events_to_json(const std::vector<Event>& events) {
  Json out = Json::array();
  for (const auto& e : events) {
    if (const auto* m = std::get_if<MergeEvent>(&e)) {
      out.push_back({{"type", "merge"},
                     {"a", m->a},
                     {"b", m->b},
                     {"merged", m->merged},
                     {"size", m->size},
                     {"range", m->range},
                     {"distance", m->distance},
                     {"via_shortcut", m->via_shortcut}});
    } else {
      const auto& r = std::get<ReduceEvent>(e);
      out.push_back({{"type", "reduce"},
                     {"component", r.component},
                     {"size", r.size},
                     {"range", r.range},
                     {"shortcuts", r.shortcuts}});
    }
  }
  return out;
}

/// Partition as a list of node-label arrays, blocks ordered by smallest index.
inline Json partition_to_json(const Partition& partition, const SpatialNetwork& net) {
  Json out = Json::array();
  for (const auto& block : canonical_partition(partition)) {
    Json labels = Json::array();
    for (NodeId n : block) labels.push_back(net.label(n));
    out.push_back(std::move(labels));
  }
  return out;
}

inline Json model_to_json(const RangeModel& m) {
  return {{"d0_km", m.channel.d0()},
          {"epsilon", m.channel.epsilon()},
          {"m", m.distill.m()},
          {"alpha", m.distill.alpha()},
          {"eta", m.distill.eta()},
          {"range_mode", to_string(m.mode)},
          {"beta_cap", m.beta_cap},
          {"size_growth", m.size_growth},
          {"r0_km", m.base()}};
}

inline Json report_to_json(const RunReport& report, const Json& config,
                           std::uint64_t seed) {
  std::size_t largest = 0;
  for (const auto& b : report.partition) largest = std::max(largest, b.size());
  return {{"provenance", provenance(config, seed)},
          {"model", model_to_json(report.model)},
          {"engine",
           {{"reduction", to_string(report.options.reduction)},
            {"merge_policy", to_string(report.options.merge_policy)},
            {"isolated_policy", to_string(report.options.isolated_policy)},
            {"interleave", report.options.interleave}}},
          {"node_count", report.node_count},
          {"blocks", report.partition.size()},
          {"giant_size", largest},
          {"p_inf", report.giant_fraction},
          {"merges", report.counts.merges},
          {"reductions", report.counts.reductions},
          {"shortcuts", report.counts.shortcuts},
          {"max_link_km", max_link_distance(report)}};
}

// ---------------------------------------------------------------------------
// Analysis outputs

inline Json threshold_to_json(const ThresholdEstimate& t) {
  return {{"alpha", t.alpha},
          {"r0_th", t.r0_th},
          {"ci_low", t.ci_low},
          {"ci_high", t.ci_high},
          {"replicates", t.replicates}};
}

inline void write_curve_csv(std::ostream& out, const SweepResult& sweep, const Json& config,
                            std::uint64_t seed) {
  out << "# config_hash=" << config_hash(config) << " seed=" << seed << "\n";
  out << "scenario,d0_km,seed,p_inf\n";
  for (const auto& r : sweep.rows)
    out << to_string(r.scenario) << ',' << detail::format_double(r.d0) << ',' << r.seed << ','
        << detail::format_double(r.p_inf) << "\n";
}

inline void write_aggregate_csv(std::ostream& out, const SweepResult& sweep, const Json& config,
                                std::uint64_t seed) {
  out << "# config_hash=" << config_hash(config) << " seed=" << seed << "\n";
  out << "scenario,d0_km,mean,std,n\n";
  for (const auto& c : sweep.curve)
    out << to_string(c.scenario) << ',' << detail::format_double(c.d0) << ','
        << detail::format_double(c.p_inf.mean) << ',' << detail::format_double(c.p_inf.std) << ','
        << c.p_inf.n << "\n";
}

}  // namespace qperc
