// qperc: command-line front end for alpha-percolation experiments.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qperc/qperc.hpp"

namespace fs = std::filesystem;
using namespace qperc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out = ".";
};

struct ModelFlags {
  double d0 = 1.0;
  double epsilon = 0.01;
  double m = 1.0;
  double alpha = kAlphaStar;
  double eta = 1.0;
  std::string range_mode = "asymptotic";
  bool no_beta_cap = false;
  std::string scenario = "distributed";

  void add(CLI::App* app, bool with_scenario = true, bool with_alpha = true) {
    app->add_option("--d0", d0, "Attenuation length d0 in km")->capture_default_str();
    app->add_option("--epsilon", epsilon, "Fidelity slack, threshold is 1 - epsilon")->capture_default_str();
    app->add_option("--m", m, "Memories per node")->capture_default_str();
    if (with_alpha)
      app->add_option("--alpha", alpha, "Distillation efficiency exponent")->capture_default_str();
    app->add_option("--eta", eta, "Memory efficiency")->capture_default_str();
    app->add_option("--range-mode", range_mode, "asymptotic | exact")->capture_default_str();
    app->add_flag("--no-beta-cap", no_beta_cap, "Do not cap ranges at d0 ln 3");
    if (with_scenario)
      app->add_option("--scenario", scenario, "no-memory | point-to-point | distributed")
          ->capture_default_str();
  }

  RangeModel model() const {
    RangeModel r;
    r.channel = ChannelModel(d0, epsilon);
    r.distill = DistillationParams(m, alpha, eta);
    r.mode = parse_range_mode(range_mode);
    r.beta_cap = !no_beta_cap;
    return r;
  }

  Json to_json() const {
    return {{"d0_km", d0},         {"epsilon", epsilon},       {"m", m},
            {"alpha", alpha},      {"eta", eta},               {"range_mode", range_mode},
            {"beta_cap", !no_beta_cap}, {"scenario", scenario}};
  }
};

struct EngineFlags {
  std::string reduction = "shortest-path";
  std::string merge_policy = "lexicographic";
  std::string isolated_policy = "lexicographic";
  bool interleave = false;
  bool audit = false;

  void add(CLI::App* app) {
    app->add_option("--reduction", reduction, "explicit | shortest-path")->capture_default_str();
    app->add_option("--merge-policy", merge_policy, "lexicographic | random")->capture_default_str();
    app->add_option("--isolated-policy", isolated_policy, "lexicographic | random")->capture_default_str();
    app->add_flag("--interleave", interleave, "Randomly interleave merges and reductions");
    app->add_flag("--audit", audit, "Check range invariants on every merge");
  }

  RunOptions options(std::uint64_t seed) const {
    RunOptions o;
    o.reduction = parse_reduction_mode(reduction);
    o.merge_policy = parse_selection_policy(merge_policy);
    o.isolated_policy = parse_selection_policy(isolated_policy);
    o.interleave = interleave;
    o.audit = audit;
    o.seed = seed;
    return o;
  }

  Json to_json() const {
    return {{"reduction", reduction},
            {"merge_policy", merge_policy},
            {"isolated_policy", isolated_policy},
            {"interleave", interleave}};
  }
};

/// Where the network comes from: an edge-list file, a point-cloud file, a
/// generated uniform cloud or a generated synthetic fiber network.
struct SourceFlags {
  std::string network;
  std::string points;
  std::size_t n = 0;
  double box = 1.0;
  std::size_t fiber_nodes = 0;
  std::size_t fiber_edges = 0;
  double fiber_mean_km = 500.0;
  double segment_km = 0.0;

  void add(CLI::App* app) {
    app->add_option("--network", network, "Edge-list CSV or network JSON");
    app->add_option("--points", points, "Point-cloud CSV");
    app->add_option("--n", n, "Generate a uniform cloud of n points");
    app->add_option("--box", box, "Side of the generated cloud's square")->capture_default_str();
    app->add_option("--fiber-nodes", fiber_nodes, "Generate a synthetic fiber network with this many stations");
    app->add_option("--fiber-edges", fiber_edges, "Cable count of the synthetic fiber network");
    app->add_option("--fiber-mean-km", fiber_mean_km, "Mean cable length of the synthetic network")
        ->capture_default_str();
    app->add_option("--segment-km", segment_km, "Insert repeaters with this mean spacing (0 = none)")
        ->capture_default_str();
  }

  void validate() const {
    const int chosen = !network.empty() + !points.empty() + (n > 0) + (fiber_nodes > 0);
    if (chosen != 1)
      throw ValidationError("choose exactly one of --network, --points, --n, --fiber-nodes");
    if (!(box > 0.0)) throw ValidationError("--box must be positive");
    if (segment_km < 0.0) throw ValidationError("--segment-km must be non-negative");
    if (segment_km > 0.0 && (!points.empty() || n > 0))
      throw ValidationError("--segment-km applies to edge-list networks only");
    if (fiber_nodes > 0 && fiber_edges == 0) throw ValidationError("--fiber-edges is required with --fiber-nodes");
  }

  /// Seeded network; files are loaded once and only re-segmented per seed.
  NetworkFactory factory() const {
    if (!points.empty()) {
      auto cloud = load_point_cloud(points);
      return [cloud](std::uint64_t) { return SpatialNetwork::from_points(cloud); };
    }
    if (n > 0) {
      const auto n_ = n;
      const auto box_ = box;
      return [n_, box_](std::uint64_t seed) {
        return SpatialNetwork::from_points(generate_uniform_points(n_, box_, seed));
      };
    }
    const double seg = segment_km;
    auto segmented = [seg](const EdgeListNetwork& net, std::uint64_t seed) {
      if (seg <= 0.0) return SpatialNetwork::from_edges(net);
      return SpatialNetwork::from_edges(insert_repeaters(net, RepeaterConfig{seg, seed}));
    };
    if (!network.empty()) {
      auto net = load_network(network);
      return [net, segmented](std::uint64_t seed) { return segmented(net, seed); };
    }
    const auto nodes = fiber_nodes, edges = fiber_edges;
    const auto mean = fiber_mean_km;
    return [nodes, edges, mean, segmented](std::uint64_t seed) {
      return segmented(generate_synthetic_fiber(nodes, edges, seed, mean), derive_seed(seed, "repeaters", 0));
    };
  }

  static EdgeListNetwork load_network(const std::string& path) {
    if (fs::path(path).extension() == ".json") return network_from_json(read_json_file(path));
    return load_edge_list(path);
  }

  Json to_json() const {
    Json j{{"box", box}, {"segment_km", segment_km}};
    if (!network.empty()) j["network"] = network;
    if (!points.empty()) j["points"] = points;
    if (n > 0) j["n"] = n;
    if (fiber_nodes > 0) {
      j["fiber_nodes"] = fiber_nodes;
      j["fiber_edges"] = fiber_edges;
      j["fiber_mean_km"] = fiber_mean_km;
    }
    return j;
  }
};

fs::path output_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

std::string stamp_line(const Json& config, std::uint64_t seed) {
  return "config_hash=" + config_hash(config) + " seed=" + std::to_string(seed);
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

std::vector<std::uint64_t> replicate_seeds(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = derive_seed(master, "replicate", i);
  return seeds;
}

void write_network_files(const Globals& g, const std::string& stem, const EdgeListNetwork& net,
                         const Json& config) {
  const auto csv = output_path(g, stem + ".csv");
  save_edge_list(csv.string(), net, {stamp_line(config, g.seed)});
  announce(csv);
  Json j = network_to_json(net);
  j["provenance"] = provenance(config, g.seed);
  const auto json = output_path(g, stem + ".json");
  write_json_file(json.string(), j);
  announce(json);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-percolation of quantum networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with default option values; flags override it");
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a uniform point cloud or a synthetic fiber network");
  gen->require_subcommand(1);
  auto* gen_points = gen->add_subcommand("points", "Uniform points in a square");
  std::size_t gp_n = 0;
  double gp_box = 1.0;
  gen_points->add_option("--n", gp_n, "Number of points")->required();
  gen_points->add_option("--box", gp_box, "Side of the square")->capture_default_str();
  auto* gen_fiber = gen->add_subcommand("fiber", "Planar synthetic cable network");
  std::size_t gf_nodes = 0, gf_edges = 0;
  double gf_mean = 500.0;
  gen_fiber->add_option("--nodes", gf_nodes, "Stations")->required();
  gen_fiber->add_option("--edges", gf_edges, "Cables")->required();
  gen_fiber->add_option("--mean-km", gf_mean, "Mean cable length")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate an edge list and export it in canonical form");
  std::string in_path;
  ingest->add_option("input", in_path, "Edge-list CSV or network JSON")->required();

  // repeaters
  auto* rep = app.add_subcommand("repeaters", "Insert repeater nodes along every cable");
  std::string rep_path;
  double rep_mean = 50.0;
  rep->add_option("input", rep_path, "Edge-list CSV or network JSON")->required();
  rep->add_option("--mean-segment-km", rep_mean, "Mean spacing between repeaters")->capture_default_str();

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the percolation engine once");
  SourceFlags run_src;
  ModelFlags run_model;
  EngineFlags run_engine;
  bool run_events = false;
  run_src.add(run_cmd);
  run_model.add(run_cmd);
  run_engine.add(run_cmd);
  run_cmd->add_flag("--events", run_events, "Also write the event log");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "P_inf against d0 for each memory-use scenario");
  SourceFlags sw_src;
  ModelFlags sw_model;
  EngineFlags sw_engine;
  std::vector<double> sw_grid;
  double sw_min = 0.0, sw_max = 0.0;
  std::size_t sw_steps = 0, sw_reps = 1;
  std::vector<std::string> sw_scen;
  double sw_target = 0.9;
  sw_src.add(sweep_cmd);
  sw_model.add(sweep_cmd, false);
  sw_engine.add(sweep_cmd);
  sweep_cmd->add_option("--d0-grid", sw_grid, "Explicit d0 values in km");
  sweep_cmd->add_option("--d0-min", sw_min, "Log grid lower end");
  sweep_cmd->add_option("--d0-max", sw_max, "Log grid upper end");
  sweep_cmd->add_option("--d0-steps", sw_steps, "Log grid size");
  sweep_cmd->add_option("--replicates", sw_reps, "Replicates per point")->capture_default_str();
  sweep_cmd->add_option("--scenarios", sw_scen, "Subset of scenarios (default all)");
  sweep_cmd->add_option("--target", sw_target, "Connectivity target")->capture_default_str();

  // threshold
  auto* th_cmd = app.add_subcommand("threshold", "Percolation threshold r0 on uniform clouds");
  ModelFlags th_model;
  EngineFlags th_engine;
  std::vector<double> th_alphas;
  std::size_t th_n = 2000, th_reps = 10, th_boot = 1000;
  double th_box = 1.0, th_target = 0.5, th_lo = 1e-4, th_hi = 0.5, th_tol = 1e-4;
  th_model.add(th_cmd, false, false);
  th_engine.add(th_cmd);
  th_cmd->add_option("--alpha", th_alphas, "Alpha values, repeatable")->required();
  th_cmd->add_option("--n", th_n, "Points per cloud")->capture_default_str();
  th_cmd->add_option("--box", th_box, "Side of the square")->capture_default_str();
  th_cmd->add_option("--replicates", th_reps, "Independent clouds")->capture_default_str();
  th_cmd->add_option("--target", th_target, "P_inf defining the threshold")->capture_default_str();
  th_cmd->add_option("--eps-lo", th_lo, "Bisection bracket, lower epsilon")->capture_default_str();
  th_cmd->add_option("--eps-hi", th_hi, "Bisection bracket, upper epsilon")->capture_default_str();
  th_cmd->add_option("--tol", th_tol, "Absolute tolerance on r0")->capture_default_str();
  th_cmd->add_option("--bootstrap", th_boot, "Bootstrap resamples")->capture_default_str();

  // distill
  auto* dist = app.add_subcommand("distill", "Werner-state and BBPSSW calculators");
  dist->require_subcommand(1);
  double di_f = 0.75, di_n = 2.0, di_d = 0.0;
  std::string di_mode = "exact";
  auto* di_success = dist->add_subcommand("success", "BBPSSW success probability");
  di_success->add_option("--f", di_f, "Input fidelity")->required();
  auto* di_fid = dist->add_subcommand("fidelity", "Fidelity after one BBPSSW round");
  di_fid->add_option("--f", di_f, "Input fidelity")->required();
  auto* di_nested = dist->add_subcommand("nested", "Fidelity after nested distillation of n pairs");
  di_nested->add_option("--f", di_f, "Input fidelity")->required();
  di_nested->add_option("--n", di_n, "Pair count")->required();
  di_nested->add_option("--mode", di_mode, "exact | asymptotic")->capture_default_str();
  auto* di_link = dist->add_subcommand("link", "Werner weight and fidelity of a link");
  ModelFlags di_model;
  di_link->add_option("--distance", di_d, "Link length in km")->required();
  di_link->add_option("--d0", di_model.d0, "Attenuation length d0 in km")->capture_default_str();
  auto* di_range = dist->add_subcommand("range", "Node and component ranges");
  std::size_t di_size = 1;
  di_model.add(di_range, false);
  di_range->add_option("--size", di_size, "Component size")->capture_default_str();

  // complexity
  auto* cx = app.add_subcommand("complexity", "Time complexity of remote distillation");
  ComplexityParams cx_p{102.0, 0.722, 1.0};
  std::vector<double> cx_n;
  std::string cx_rule = "midpoint";
  double cx_rate = 0.0;
  double cx_eps = 0.0, cx_dworst = 0.0, cx_d0 = 0.0, cx_alpha = kAlphaStar;
  cx->add_option("--m", cx_p.m, "Memories per node")->capture_default_str();
  cx->add_option("--p", cx_p.p, "BBPSSW success probability")->capture_default_str();
  cx->add_option("--eta", cx_p.eta, "Memory efficiency")->capture_default_str();
  cx->add_option("--n", cx_n, "Pair counts, repeatable");
  cx->add_option("--interpolation", cx_rule, "midpoint | loglinear")->capture_default_str();
  cx->add_option("--rate", cx_rate, "Detection rate in Hz for coherence times");
  cx->add_option("--worst-epsilon", cx_eps, "Derive n from epsilon ...");
  cx->add_option("--worst-distance", cx_dworst, "... the worst link length in km ...");
  cx->add_option("--worst-d0", cx_d0, "... d0 in km ...");
  cx->add_option("--worst-alpha", cx_alpha, "... and alpha")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  auto emit = [](const Json& j) { std::cout << j.dump(2) << "\n"; };

  try {
    if (sub == "generate") {
      if (gen_points->parsed()) {
        const Json config{{"command", "generate points"}, {"n", gp_n}, {"box", gp_box}};
        if (gp_n < 1) throw ValidationError("--n must be >= 1");
        if (!(gp_box > 0.0)) throw ValidationError("--box must be positive");
        const auto cloud = generate_uniform_points(gp_n, gp_box, g.seed);
        const auto path = output_path(g, "points.csv");
        std::ostringstream os;
        write_point_cloud(os, cloud, {stamp_line(config, g.seed)});
        write_text_file(path.string(), os.str());
        announce(path);
      } else {
        const Json config{{"command", "generate fiber"}, {"nodes", gf_nodes}, {"edges", gf_edges},
                          {"mean_km", gf_mean}};
        const auto net = generate_synthetic_fiber(gf_nodes, gf_edges, g.seed, gf_mean);
        if (net.node_count() != gf_nodes || net.edge_count() != gf_edges)
          throw std::runtime_error("generated network does not have the requested counts");
        write_network_files(g, "network", net, config);
      }
    } else if (sub == "ingest") {
      const auto net = SourceFlags::load_network(in_path).canonical();
      const Json config{{"command", "ingest"}, {"input", fs::path(in_path).filename().string()}};
      write_network_files(g, "network", net, config);
      std::cout << net.node_count() << " nodes, " << net.edge_count() << " edges, "
                << detail::format_double(net.total_length()) << " km\n";
    } else if (sub == "repeaters") {
      if (!(rep_mean > 0.0)) throw ValidationError("--mean-segment-km must be positive");
      const auto net = SourceFlags::load_network(rep_path);
      const Json config{{"command", "repeaters"},
                        {"input", fs::path(rep_path).filename().string()},
                        {"mean_segment_km", rep_mean}};
      const auto out = insert_repeaters(net, RepeaterConfig{rep_mean, g.seed});
      write_network_files(g, "network_repeaters", out, config);
      std::cout << out.node_count() - net.node_count() << " repeaters inserted\n";
    } else if (sub == "run") {
      run_src.validate();
      const auto model = scenario_model(run_model.model(), parse_scenario(run_model.scenario));
      auto options = run_engine.options(derive_seed(g.seed, "engine", 0));
      options.record_events = true;
      const Json config{{"command", "run"},
                        {"source", run_src.to_json()},
                        {"model", run_model.to_json()},
                        {"engine", run_engine.to_json()}};
      const auto net = run_src.factory()(g.seed);
      const auto report = percolate(net, model, options);
      Json rj = report_to_json(report, config, g.seed);
      const auto rp = output_path(g, "report.json");
      write_json_file(rp.string(), rj);
      announce(rp);
      Json pj{{"provenance", provenance(config, g.seed)}, {"blocks", partition_to_json(report.partition, net)}};
      const auto pp = output_path(g, "partition.json");
      write_json_file(pp.string(), pj);
      announce(pp);
      if (run_events) {
        Json ej{{"provenance", provenance(config, g.seed)}, {"events", events_to_json(report.events)}};
        const auto ep = output_path(g, "events.json");
        write_json_file(ep.string(), ej);
        announce(ep);
      }
      std::cout << "p_inf=" << detail::format_double(report.giant_fraction) << "\n";
    } else if (sub == "sweep") {
      sw_src.validate();
      SweepSpec spec;
      if (!sw_grid.empty()) {
        if (sw_steps > 0) throw ValidationError("use either --d0-grid or the --d0-min/max/steps log grid");
        spec.d0_grid = sw_grid;
      } else {
        if (sw_steps < 2 || !(sw_min > 0.0) || !(sw_max > sw_min))
          throw ValidationError("log grid needs 0 < --d0-min < --d0-max and --d0-steps >= 2");
        for (std::size_t i = 0; i < sw_steps; ++i)
          spec.d0_grid.push_back(sw_min * std::pow(sw_max / sw_min, double(i) / double(sw_steps - 1)));
      }
      if (sw_reps < 1) throw ValidationError("--replicates must be >= 1");
      if (!sw_scen.empty()) {
        spec.scenarios.clear();
        for (const auto& s : sw_scen) spec.scenarios.push_back(parse_scenario(s));
      }
      spec.seeds = replicate_seeds(g.seed, sw_reps);
      spec.target = sw_target;
      spec.validate();
      const auto base = sw_model.model();
      Json scen = Json::array();
      for (auto s : spec.scenarios) scen.push_back(to_string(s));
      const Json config{{"command", "sweep"},       {"source", sw_src.to_json()},
                        {"model", sw_model.to_json()}, {"engine", sw_engine.to_json()},
                        {"d0_grid", spec.d0_grid},  {"replicates", sw_reps},
                        {"scenarios", scen},        {"target", sw_target}};
      const auto result =
          sweep_connectivity(sw_src.factory(), base, spec, sw_engine.options(derive_seed(g.seed, "engine", 0)), g.jobs);
      std::ostringstream curve, agg;
      write_curve_csv(curve, result, config, g.seed);
      write_aggregate_csv(agg, result, config, g.seed);
      const auto cp = output_path(g, "curve.csv");
      write_text_file(cp.string(), curve.str());
      announce(cp);
      const auto ap = output_path(g, "aggregate.csv");
      write_text_file(ap.string(), agg.str());
      announce(ap);
      Json summary{{"provenance", provenance(config, g.seed)}, {"target", sw_target}};
      for (const auto& [s, d0] : result.first_d0_reaching_target) {
        summary["first_d0_reaching_target"][to_string(s)] = d0 ? Json(*d0) : Json(nullptr);
        std::cout << to_string(s) << ": " << (d0 ? detail::format_double(*d0) + " km" : "not reached") << "\n";
      }
      const auto sp = output_path(g, "sweep_summary.json");
      write_json_file(sp.string(), summary);
      announce(sp);
    } else if (sub == "threshold") {
      if (th_n < 1) throw ValidationError("--n must be >= 1");
      if (!(th_box > 0.0)) throw ValidationError("--box must be positive");
      if (th_reps < 1) throw ValidationError("--replicates must be >= 1");
      ThresholdSpec spec;
      spec.target = th_target;
      spec.eps_lo = th_lo;
      spec.eps_hi = th_hi;
      spec.tol = th_tol;
      spec.seeds = replicate_seeds(g.seed, th_reps);
      spec.bootstrap_resamples = th_boot;
      spec.bootstrap_seed = derive_seed(g.seed, "bootstrap", 0);
      std::vector<RangeModel> models;
      for (double a : th_alphas) {
        ModelFlags f = th_model;
        f.alpha = a;
        models.push_back(f.model());
      }
      const Json config{{"command", "threshold"}, {"model", th_model.to_json()},
                        {"alphas", th_alphas},     {"engine", th_engine.to_json()},
                        {"n", th_n},               {"box", th_box},
                        {"replicates", th_reps},   {"target", th_target},
                        {"eps_lo", th_lo},         {"eps_hi", th_hi},
                        {"tol", th_tol},           {"bootstrap", th_boot}};
      const auto n_ = th_n;
      const auto box_ = th_box;
      NetworkFactory clouds = [n_, box_](std::uint64_t seed) {
        return SpatialNetwork::from_points(generate_uniform_points(n_, box_, seed));
      };
      std::vector<ThresholdEstimate> estimates;
      Json all = Json::array();
      for (const auto& model : models) {
        estimates.push_back(find_threshold(clouds, model, spec,
                                           th_engine.options(derive_seed(g.seed, "engine", 0)), g.jobs));
        Json j = threshold_to_json(estimates.back());
        j["config_hash"] = config_hash(config);
        j["seed"] = g.seed;
        all.push_back(j);
        std::cout << "alpha=" << detail::format_double(estimates.back().alpha)
                  << " r0_th=" << detail::format_double(estimates.back().r0_th) << " ci=["
                  << detail::format_double(estimates.back().ci_low) << ", "
                  << detail::format_double(estimates.back().ci_high) << "]\n";
      }
      const auto tp = output_path(g, "threshold.json");
      write_json_file(tp.string(), all.size() == 1 ? all.front() : all);
      announce(tp);
      for (std::size_t i = 0; i < estimates.size(); ++i) {
        for (std::size_t j = 0; j < estimates.size(); ++j) {
          if (estimates[j].alpha > estimates[i].alpha && !(estimates[j].r0_th < estimates[i].r0_th)) {
            std::cerr << "error: threshold did not decrease from alpha=" << estimates[i].alpha
                      << " to alpha=" << estimates[j].alpha << "\n";
            return kExitRuntime;
          }
        }
      }
    } else if (sub == "distill") {
      Json out{{"command", "distill " + dist->get_subcommands().front()->get_name()}};
      if (di_success->parsed()) {
        out["f"] = di_f;
        out["success"] = bbpssw_success(di_f);
      } else if (di_fid->parsed()) {
        out["f"] = di_f;
        out["fidelity"] = bbpssw_fidelity(di_f);
      } else if (di_nested->parsed()) {
        out["f"] = di_f;
        out["n"] = di_n;
        out["mode"] = di_mode;
        out["fidelity"] = nested_distill(di_f, di_n, parse_range_mode(di_mode));
      } else if (di_link->parsed()) {
        const ChannelModel ch(di_model.d0, 0.5);
        const double p = channel_p(di_d, ch);
        out["distance_km"] = di_d;
        out["d0_km"] = di_model.d0;
        out["p"] = p;
        out["fidelity"] = fidelity_of_p(p);
        out["separable"] = p <= 1.0 / 3.0;
      } else {
        const auto model = di_model.model();
        out["model"] = di_model.to_json();
        out["size"] = di_size;
        out["r0_km"] = model.base();
        out["range_km"] = model.range(di_size);
        out["beta_km"] = model.channel.beta();
      }
      out["provenance"] = provenance(out, g.seed);
      emit(out);
    } else if (sub == "complexity") {
      cx_p.validate();
      const auto rule = parse_interpolation_rule(cx_rule);
      const bool worst = cx_eps > 0.0 || cx_dworst > 0.0 || cx_d0 > 0.0;
      Json out{{"m", cx_p.m}, {"p", cx_p.p}, {"eta", cx_p.eta}, {"interpolation", cx_rule}};
      std::vector<double> ns = cx_n;
      if (worst) {
        const long nw = worst_case_n(cx_eps, cx_dworst, cx_d0, cx_alpha);
        out["worst_case_n"] = nw;
        ns.push_back(static_cast<double>(std::max(1L, nw)));
      }
      if (ns.empty()) throw ValidationError("give --n or the --worst-* options");
      if (cx_rate < 0.0) throw ValidationError("--rate must be positive");
      Json rows = Json::array();
      for (double n : ns) {
        const double k = std::log2(n / cx_p.m);
        const bool halving = std::abs(k - std::round(k)) < 1e-9;
        const double f = interpolate_f(n, cx_p, rule);
        Json row{{"n", n}, {"f", f}, {"log10_f", std::log10(f)}, {"interpolated", !halving}};
        if (cx_rate > 0.0) row["coherence_time_s"] = coherence_time(f, cx_rate);
        rows.push_back(row);
      }
      out["results"] = rows;
      out["provenance"] = provenance(out, g.seed);
      emit(out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
