#pragma once

// Experiment harness: memory-use scenarios, connectivity sweeps, threshold
// search with bootstrap confidence intervals, and the remote-distillation
// time-complexity calculator.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qperc/engine.hpp"
#include "qperc/errors.hpp"
#include "qperc/quantum_math.hpp"
#include "qperc/random.hpp"
#include "qperc/topology.hpp"

namespace qperc {

// ---------------------------------------------------------------------------
// Scenarios

enum class Scenario { NoMemory, PointToPoint, Distributed };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::NoMemory: return "no-memory";
    case Scenario::PointToPoint: return "point-to-point";
    case Scenario::Distributed: return "distributed";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "no-memory") return Scenario::NoMemory;
  if (s == "point-to-point") return Scenario::PointToPoint;
  if (s == "distributed") return Scenario::Distributed;
  throw DomainError("unknown scenario '" + s + "'");
}

inline const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> all{Scenario::NoMemory, Scenario::PointToPoint,
                                         Scenario::Distributed};
  return all;
}

/// No memory: r0 = (4/3) eps d0 for every component. Point-to-point: the
/// single-node range with m memories, no growth with component size.
/// Distributed: the full size-dependent range.
inline RangeModel scenario_model(const RangeModel& base, Scenario s) {
  RangeModel m = base;
  switch (s) {
    case Scenario::NoMemory:
      m.distill = DistillationParams(base.distill.m(), 0.0, base.distill.eta());
      m.size_growth = false;
      break;
    case Scenario::PointToPoint:
      m.size_growth = false;
      break;
    case Scenario::Distributed:
      m.size_growth = true;
      break;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Parallel job helper

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < std::min<std::size_t>(jobs, count); ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Statistics

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

/// Mean and sample standard deviation.
inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  out.n = xs.size();
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap interval for the mean.
inline Interval bootstrap_mean_ci(const std::vector<double>& xs, std::size_t resamples,
                                  double confidence, std::uint64_t seed) {
  if (xs.empty()) throw DomainError("bootstrap needs at least one sample");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  resamples = std::max<std::size_t>(resamples, 1);
  Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sum += xs[rng.index(xs.size())];
    m = sum / static_cast<double>(xs.size());
  }
  std::sort(means.begin(), means.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  const double tail = (1.0 - confidence) / 2.0;
  return {at(tail), at(1.0 - tail)};
}

// ---------------------------------------------------------------------------
// Connectivity sweeps

using NetworkFactory = std::function<SpatialNetwork(std::uint64_t seed)>;

struct SweepSpec {
  std::vector<double> d0_grid;
  std::vector<Scenario> scenarios = all_scenarios();
  std::vector<std::uint64_t> seeds{0};
  double target = 0.9;

  void validate() const {
    if (d0_grid.empty()) throw DomainError("d0 grid is empty");
    for (std::size_t i = 0; i < d0_grid.size(); ++i) {
      if (!(d0_grid[i] > 0.0)) throw DomainError("d0 grid values must be positive");
      if (i > 0 && !(d0_grid[i] > d0_grid[i - 1])) throw DomainError("d0 grid must be strictly increasing");
    }
    if (seeds.empty()) throw DomainError("at least one replicate seed is required");
    if (scenarios.empty()) throw DomainError("no scenarios selected");
    if (!(target > 0.0 && target <= 1.0)) throw DomainError("target connectivity must lie in (0, 1]");
  }
};

struct CurveRow {
  Scenario scenario;
  double d0 = 0.0;
  std::uint64_t seed = 0;
  double p_inf = 0.0;
};

struct CurvePoint {
  Scenario scenario;
  double d0 = 0.0;
  MeanStd p_inf;
};

struct SweepResult {
  std::vector<CurveRow> rows;
  std::vector<CurvePoint> curve;
  /// Smallest grid d0 whose mean P_inf reaches the target, per scenario.
  std::map<Scenario, std::optional<double>> first_d0_reaching_target;
};

inline SweepResult sweep_connectivity(const NetworkFactory& make_network, const RangeModel& base,
                                      const SweepSpec& spec, const RunOptions& options = {},
                                      unsigned jobs = 1) {
  spec.validate();
  std::vector<std::optional<SpatialNetwork>> networks(spec.seeds.size());
  parallel_for(spec.seeds.size(), jobs, [&](std::size_t i) { networks[i] = make_network(spec.seeds[i]); });

  const std::size_t per_scenario = spec.d0_grid.size() * spec.seeds.size();
  std::vector<CurveRow> rows(spec.scenarios.size() * per_scenario);
  RunOptions quiet = options;
  quiet.record_events = false;
  parallel_for(rows.size(), jobs, [&](std::size_t k) {
    const std::size_t si = k / per_scenario;
    const std::size_t di = (k % per_scenario) / spec.seeds.size();
    const std::size_t ri = k % spec.seeds.size();
    const auto model = scenario_model(base.with_d0(spec.d0_grid[di]), spec.scenarios[si]);
    const auto report = percolate(*networks[ri], model, quiet);
    rows[k] = {spec.scenarios[si], spec.d0_grid[di], spec.seeds[ri], report.giant_fraction};
  });

  SweepResult out;
  out.rows = rows;
  for (std::size_t si = 0; si < spec.scenarios.size(); ++si) {
    std::optional<double> first;
    for (std::size_t di = 0; di < spec.d0_grid.size(); ++di) {
      std::vector<double> xs;
      for (std::size_t ri = 0; ri < spec.seeds.size(); ++ri)
        xs.push_back(rows[si * per_scenario + di * spec.seeds.size() + ri].p_inf);
      const auto ms = mean_std(xs);
      out.curve.push_back({spec.scenarios[si], spec.d0_grid[di], ms});
      if (!first && ms.mean >= spec.target) first = spec.d0_grid[di];
    }
    out.first_d0_reaching_target[spec.scenarios[si]] = first;
  }
  return out;
}

/// Largest effective distance any merge was made over.
inline double max_link_distance(const RunReport& report) {
  double worst = 0.0;
  for (const auto& e : report.events)
    if (const auto* m = std::get_if<MergeEvent>(&e)) worst = std::max(worst, m->distance);
  return worst;
}

struct ConnectivityThreshold {
  Scenario scenario;
  double d0 = 0.0;
  /// Mean P_inf at the returned d0 (>= target).
  double p_inf = 0.0;
  /// Largest link distance used at that d0, maximised over replicates.
  double d_worst = 0.0;
};

/// Smallest d0 at which the replicate-mean P_inf reaches `target`, by
/// bisection on log d0 to relative precision `rel_tol`. Ranges scale with d0
/// (including the sudden-death cap), so every replicate's partition coarsens
/// monotonically and the mean is monotone.
inline ConnectivityThreshold min_d0_for_connectivity(const std::vector<SpatialNetwork>& networks,
                                                     const RangeModel& base, Scenario scenario,
                                                     double target, double d0_lo, double d0_hi,
                                                     double rel_tol = 1e-3,
                                                     const RunOptions& options = {}, unsigned jobs = 1) {
  if (networks.empty()) throw DomainError("no networks");
  if (!(d0_lo > 0.0 && d0_hi > d0_lo)) throw DomainError("invalid d0 bracket");
  if (!(rel_tol > 0.0)) throw DomainError("tolerance must be positive");
  auto evaluate = [&](double d0, bool keep_events, double* d_worst) {
    const auto model = scenario_model(base.with_d0(d0), scenario);
    std::vector<double> p(networks.size()), worst(networks.size());
    RunOptions opt = options;
    opt.record_events = keep_events;
    parallel_for(networks.size(), jobs, [&](std::size_t i) {
      const auto report = percolate(networks[i], model, opt);
      p[i] = report.giant_fraction;
      worst[i] = keep_events ? max_link_distance(report) : 0.0;
    });
    if (d_worst) *d_worst = *std::max_element(worst.begin(), worst.end());
    return mean_std(p).mean;
  };
  if (evaluate(d0_lo, false, nullptr) >= target)
    throw DomainError("d0 bracket does not straddle the target: lower end already connected");
  if (evaluate(d0_hi, false, nullptr) < target)
    throw DomainError("d0 bracket does not straddle the target: upper end not connected");
  double lo = d0_lo, hi = d0_hi;
  while (hi / lo > 1.0 + rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (evaluate(mid, false, nullptr) >= target)
      hi = mid;
    else
      lo = mid;
  }
  ConnectivityThreshold out{scenario, hi, 0.0, 0.0};
  out.p_inf = evaluate(hi, true, &out.d_worst);
  return out;
}

// ---------------------------------------------------------------------------
// Percolation threshold on point clouds

struct ThresholdSpec {
  double target = 0.5;
  /// Bisection bracket on epsilon; converted to r0 through the range model.
  double eps_lo = 1e-6;
  double eps_hi = 0.5;
  /// Absolute tolerance on r0.
  double tol = 1e-4;
  std::vector<std::uint64_t> seeds{0};
  std::size_t bootstrap_resamples = 1000;
  double confidence = 0.95;
  std::uint64_t bootstrap_seed = 0;
};

struct ThresholdEstimate {
  double alpha = 0.0;
  double r0_th = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t replicates = 0;
  std::vector<double> per_replicate;
};

/// Estimates the base range r0 at which P_inf first reaches `target`.
/// Each replicate network is bisected on epsilon (refinement monotonicity
/// makes P_inf non-decreasing in r0); the estimate is the replicate mean with
/// a percentile bootstrap interval.
inline ThresholdEstimate find_threshold(const NetworkFactory& make_network, const RangeModel& model,
                                        const ThresholdSpec& spec, const RunOptions& options = {},
                                        unsigned jobs = 1) {
  if (!(spec.tol > 0.0)) throw DomainError("threshold tolerance must be positive");
  if (!(spec.eps_lo > 0.0 && spec.eps_hi > spec.eps_lo && spec.eps_hi < 1.0))
    throw DomainError("epsilon bracket must satisfy 0 < lo < hi < 1");
  if (!(spec.target > 0.0 && spec.target <= 1.0)) throw DomainError("target must lie in (0, 1]");
  if (spec.seeds.empty()) throw DomainError("at least one replicate seed is required");

  ThresholdEstimate out;
  out.alpha = model.distill.alpha();
  out.replicates = spec.seeds.size();
  out.per_replicate.assign(spec.seeds.size(), 0.0);
  RunOptions quiet = options;
  quiet.record_events = false;

  parallel_for(spec.seeds.size(), jobs, [&](std::size_t i) {
    const auto net = make_network(spec.seeds[i]);
    if (spec.target <= 1.0 / static_cast<double>(net.size())) {
      out.per_replicate[i] = 0.0;
      return;
    }
    auto p_inf = [&](double eps) { return percolate(net, model.with_epsilon(eps), quiet).giant_fraction; };
    double lo = spec.eps_lo, hi = spec.eps_hi;
    if (p_inf(lo) >= spec.target || p_inf(hi) < spec.target)
      throw DomainError("epsilon bracket does not straddle the target for replicate seed " +
                        std::to_string(spec.seeds[i]));
    while (model.with_epsilon(hi).base() - model.with_epsilon(lo).base() > spec.tol) {
      const double mid = 0.5 * (lo + hi);
      if (p_inf(mid) >= spec.target)
        hi = mid;
      else
        lo = mid;
    }
    out.per_replicate[i] = 0.5 * (model.with_epsilon(lo).base() + model.with_epsilon(hi).base());
  });

  out.r0_th = mean_std(out.per_replicate).mean;
  const auto ci = bootstrap_mean_ci(out.per_replicate, spec.bootstrap_resamples, spec.confidence,
                                    spec.bootstrap_seed);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

// ---------------------------------------------------------------------------
// Time complexity of remote distillation

struct ComplexityParams {
  double m = 1.0;
  /// Worst-case BBPSSW success probability.
  double p = 0.5;
  double eta = 1.0;

  void validate() const {
    if (!(m >= 1.0) || !std::isfinite(m)) throw DomainError("m must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("success probability must lie in (0, 1)");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  }
};

namespace detail {

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// ln f(n) for eta = 1: f(n) = (n/2)^(-log2 p) for n <= m, otherwise
/// (n/2)^(-log2 p) + m [ (n/m)^2 / 4 + (n/m) log2(n/m) / 2 ] f(n/2).
inline double log_f_unit_eta(double n, double m, double p) {
  const double distill_exponent = -std::log2(p);
  std::vector<double> first_terms;
  std::vector<double> factors;
  while (n > m) {
    const double x = n / m;
    first_terms.push_back(distill_exponent * std::log(n / 2.0));
    // ln(m [x^2/4 + x log2(x)/2]) without forming x^2
    factors.push_back(std::log(m) + 2.0 * std::log(x) - std::log(4.0) + std::log1p(2.0 * std::log2(x) / x));
    n /= 2.0;
  }
  double log_f = distill_exponent * std::log(n / 2.0);
  for (std::size_t k = first_terms.size(); k-- > 0;) log_f = log_add(first_terms[k], factors[k] + log_f);
  return log_f;
}

}  // namespace detail

/// Natural log of the remote-distillation time complexity f(n). With eta < 1
/// only n^eta of the n pairs are distilled, so f is evaluated at n^eta.
inline double log_complexity_f(double n, const ComplexityParams& cp) {
  cp.validate();
  if (!(n >= 1.0)) throw DomainError("pair count must be >= 1");
  return detail::log_f_unit_eta(std::pow(n, cp.eta), cp.m, cp.p);
}

inline double complexity_f(double n, const ComplexityParams& cp) { return std::exp(log_complexity_f(n, cp)); }

enum class InterpolationRule {
  /// Geometric mean of f at the two bracketing halving points.
  BracketMidpoint,
  /// log10 f linear in log2 n between the bracketing halving points.
  LogLinear,
};

inline const char* to_string(InterpolationRule r) {
  return r == InterpolationRule::BracketMidpoint ? "midpoint" : "loglinear";
}

inline InterpolationRule parse_interpolation_rule(const std::string& s) {
  if (s == "midpoint") return InterpolationRule::BracketMidpoint;
  if (s == "loglinear") return InterpolationRule::LogLinear;
  throw DomainError("unknown interpolation rule '" + s + "'");
}

/// Estimates f between the halving points n = m 2^k at which the recursion is
/// tabulated. Queries on a halving point return complexity_f exactly.
inline double interpolate_f(double n, const ComplexityParams& cp,
                            InterpolationRule rule = InterpolationRule::BracketMidpoint) {
  cp.validate();
  if (!(n >= 1.0)) throw DomainError("pair count must be >= 1");
  const double k = std::log2(n / cp.m);
  if (std::abs(k - std::round(k)) < 1e-9) return complexity_f(n, cp);
  const double lo = cp.m * std::exp2(std::floor(k));
  const double hi = 2.0 * lo;
  const double log_lo = log_complexity_f(std::max(lo, 1.0), cp);
  const double log_hi = log_complexity_f(hi, cp);
  if (rule == InterpolationRule::BracketMidpoint) return std::exp(0.5 * (log_lo + log_hi));
  const double t = k - std::floor(k);
  return std::exp(log_lo + t * (log_hi - log_lo));
}

/// Pairs needed to stretch a link to d_worst: n = (3 d_worst / (4 eps d0))^(1/alpha).
inline long worst_case_n(double epsilon, double d_worst, double d0, double alpha) {
  if (!(epsilon > 0.0) || !(d_worst > 0.0) || !(d0 > 0.0))
    throw DomainError("epsilon, d_worst and d0 must be positive");
  if (alpha == 0.0) throw DomainError("worst-case pair count is undefined for alpha = 0");
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  return std::lround(std::pow(3.0 * d_worst / (4.0 * epsilon * d0), 1.0 / alpha));
}

/// Time the memories must hold photons: f rounds at the given detection rate.
inline double coherence_time(double f_value, double detection_rate_hz) {
  if (!(detection_rate_hz > 0.0)) throw DomainError("detection rate must be positive");
  if (f_value < 0.0) throw DomainError("round count must be non-negative");
  return f_value / detection_rate_hz;
}

}  // namespace qperc
