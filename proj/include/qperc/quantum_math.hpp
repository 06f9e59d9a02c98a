#pragma once

// Channel, distillation and range formulas behind the percolation model.
//
// A link between two nodes at distance d carries a Werner state with weight
// p = exp(-d / d0). Distilling n stored pairs with nested BBPSSW rounds shrinks
// the infidelity by (2/3)^log2(n), which turns into a node (or component)
// range: the largest distance whose link can still be distilled up to the
// fidelity threshold 1 - epsilon.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "qperc/errors.hpp"

namespace qperc {

/// log2(3/2): the efficiency exponent of nested BBPSSW distillation.
inline const double kAlphaStar = std::log2(1.5);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

enum class RangeMode { Asymptotic, Exact };

inline const char* to_string(RangeMode m) {
  return m == RangeMode::Asymptotic ? "asymptotic" : "exact";
}

inline RangeMode parse_range_mode(const std::string& s) {
  if (s == "asymptotic") return RangeMode::Asymptotic;
  if (s == "exact") return RangeMode::Exact;
  throw DomainError("unknown range mode '" + s + "'");
}

class ChannelModel {
 public:
  ChannelModel(double d0, double epsilon) : d0_(d0), epsilon_(epsilon) {
    if (!(d0 > 0.0) || !std::isfinite(d0)) throw DomainError("d0 must be positive and finite");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  }

  double d0() const { return d0_; }
  double epsilon() const { return epsilon_; }
  /// Sudden-death length: beyond d0 ln 3 the Werner weight drops below 1/3
  /// and the state is separable.
  double beta() const { return d0_ * std::log(3.0); }

 private:
  double d0_;
  double epsilon_;
};

class DistillationParams {
 public:
  DistillationParams(double m, double alpha, double eta = 1.0) : m_(m), alpha_(alpha), eta_(eta) {
    if (!(m >= 1.0) || !std::isfinite(m)) throw DomainError("memories per node must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be >= 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  }

  double m() const { return m_; }
  double alpha() const { return alpha_; }
  double eta() const { return eta_; }
  double exponent() const { return eta_ * alpha_; }

 private:
  double m_;
  double alpha_;
  double eta_;
};

// ---------------------------------------------------------------------------
// Werner states and BBPSSW

inline double channel_p(double d, const ChannelModel& model) {
  if (std::isnan(d) || d < 0.0) throw DomainError("distance must be non-negative");
  if (std::isinf(d)) return 0.0;
  return std::exp(-d / model.d0());
}

inline double fidelity_of_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("Werner weight must lie in [0, 1]");
  return (3.0 * p + 1.0) / 4.0;
}

namespace detail {
inline void require_fidelity(double f) {
  if (!(f >= 0.25 && f <= 1.0)) throw DomainError("fidelity must lie in [0.25, 1]");
}
}  // namespace detail

/// Probability that one BBPSSW round on two Werner pairs of fidelity F keeps
/// the control pair.
inline double bbpssw_success(double f) {
  detail::require_fidelity(f);
  const double q = (1.0 - f) / 3.0;
  return f * f + 2.0 * f * (1.0 - f) / 3.0 + 5.0 * q * q;
}

/// Fidelity of the surviving pair after one successful BBPSSW round.
inline double bbpssw_fidelity(double f) {
  detail::require_fidelity(f);
  const double e = 1.0 - f;
  return (f * f + e * e / 9.0) / (f * f + (2.0 / 3.0) * f * e + (5.0 / 9.0) * e * e);
}

/// Fidelity after distilling n pairs in nested rounds. Exact mode runs
/// floor(log2 n) rounds of bbpssw_fidelity (n is rounded down to a power of
/// two); asymptotic mode applies 1 - F' = (2/3)^log2(n) (1 - F).
inline double nested_distill(double f, double n, RangeMode mode) {
  detail::require_fidelity(f);
  if (!(n >= 1.0)) throw DomainError("pair count must be >= 1");
  if (mode == RangeMode::Asymptotic) return 1.0 - std::pow(2.0 / 3.0, std::log2(n)) * (1.0 - f);
  const int rounds = static_cast<int>(std::floor(std::log2(n) + 1e-12));
  for (int i = 0; i < rounds; ++i) f = bbpssw_fidelity(f);
  return f;
}

/// Entanglement swapping of two Werner pairs: the weights multiply, so the
/// effective distances add.
inline double swap_p(double p_ab, double p_ac) {
  if (!(p_ab >= 0.0 && p_ab <= 1.0) || !(p_ac >= 0.0 && p_ac <= 1.0))
    throw DomainError("Werner weights must lie in [0, 1]");
  return p_ab * p_ac;
}

// ---------------------------------------------------------------------------
// Ranges

/// Range of a node whose link may be distilled with `memories` stored pairs.
/// Shared by base_range (memories = m) and component_range (memories = m s).
inline double range_for_memories(double memories, const ChannelModel& channel, double exponent,
                                 RangeMode mode, bool beta_cap) {
  const double x = (4.0 / 3.0) * channel.epsilon() * std::pow(memories, exponent);
  double r;
  if (mode == RangeMode::Asymptotic) {
    r = x * channel.d0();
  } else {
    if (x >= 1.0) return channel.beta();
    r = -channel.d0() * std::log1p(-x);
  }
  return beta_cap ? std::min(r, channel.beta()) : r;
}

inline double base_range(const ChannelModel& channel, const DistillationParams& params,
                         RangeMode mode = RangeMode::Asymptotic, bool beta_cap = true) {
  return range_for_memories(params.m(), channel, params.exponent(), mode, beta_cap);
}

inline double component_range(std::size_t s, const ChannelModel& channel,
                              const DistillationParams& params,
                              RangeMode mode = RangeMode::Asymptotic, bool beta_cap = true) {
  if (s < 1) throw DomainError("component size must be >= 1");
  return range_for_memories(params.m() * static_cast<double>(s), channel, params.exponent(), mode,
                            beta_cap);
}

/// Contraction rule written directly on ranges:
/// (r')^(1/k) = r_a^(1/k) + r_b^(1/k). Only meaningful for k > 0.
inline double contract_ranges(double r_a, double r_b, double exponent) {
  if (!(exponent > 0.0)) throw DomainError("contraction needs a positive exponent");
  const double hi = std::max(r_a, r_b), lo = std::min(r_a, r_b);
  if (!(hi > 0.0)) return 0.0;
  // r_hi * (1 + (r_lo / r_hi)^(1/k))^k
  const double t = std::pow(lo / hi, 1.0 / exponent);
  return hi * std::exp(exponent * std::log1p(t));
}

/// Everything that determines the range of a component of size s.
struct RangeModel {
  ChannelModel channel{1.0, 0.01};
  DistillationParams distill{1.0, kAlphaStar, 1.0};
  RangeMode mode = RangeMode::Asymptotic;
  bool beta_cap = true;
  /// false pins every component to the single-node range (point-to-point
  /// memory use without component-level distillation).
  bool size_growth = true;

  double base() const { return base_range(channel, distill, mode, beta_cap); }

  double range(std::size_t s) const {
    if (s < 1) throw DomainError("component size must be >= 1");
    if (!size_growth || distill.exponent() == 0.0) return base();
    return component_range(s, channel, distill, mode, beta_cap);
  }

  /// Ranges follow the contraction identity exactly (up to rounding) only in
  /// uncapped asymptotic mode with a growing, nonzero exponent.
  bool contraction_identity_holds() const {
    return mode == RangeMode::Asymptotic && !beta_cap && size_growth && distill.exponent() > 0.0;
  }

  RangeModel with_epsilon(double eps) const {
    RangeModel copy = *this;
    copy.channel = ChannelModel(channel.d0(), eps);
    return copy;
  }

  RangeModel with_d0(double d0) const {
    RangeModel copy = *this;
    copy.channel = ChannelModel(d0, channel.epsilon());
    return copy;
  }
};

}  // namespace qperc
