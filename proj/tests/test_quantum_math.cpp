#include <cmath>

#include <gtest/gtest.h>

#include "qperc/quantum_math.hpp"

using namespace qperc;

namespace {

// Reference values computed once with mpmath at 30 digits.
constexpr double kSuccess075 = 0.722222222222222222;
constexpr double kFidelity09 = 0.926395939086294416;
constexpr double kFidelity075 = 0.788461538461538462;
constexpr double kNested09Round2 = 0.947207793233023351;
constexpr double kNested09Round3 = 0.962905351166482033;
constexpr double kAsym09n8 = 0.970370370370370370;
constexpr double kR0m102 = 0.199477775290567374;
constexpr double kR0m102Exact = 0.222490983396185799;
constexpr double kComponent10 = 0.0512744767724921299;

RangeModel model(double d0, double eps, double m, double alpha) {
  RangeModel r;
  r.channel = ChannelModel(d0, eps);
  r.distill = DistillationParams(m, alpha);
  return r;
}

}  // namespace

TEST(Channel, WernerWeightDecaysWithDistance) {
  const ChannelModel ch(1.0, 0.01);
  EXPECT_DOUBLE_EQ(channel_p(0.0, ch), 1.0);
  EXPECT_DOUBLE_EQ(channel_p(1.0, ch), std::exp(-1.0));
  EXPECT_EQ(channel_p(kUnreachable, ch), 0.0);
  EXPECT_THROW(channel_p(-1.0, ch), DomainError);
}

TEST(Channel, ParameterValidation) {
  EXPECT_THROW(ChannelModel(0.0, 0.01), DomainError);
  EXPECT_THROW(ChannelModel(1.0, 0.0), DomainError);
  EXPECT_THROW(ChannelModel(1.0, 1.0), DomainError);
  EXPECT_THROW(DistillationParams(0.5, 1.0), DomainError);
  EXPECT_THROW(DistillationParams(1.0, -0.1), DomainError);
  EXPECT_THROW(DistillationParams(1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(DistillationParams(1.0, 1.0, 1.5), DomainError);
}

TEST(Channel, SuddenDeathLength) {
  const ChannelModel ch(300.0, 0.01);
  EXPECT_NEAR(fidelity_of_p(channel_p(ch.beta(), ch)), 0.5, 1e-15);
}

TEST(Werner, FidelityOfWeight) {
  EXPECT_DOUBLE_EQ(fidelity_of_p(1.0), 1.0);
  EXPECT_DOUBLE_EQ(fidelity_of_p(0.0), 0.25);
  EXPECT_DOUBLE_EQ(fidelity_of_p(1.0 / 3.0), 0.5);
  EXPECT_THROW(fidelity_of_p(1.5), DomainError);
}

TEST(Bbpssw, SuccessProbability) {
  EXPECT_NEAR(bbpssw_success(0.75), kSuccess075, 1e-15);
  EXPECT_DOUBLE_EQ(bbpssw_success(1.0), 1.0);
  EXPECT_DOUBLE_EQ(bbpssw_success(0.25), 0.5);
  EXPECT_THROW(bbpssw_success(0.2), DomainError);
}

TEST(Bbpssw, OutputFidelity) {
  EXPECT_NEAR(bbpssw_fidelity(0.9), kFidelity09, 1e-15);
  EXPECT_NEAR(bbpssw_fidelity(0.75), kFidelity075, 1e-15);
  EXPECT_DOUBLE_EQ(bbpssw_fidelity(0.5), 0.5);
  EXPECT_DOUBLE_EQ(bbpssw_fidelity(1.0), 1.0);
}

TEST(Bbpssw, ImprovesAboveOneHalf) {
  for (double f = 0.51; f < 1.0; f += 0.01) EXPECT_GT(bbpssw_fidelity(f), f) << f;
  for (double f = 0.26; f < 0.5; f += 0.01) EXPECT_LT(bbpssw_fidelity(f), f) << f;
}

TEST(Nested, ExactRounds) {
  EXPECT_DOUBLE_EQ(nested_distill(0.9, 1, RangeMode::Exact), 0.9);
  EXPECT_NEAR(nested_distill(0.9, 2, RangeMode::Exact), kFidelity09, 1e-15);
  EXPECT_NEAR(nested_distill(0.9, 4, RangeMode::Exact), kNested09Round2, 1e-15);
  EXPECT_NEAR(nested_distill(0.9, 7, RangeMode::Exact), kNested09Round2, 1e-15);
  EXPECT_NEAR(nested_distill(0.9, 8, RangeMode::Exact), kNested09Round3, 1e-15);
  EXPECT_THROW(nested_distill(0.9, 0.5, RangeMode::Exact), DomainError);
}

TEST(Nested, AsymptoticShrinksInfidelity) {
  EXPECT_NEAR(nested_distill(0.9, 8, RangeMode::Asymptotic), kAsym09n8, 1e-15);
  EXPECT_DOUBLE_EQ(nested_distill(0.9, 1, RangeMode::Asymptotic), 0.9);
}

TEST(Swap, WeightsMultiplyAndDistancesAdd) {
  const ChannelModel ch(2.0, 0.01);
  EXPECT_NEAR(swap_p(channel_p(0.7, ch), channel_p(1.1, ch)), channel_p(1.8, ch), 1e-15);
  EXPECT_DOUBLE_EQ(swap_p(1.0, 0.4), 0.4);
  EXPECT_THROW(swap_p(1.2, 0.5), DomainError);
}

TEST(Range, SingleMemory) {
  const auto r = model(1.0, 0.01, 1.0, kAlphaStar);
  EXPECT_NEAR(r.base(), 0.04 / 3.0, 1e-17);
}

TEST(Range, HundredTwoMemories) {
  const auto r = model(1.0, 0.01, 102.0, kAlphaStar);
  EXPECT_NEAR(r.base(), kR0m102, 1e-15);
  auto exact = r;
  exact.mode = RangeMode::Exact;
  EXPECT_NEAR(exact.base(), kR0m102Exact, 1e-15);
}

TEST(Range, ComponentGrowth) {
  const auto r = model(1.0, 0.01, 1.0, kAlphaStar);
  EXPECT_NEAR(r.range(10), kComponent10, 1e-16);
  EXPECT_DOUBLE_EQ(r.range(1), r.base());
  EXPECT_THROW(r.range(0), DomainError);
  auto flat = r;
  flat.size_growth = false;
  EXPECT_DOUBLE_EQ(flat.range(10), flat.base());
}

TEST(Range, BetaCap) {
  auto r = model(1.0, 0.5, 1.0, 1.0);
  EXPECT_NEAR(r.range(100), std::log(3.0), 1e-15);
  r.beta_cap = false;
  EXPECT_NEAR(r.range(100), 200.0 / 3.0, 1e-12);
  r.mode = RangeMode::Exact;
  EXPECT_NEAR(r.range(100), std::log(3.0), 1e-15);
}

TEST(Range, ExactExceedsAsymptotic) {
  for (double eps : {0.001, 0.01, 0.1}) {
    auto a = model(1.0, eps, 8.0, 1.0);
    auto e = a;
    e.mode = RangeMode::Exact;
    EXPECT_GT(e.base(), a.base());
    EXPECT_NEAR(e.base() / a.base(), 1.0, 4.0 * eps * 8.0);
  }
}

TEST(Range, NonDecreasingInSize) {
  for (RangeMode mode : {RangeMode::Asymptotic, RangeMode::Exact}) {
    auto r = model(1.0, 0.05, 3.0, 0.8);
    r.mode = mode;
    for (std::size_t s = 1; s < 500; ++s) EXPECT_LE(r.range(s), r.range(s + 1));
  }
}

TEST(Contraction, MatchesComponentRange) {
  auto r = model(1.0, 0.01, 4.0, kAlphaStar);
  r.beta_cap = false;
  ASSERT_TRUE(r.contraction_identity_holds());
  const double k = r.distill.exponent();
  EXPECT_NEAR(contract_ranges(r.range(3), r.range(5), k), r.range(8), 1e-15);
  EXPECT_THROW(contract_ranges(1.0, 1.0, 0.0), DomainError);
}

TEST(Contraction, IdentityFlag) {
  auto r = model(1.0, 0.01, 4.0, kAlphaStar);
  EXPECT_FALSE(r.contraction_identity_holds());
  r.beta_cap = false;
  EXPECT_TRUE(r.contraction_identity_holds());
  r.mode = RangeMode::Exact;
  EXPECT_FALSE(r.contraction_identity_holds());
}

TEST(Modes, ParseRoundTrip) {
  EXPECT_EQ(parse_range_mode(to_string(RangeMode::Exact)), RangeMode::Exact);
  EXPECT_EQ(parse_range_mode(to_string(RangeMode::Asymptotic)), RangeMode::Asymptotic);
  EXPECT_THROW(parse_range_mode("fast"), DomainError);
}
