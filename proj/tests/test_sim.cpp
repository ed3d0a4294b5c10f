#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "lenctl/errors.hpp"
#include "lenctl/sim.hpp"

namespace lenctl {
namespace {

// Closed-form P(eos) for static logits: only EOS and `body` ordinary tokens
// carry mass (end-of-thinking absent, wait masked).
long double p_eos_oracle(long double eos_logit, std::size_t body, long double body_logit = 0.0L) {
  const long double e = std::exp(eos_logit);
  return e / (e + static_cast<long double>(body) * std::exp(body_logit));
}

SimConfig static_cfg(std::size_t vocab, double eos_logit) {
  SimConfig c;
  c.vocab_size = vocab;
  c.eos_logit = eos_logit;
  c.max_steps = 4096;
  return c;
}

TEST(SimLogits, SymmetricEosAndOneBody) {
  const auto cfg = static_cfg(4, 0.0);
  const auto p = softmax(sim_logits(SimState{}, cfg));
  EXPECT_DOUBLE_EQ(p[kSimEos], 0.5);
  EXPECT_DOUBLE_EQ(p[kSimFirstBody], 0.5);
  EXPECT_EQ(p[kSimEndThink], 0.0);
  EXPECT_EQ(p[kSimWait], 0.0);
}

TEST(SimLogits, NineBodyTokens) {
  // e^-2 / (e^-2 + 9), 40-digit evaluation.
  constexpr double kExpected = 0.01481448453073787383071789908611528528187;
  const auto p = softmax(sim_logits(SimState{}, static_cfg(12, -2.0)));
  EXPECT_NEAR(p[kSimEos], kExpected, 1e-15);
  EXPECT_NEAR(p[kSimEos], static_cast<double>(p_eos_oracle(-2.0L, 9)), 1e-15);
}

TEST(SimLogits, LoopForcesBlockToken) {
  auto cfg = static_cfg(16, 0.0);
  cfg.loop_inject = LoopInject{5, 0, 0, {7, 9, 4}, 1.0};
  SimState s;
  s.loop_active = true;
  for (std::int64_t step = 5; step < 20; ++step) {
    s.step = step;
    const auto l = sim_logits(s, cfg);
    const std::size_t expected = cfg.loop_inject->repeat_block[static_cast<std::size_t>(step - 5) % 3];
    const auto p = softmax(l);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      if (p[i] > p[argmax]) argmax = i;
    }
    EXPECT_EQ(argmax, expected);
    EXPECT_GT(p[expected], 0.9999);
  }
  s.step = 4;
  EXPECT_EQ(sim_logits(s, cfg).scores[7], 0.0);
}

TEST(SimLogits, EndThinkMaskedInSolution) {
  auto cfg = static_cfg(8, 0.0);
  cfg.end_think_logit = 1.0;
  SimState s;
  EXPECT_EQ(sim_logits(s, cfg).scores[kSimEndThink], 1.0);
  s.in_solution = true;
  EXPECT_EQ(sim_logits(s, cfg).scores[kSimEndThink], kLogitFloor);
}

TEST(SimConfig, Validation) {
  EXPECT_THROW(static_cfg(3, 0.0).validate(), ValidationError);
  auto c = static_cfg(8, 0.0);
  c.max_steps = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  auto l = static_cfg(8, 0.0);
  l.loop_inject = LoopInject{0, 0, 0, {1}, 1.0};
  EXPECT_THROW(l.validate(), ValidationError);
}

TEST(ExpectedLength, Values) {
  EXPECT_EQ(expected_length(1.0), 1.0);
  EXPECT_EQ(expected_length(0.5), 2.0);
  // 1 / 0.01481 = 67.5219...; the unrounded softmax value gives 67.5015...
  EXPECT_NEAR(expected_length(0.01481), 67.52, 0.005);
  EXPECT_NEAR(expected_length(0.01481448453073787383), 67.50150489037585, 1e-9);
  EXPECT_THROW(expected_length(0.0), ValidationError);
  EXPECT_THROW(expected_length(-0.1), ValidationError);
  EXPECT_THROW(expected_length(1.5), ValidationError);
}

TEST(Generate, UnboundedLoopTruncatesAtMaxSteps) {
  auto cfg = static_cfg(16, 0.0);
  cfg.max_steps = 1000;
  cfg.loop_inject = LoopInject{0, 8, 0, {}, 1.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto run = generate(cfg, PolicyConfig{});
    EXPECT_TRUE(run.loop_injected);
    EXPECT_TRUE(run.trace.truncated);
    EXPECT_EQ(run.trace.total_len, 1000);
  }
}

TEST(Generate, LowEosTemperatureShortensRuns) {
  auto cfg = static_cfg(20, 1.0);
  double sum_cold = 0;
  double sum_warm = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    cfg.seed = seed;
    sum_cold += generate(cfg, PolicyConfig{}, EosTemperature(0.1)).trace.total_len;
    sum_warm += generate(cfg, PolicyConfig{}, EosTemperature(1.0)).trace.total_len;
  }
  EXPECT_LT(sum_cold, sum_warm);
}

TEST(Generate, ExactControlHitsTarget) {
  auto cfg = static_cfg(16, -3.0);
  cfg.end_think_logit = -1.0;
  PolicyConfig ec;
  ec.kind = PolicyKind::ExactControl;
  ec.thinking_target = 50;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    cfg.seed = seed;
    const auto run = generate(cfg, ec);
    ASSERT_FALSE(run.trace.truncated);
    EXPECT_EQ(run.trace.thinking_len, 50);
  }
}

TEST(Generate, DeterministicBytes) {
  auto cfg = static_cfg(16, -1.0);
  cfg.end_think_logit = -1.5;
  cfg.loop_inject = LoopInject{3, 5, 2, {}, 0.5};
  cfg.correct_prob = 0.5;
  cfg.seed = 77;
  PolicyConfig bf;
  bf.kind = PolicyKind::BudgetForcing;
  bf.thinking_budget = 30;
  const auto a = simulate(cfg, bf, 50, EosTemperature(0.7));
  const auto b = simulate(cfg, bf, 50, EosTemperature(0.7));
  std::ostringstream sa;
  std::ostringstream sb;
  write_traces(sa, a.set);
  write_traces(sb, b.set);
  EXPECT_EQ(sa.str(), sb.str());
  cfg.seed = 78;
  std::ostringstream sc;
  write_traces(sc, simulate(cfg, bf, 50, EosTemperature(0.7)).set);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Generate, RenderedTextMatchesCounts) {
  auto cfg = static_cfg(16, -2.0);
  cfg.end_think_logit = -2.0;
  const auto batch = simulate(cfg, PolicyConfig{}, 200);
  for (const auto& t : batch.set.traces) {
    // EOS is counted but not rendered.
    const auto think_words = count_whitespace_tokens(t.thinking_text);
    const auto sol_words = count_whitespace_tokens(t.solution_text);
    EXPECT_EQ(think_words + sol_words + (t.truncated ? 0 : 1), t.total_len);
  }
}

// Empirical mean of the geometric stopping time within 3 standard errors.
TEST(SimProperty, GeometricMeanMatchesOracle) {
  auto cfg = static_cfg(10, 0.0);
  const long double p = p_eos_oracle(0.0L, 7);
  const double mean = static_cast<double>(1.0L / p);
  const double sd = static_cast<double>(std::sqrt((1.0L - p) / (p * p)));
  constexpr int kRuns = 100000;
  const auto batch = simulate(cfg, PolicyConfig{}, kRuns);
  double sum = 0;
  for (const auto& t : batch.set.traces) sum += static_cast<double>(t.total_len);
  const double se = sd / std::sqrt(static_cast<double>(kRuns));
  EXPECT_LT(std::abs(sum / kRuns - mean), 3 * se);
}

TEST(SimProperty, TemperatureOrdering) {
  auto cfg = static_cfg(32, 1.0);
  cfg.seed = 5;
  double prev = 0.0;
  for (double t : {0.3, 0.5, 0.7, 1.0}) {
    const auto batch = simulate(cfg, PolicyConfig{}, 10000, EosTemperature(t));
    double sum = 0;
    for (const auto& tr : batch.set.traces) sum += static_cast<double>(tr.total_len);
    const double mean = sum / 10000;
    EXPECT_GT(mean, prev) << "T=" << t;
    prev = mean;
  }
}

TEST(SimSource, EncodeAndRender) {
  const auto cfg = static_cfg(16, 0.0);
  SimSource src(cfg, false);
  EXPECT_EQ(src.encode("t5 </think> hello t99"),
            (std::vector<std::size_t>{5, kSimEndThink, kSimWait, kSimWait}));
  EXPECT_EQ(src.render(7), "t7");
  EXPECT_EQ(src.render(kSimWait), "Wait");
  EXPECT_EQ(src.render(kSimEos), "");
}

}  // namespace
}  // namespace lenctl
