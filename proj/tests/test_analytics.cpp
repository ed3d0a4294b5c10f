#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lenctl/errors.hpp"
#include "lenctl/analytics.hpp"
#include "lenctl/fixtures.hpp"
#include "lenctl/rng.hpp"
#include "lenctl/sim.hpp"

namespace lenctl {
namespace {

std::string words(std::size_t n, const std::string& prefix, std::size_t offset = 0) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) s += ' ';
    s += prefix + std::to_string(offset + i);
  }
  return s;
}

Trace wrong_trace(const std::string& id, std::string thinking) {
  Trace t;
  t.id = id;
  t.thinking_text = std::move(thinking);
  t.thinking_len = count_whitespace_tokens(t.thinking_text);
  t.total_len = t.thinking_len;
  return t;
}

std::string repeated(const std::string& block, int times, const std::string& sep = " filler ") {
  std::string s;
  for (int i = 0; i < times; ++i) {
    if (i > 0) s += sep;
    s += block;
  }
  return s;
}

TEST(RepeatRate, OneOfFour) {
  TraceSet set;
  set.traces.push_back(wrong_trace("a", words(40, "x") + " " + repeated(words(30, "b"), 5) + " " + words(10, "y")));
  set.traces.push_back(wrong_trace("b", words(200, "c")));
  set.traces.push_back(wrong_trace("c", words(60, "c") + " Wait Wait " + words(60, "e")));  // short interjections only
  set.traces.push_back(wrong_trace("d", words(50, "d")));
  EXPECT_EQ(repeat_rate(set, 20, 3), 0.25);
}

TEST(RepeatRate, AllCorrectIsUndefined) {
  TraceSet set;
  auto t = wrong_trace("a", "x y z");
  t.correct = true;
  set.traces.push_back(t);
  EXPECT_THROW(repeat_rate(set), UndefinedRateError);
  EXPECT_THROW(repeat_rate(TraceSet{}), UndefinedRateError);
}

TEST(RepeatRate, OrderAndCorrectDuplicationInvariant) {
  TraceSet set;
  for (int i = 0; i < 6; ++i) {
    set.traces.push_back(wrong_trace(std::to_string(i), i % 3 == 0 ? repeated(words(25, "r"), 4) : words(90, "q")));
  }
  auto ok = wrong_trace("ok", repeated(words(25, "r"), 4));
  ok.correct = true;
  set.traces.push_back(ok);
  const double base = repeat_rate(set);
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    TraceSet s2 = set;
    std::shuffle(s2.traces.begin(), s2.traces.end(), gen);
    for (int d = 0; d < trial; ++d) s2.traces.push_back(ok);
    EXPECT_EQ(repeat_rate(s2), base);
  }
}

TEST(DetectRepetition, ParagraphRepeated180Times) {
  const auto v = detect_repetition(repeated(words(30, "p"), 180, " "));
  EXPECT_TRUE(v.repetitive);
  ASSERT_TRUE(v.evidence);
  EXPECT_GE(v.evidence->occurrences, 3u);
}

TEST(DetectRepetition, TwiceIsNotEnough) {
  const auto v = detect_repetition(repeated(words(30, "p"), 2), 20, 3);
  EXPECT_FALSE(v.repetitive);
  ASSERT_TRUE(v.evidence);
  EXPECT_EQ(v.evidence->occurrences, 2u);
  EXPECT_EQ(v.evidence->block_tokens, 30u);
}

TEST(DetectRepetition, EvidenceExtendsToWholeBlock) {
  const std::string block = words(30, "b");
  const auto v = detect_repetition(words(5, "x") + " " + repeated(block, 5), 20, 3);
  ASSERT_TRUE(v.repetitive);
  EXPECT_EQ(v.evidence->occurrences, 5u);
  EXPECT_EQ(v.evidence->block_tokens, 30u);
  EXPECT_EQ(v.evidence->first_position, 5u);
  EXPECT_EQ(v.evidence->block_hash, fnv1a64(block));
}

TEST(DetectRepetition, WhitespaceNormalized) {
  const std::string block = words(20, "w");
  std::string spaced = block;
  std::replace(spaced.begin(), spaced.end(), ' ', '\n');
  EXPECT_TRUE(detect_repetition(block + "  " + spaced + "\t\t" + block).repetitive);
}

TEST(DetectRepetition, ShortRandomTextIsClean) { EXPECT_FALSE(detect_repetition("a b c").repetitive); }

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

// Ground truth from injection bookkeeping: 37 of 100 wrong runs carry a loop.
TEST(RepeatRate, SimulatorInjectionGroundTruth) {
  SimConfig plain;
  plain.vocab_size = 500;
  plain.eos_logit = -1.0;
  plain.max_steps = 400;
  SimConfig looped = plain;
  looped.loop_inject = LoopInject{0, 30, 0, {}, 1.0};

  TraceSet set;
  std::size_t truth = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    SimConfig c = i % 100 < 37 ? looped : plain;
    c.seed = stream_seed(2024, i);
    const auto run = generate(c, PolicyConfig{});
    truth += run.loop_injected ? 1 : 0;
    set.traces.push_back(run.trace);
  }
  ASSERT_EQ(truth, 37u);
  EXPECT_EQ(repeat_rate(set), 0.37);
}

TEST(LengthStats, SmallSet) {
  TraceSet set;
  for (auto [len, ok] : {std::pair{100, true}, std::pair{300, true}, std::pair{600, false}}) {
    Trace t;
    t.total_len = len;
    t.thinking_len = len;
    t.correct = ok;
    set.traces.push_back(t);
  }
  const auto s = length_stats(set);
  EXPECT_DOUBLE_EQ(s.mean_all, 1000.0 / 3.0);
  EXPECT_EQ(s.mean_correct, 200.0);
  EXPECT_EQ(s.mean_wrong, 600.0);
  EXPECT_EQ(s.n_correct, 2u);
  EXPECT_EQ(s.n_wrong, 1u);
  ASSERT_EQ(s.histogram.size(), 3u);
  EXPECT_EQ(s.histogram[0], 1u);
  EXPECT_EQ(s.histogram[1], 1u);
  EXPECT_EQ(s.histogram[2], 1u);
}

TEST(LengthStats, SingleTraceEmptyBucketAbsent) {
  TraceSet set;
  Trace t;
  t.total_len = 42;
  t.thinking_len = 42;
  t.correct = true;
  set.traces.push_back(t);
  const auto s = length_stats(set);
  EXPECT_EQ(s.mean_all, 42.0);
  EXPECT_EQ(s.mean_correct, 42.0);
  EXPECT_FALSE(s.mean_wrong.has_value());
}

TEST(LengthStats, EmptyIsError) { EXPECT_THROW(length_stats(TraceSet{}), ValidationError); }

TEST(LengthStats, ReproducesFixtureMean) {
  const auto& f = find_fixture("ts_math500");
  const auto it = std::find_if(f.rows.begin(), f.rows.end(), [](const FixtureRow& r) {
    return r.model == "SFT-DeepSeek-7b" && r.condition == "Base";
  });
  ASSERT_NE(it, f.rows.end());
  // 50 integer lengths summing to 4078.26 * 50 = 203913.
  TraceSet set;
  std::int64_t remaining = 203913;
  for (int i = 0; i < 50; ++i) {
    Trace t;
    t.total_len = i == 49 ? remaining : 3000 + 44 * i;
    t.thinking_len = t.total_len;
    t.correct = i % 9 != 0;
    remaining -= t.total_len;
    set.traces.push_back(t);
  }
  EXPECT_NEAR(length_stats(set).mean_all, it->mean_length, 1e-9);
}

TEST(LengthStatsProperty, WeightedMeanIdentity) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 300; ++trial) {
    TraceSet set;
    const std::size_t n = 1 + gen() % 100;
    for (std::size_t i = 0; i < n; ++i) {
      Trace t;
      t.total_len = static_cast<std::int64_t>(gen() % 5000);
      t.correct = gen() % 2 == 0;
      set.traces.push_back(t);
    }
    const auto s = length_stats(set);
    EXPECT_EQ(s.sum_all, s.sum_correct + s.sum_wrong);
    EXPECT_EQ(s.n, s.n_correct + s.n_wrong);
    const double lhs = s.mean_all * static_cast<double>(s.n);
    const double rhs = s.mean_correct.value_or(0.0) * static_cast<double>(s.n_correct) +
                       s.mean_wrong.value_or(0.0) * static_cast<double>(s.n_wrong);
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, lhs));
  }
}

TEST(ThinkSolutionRatio, Examples) {
  Trace t;
  t.thinking_len = 500;
  t.solution_len = 1500;
  EXPECT_DOUBLE_EQ(think_solution_ratio(t).ratio, 1.0 / 3.0);
  t.thinking_len = 0;
  t.solution_len = 100;
  EXPECT_EQ(think_solution_ratio(t).ratio, 0.0);
  t.thinking_len = 100;
  t.solution_len = 0;
  const auto r = think_solution_ratio(t);
  EXPECT_EQ(r.ratio, 100.0);
  EXPECT_TRUE(r.zero_solution);
}

std::size_t naive_steps(const std::string& text) {
  std::size_t n = 0;
  for (std::string_view kw : kStepKeywords) {
    for (std::size_t i = 0; i + kw.size() <= text.size(); ++i) {
      bool match = true;
      for (std::size_t j = 0; j < kw.size() && match; ++j) match = text[i + j] == kw[j];
      n += match ? 1 : 0;
    }
  }
  return n;
}

TEST(CountSteps, Examples) {
  EXPECT_EQ(count_steps("Wait, no. So, yes."), 2u);
  EXPECT_EQ(count_steps(""), 0u);
  EXPECT_EQ(count_steps("wait, so, but"), 0u);  // case-sensitive
  EXPECT_EQ(count_steps("Therefore, x"), 2u);     // also contains "The"
}

std::string planted_text(std::mt19937_64& gen, std::size_t n_words) {
  static const char* vocab[] = {"But", "Wait,", "Alternatively,", "Perhaps", "First,", "Okay,", "Given",
                                "The", "Therefore,", "So,", "x", "y", "then", "Thus", "wait", "so", "Th", "e"};
  std::string s;
  for (std::size_t i = 0; i < n_words; ++i) {
    if (i > 0 && gen() % 5 != 0) s += ' ';
    s += vocab[gen() % std::size(vocab)];
  }
  return s;
}

TEST(CountSteps, MatchesNaiveScanner) {
  std::mt19937_64 gen(1000);
  for (int trial = 0; trial < 50; ++trial) {
    const auto text = planted_text(gen, 1000);
    EXPECT_EQ(count_steps(text), naive_steps(text));
  }
}

TEST(CountStepsProperty, ConcatenationIsSuperadditive) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = planted_text(gen, gen() % 20);
    const auto b = planted_text(gen, gen() % 20);
    EXPECT_GE(count_steps(a + b), count_steps(a) + count_steps(b));
  }
  EXPECT_EQ(count_steps("Th" + std::string("e")), 1u);
}

// O(n^2) pairwise domination oracle.
std::vector<ParetoPoint> brute_front(const std::vector<ParetoPoint>& pts) {
  std::vector<ParetoPoint> out;
  for (const auto& p : pts) {
    bool dominated = false;
    for (const auto& q : pts) {
      if (q.accuracy >= p.accuracy && q.mean_length <= p.mean_length &&
          (q.accuracy > p.accuracy || q.mean_length < p.mean_length)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(p);
  }
  return out;
}

std::vector<ParetoPoint> random_points(std::mt19937_64& gen, std::size_t n, bool coarse) {
  std::vector<ParetoPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    // Coarse grids force ties on both axes.
    const double acc = coarse ? static_cast<double>(gen() % 11) * 10.0 : static_cast<double>(gen() % 100001) / 1000.0;
    const double len = coarse ? static_cast<double>(gen() % 8) * 100.0 : static_cast<double>(gen() % 4000000) / 1000.0;
    pts.push_back({"p" + std::to_string(i), acc, len});
  }
  return pts;
}

TEST(ParetoFront, PublishedPair) {
  const std::vector<ParetoPoint> pts{{"tldr", 78.4, 1285.9}, {"prompt", 69.6, 2109.0}};
  const auto f = pareto_front(pts);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].label, "tldr");
}

TEST(ParetoFront, SinglePoint) {
  const std::vector<ParetoPoint> pts{{"only", 50.0, 100.0}};
  EXPECT_EQ(pareto_front(pts), pts);
}

TEST(ParetoFront, Errors) {
  EXPECT_THROW(pareto_front(std::vector<ParetoPoint>{}), ValidationError);
  EXPECT_THROW(pareto_front(std::vector<ParetoPoint>{{"x", NAN, 1.0}}), ValidationError);
}

TEST(ParetoFront, DuplicatesKept) {
  const std::vector<ParetoPoint> pts{{"a", 50, 100}, {"b", 50, 100}, {"c", 40, 100}};
  const auto f = pareto_front(pts);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].label, "a");
  EXPECT_EQ(f[1].label, "b");
}

TEST(ParetoFrontProperty, MatchesBruteForceOracle) {
  std::mt19937_64 gen(200);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = random_points(gen, 1 + gen() % 200, trial % 2 == 0);
    const auto f = pareto_front(pts);
    EXPECT_EQ(f, brute_front(pts));
    for (const auto& a : f) {
      for (const auto& b : f) EXPECT_FALSE(dominates(a, b));
    }
    for (const auto& p : pts) {
      if (std::find(f.begin(), f.end(), p) != f.end()) continue;
      EXPECT_TRUE(std::any_of(f.begin(), f.end(), [&](const ParetoPoint& q) { return dominates(q, p); }));
    }
  }
}

TEST(ParetoFrontProperty, OrderInsensitiveAsASet) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = random_points(gen, 60, true);
    auto labels = [](std::vector<ParetoPoint> v) {
      std::vector<std::string> out;
      for (auto& p : v) out.push_back(p.label);
      std::sort(out.begin(), out.end());
      return out;
    };
    const auto before = labels(pareto_front(pts));
    std::shuffle(pts.begin(), pts.end(), gen);
    EXPECT_EQ(labels(pareto_front(pts)), before);
  }
}

}  // namespace
}  // namespace lenctl
