#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenctl/trace.hpp"

namespace lenctl {

// ---------------------------------------------------------------------------
// Repetition

inline constexpr std::size_t kDefaultRepeatMinBlock = 20;
inline constexpr std::size_t kDefaultRepeatK = 3;

struct RepeatEvidence {
  std::uint64_t block_hash = 0;     // FNV-1a 64 of the block's tokens joined by single spaces
  std::size_t occurrences = 0;      // non-overlapping occurrences
  std::size_t block_tokens = 0;     // block length after extension
  std::size_t first_position = 0;   // token index of the first occurrence
};

struct RepeatVerdict {
  std::string trace_id;
  bool repetitive = false;
  std::optional<RepeatEvidence> evidence;  // the most repeated min-length block, if any repeats
};

// A text is repetitive iff some contiguous run of >= min_block whitespace
// tokens occurs >= k times without overlap. Any such run contains a
// min_block-token window with the same property, so only those windows are
// searched; the winning window is then extended rightwards while every
// occurrence still agrees and no two occurrences overlap.
RepeatVerdict detect_repetition(std::string_view text, std::size_t min_block = kDefaultRepeatMinBlock,
                                std::size_t k = kDefaultRepeatK);
RepeatVerdict detect_repetition(const Trace& trace, std::size_t min_block = kDefaultRepeatMinBlock,
                                std::size_t k = kDefaultRepeatK);

// Fraction of wrong traces judged repetitive. Throws UndefinedRateError when
// the set has no wrong answers.
double repeat_rate(const TraceSet& traces, std::size_t min_block = kDefaultRepeatMinBlock,
                   std::size_t k = kDefaultRepeatK);

std::uint64_t fnv1a64(std::string_view bytes);

// ---------------------------------------------------------------------------
// Lengths

inline constexpr std::int64_t kDefaultBinWidth = 256;

struct LengthStats {
  std::size_t n = 0;
  std::size_t n_correct = 0;
  std::size_t n_wrong = 0;
  // Exact integer sums, so n * mean_all == sum_correct + sum_wrong holds exactly.
  std::int64_t sum_all = 0;
  std::int64_t sum_correct = 0;
  std::int64_t sum_wrong = 0;
  double mean_all = 0.0;
  std::optional<double> mean_correct;  // absent when the bucket is empty
  std::optional<double> mean_wrong;
  std::int64_t bin_width = kDefaultBinWidth;
  std::vector<std::size_t> histogram;  // bin i counts lengths in [i*w, (i+1)*w)
};

// Uses total_len. Throws ValidationError on an empty set or bin_width <= 0.
LengthStats length_stats(const TraceSet& traces, std::int64_t bin_width = kDefaultBinWidth);

struct ThinkSolutionRatio {
  double ratio = 0.0;
  bool zero_solution = false;
};

// thinking_len / max(solution_len, 1).
ThinkSolutionRatio think_solution_ratio(const Trace& trace);

// ---------------------------------------------------------------------------
// Reasoning steps

inline constexpr std::string_view kStepKeywords[] = {
    "But", "Wait,", "Alternatively,", "Perhaps", "First,", "Okay,", "Given", "The", "Therefore,", "So,"};

// Total case-sensitive substring occurrences of every step keyword. Keywords
// are counted independently, so "Therefore," also counts one "The".
std::size_t count_steps(std::string_view text);

// ---------------------------------------------------------------------------
// Pareto front (maximize accuracy, minimize mean length)

struct ParetoPoint {
  std::string label;
  double accuracy = 0.0;     // percent, [0, 100]
  double mean_length = 0.0;  // tokens

  friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

// True when `a` dominates `b`: at least as accurate, at most as long, strictly
// better in one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);

// Non-dominated points in input order. Equal points never dominate each other,
// so duplicates on the front are all kept. Throws ValidationError on empty
// input or non-finite values.
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points);

}  // namespace lenctl
