#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenctl/trace.hpp"

namespace lenctl {

// Threshold fraction of l_max for one level, kept as a ratio so thresholds
// floor exactly.
struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

// Which token count a penalty is measured on.
enum class LengthBasis { Total, Thinking };

struct PenaltyConfig {
  double alpha = 0.1;  // strength of the linear length penalty (also the gamma of the multi-level runs)
  double beta = 0.3;   // flat penalty for a correct answer over its level threshold
  std::int64_t l_max = 4096;
  // Indexed by Level::Short, Level::Moderate, Level::Long.
  std::array<Fraction, 3> level_fractions{{{1, 4}, {1, 2}, {1, 1}}};
  LengthBasis basis = LengthBasis::Total;

  void validate() const;
};

// Reads `key = value` lines; `#` starts a comment. Keys: alpha, beta, l_max,
// short_fraction, moderate_fraction, long_fraction (as "n/d" or an integer),
// length_basis (total|thinking). Unknown keys are a ParseError.
PenaltyConfig parse_penalty_config(std::istream& in, PenaltyConfig base = {});

inline constexpr double kAccuracyWeight = 0.9;
inline constexpr double kFormatWeight = 0.1;

// 0.9 * r_acc + 0.1 * r_format. Both inputs must lie in [0, 1].
double base_reward(double r_acc, double r_format);

// alpha * length / l_max, for 0 <= length <= l_max.
double sweet_spot_penalty(std::int64_t length, const PenaltyConfig& cfg);

// floor(fraction * l_max) for the level. Level::None has no threshold.
std::int64_t level_threshold(Level level, const PenaltyConfig& cfg);

// Multi-level penalty:
//   correct, length <= level threshold -> 0
//   correct, length >  level threshold -> beta
//   incorrect                          -> sweet_spot_penalty(length)
// LONG's threshold is l_max, so a correct LONG response is never penalized.
double multilevel_penalty(Level level, std::int64_t length, bool correct, const PenaltyConfig& cfg);

inline double total_reward(double r_hat, double penalty) { return r_hat - penalty; }

inline constexpr double kDefaultAdvantageEpsilon = 1e-6;

// GRPO group-relative advantages: (r_i - mean) / (population std + epsilon).
// A constant group yields all zeros. Needs at least two rewards.
std::vector<double> group_advantages(std::span<const double> rewards,
                                     double epsilon = kDefaultAdvantageEpsilon);

std::string_view level_prompt(Level level);

struct RewardRecord {
  std::string id;
  double r_acc = 0.0;
  double r_format = 0.0;
  double r_hat = 0.0;
  double penalty = 0.0;
  double r_total = 0.0;
  std::int64_t length = 0;
  Level level = Level::None;
  bool correct = false;
  double advantage = 0.0;
};

// Scores one trace. r_acc is the correctness bit; r_format is 1 when the
// response closed its thinking and produced a non-empty solution. Level::None
// uses the sweet-spot penalty; other levels use the multi-level penalty.
RewardRecord score_trace(const Trace& trace, Level level, const PenaltyConfig& cfg);

// Scores every trace and fills advantages per group of traces sharing a
// prompt. Singleton groups get advantage 0.
std::vector<RewardRecord> score_traces(const TraceSet& set, const PenaltyConfig& cfg,
                                       std::optional<Level> level_override = std::nullopt,
                                       double epsilon = kDefaultAdvantageEpsilon);

}  // namespace lenctl
