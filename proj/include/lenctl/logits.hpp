#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lenctl/rng.hpp"

namespace lenctl {

// Scores below/above this are clamped before exponentiation. Also used by the
// simulator as the score of tokens that must never be sampled.
inline constexpr double kLogitFloor = -1e30;
inline constexpr double kLogitCeil = 1e30;

// Per-step scores over a vocabulary, with the EOS index and an optional
// end-of-thinking index.
struct LogitVector {
  std::vector<double> scores;
  std::size_t eos_index = 0;
  std::optional<std::size_t> end_think_index;

  std::size_t size() const { return scores.size(); }
  double eos() const { return scores[eos_index]; }

  // Throws ValidationError on empty scores, out-of-range or colliding special
  // indices, or a non-finite score.
  void validate() const;
};

// Divisor applied to the EOS logit. T < 1 makes a positive EOS logit more
// likely to be sampled; T > 1 suppresses it.
class EosTemperature {
 public:
  explicit EosTemperature(double t);
  double value() const noexcept { return t_; }

 private:
  double t_;
};

// Returns a copy with scores[eos_index] divided by T; every other coordinate is
// untouched. Throws RangeError if the scaled logit is not finite.
LogitVector scale_eos(const LogitVector& logits, EosTemperature temp);

// Max-subtracted softmax. Scores are clamped to [kLogitFloor, kLogitCeil].
std::vector<double> softmax(std::span<const double> scores);
inline std::vector<double> softmax(const LogitVector& logits) { return softmax(logits.scores); }

inline constexpr double kDistributionTolerance = 1e-9;

// Inverse-CDF draw over the vector order using one uniform from `rng`.
// Throws ValidationError when entries are negative/non-finite or do not sum to
// 1 within kDistributionTolerance.
std::size_t sample_token(std::span<const double> probs, Rng& rng);

// 1-based rank of the EOS score among all scores (ties rank in EOS's favour).
std::size_t eos_rank(const LogitVector& logits);

}  // namespace lenctl
