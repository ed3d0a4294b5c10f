#include "lenctl/logits.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lenctl/errors.hpp"

namespace lenctl {

void LogitVector::validate() const {
  if (scores.empty()) throw ValidationError("logits: empty score vector");
  if (eos_index >= scores.size()) throw ValidationError("logits: eos_index out of range");
  if (end_think_index) {
    if (*end_think_index >= scores.size()) throw ValidationError("logits: end_think_index out of range");
    if (*end_think_index == eos_index) throw ValidationError("logits: eos_index equals end_think_index");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw ValidationError("logits: score " + std::to_string(i) + " is not finite");
    }
  }
}

EosTemperature::EosTemperature(double t) : t_(t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ValidationError("EOS temperature must be a positive finite number");
  }
}

LogitVector scale_eos(const LogitVector& logits, EosTemperature temp) {
  logits.validate();
  LogitVector out = logits;
  const double scaled = logits.scores[logits.eos_index] / temp.value();
  if (!std::isfinite(scaled)) throw RangeError("scale_eos: scaled EOS logit is not finite");
  out.scores[logits.eos_index] = scaled;
  return out;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  double max = kLogitFloor;
  for (double s : scores) max = std::max(max, std::clamp(s, kLogitFloor, kLogitCeil));
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(std::clamp(scores[i], kLogitFloor, kLogitCeil) - max);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::size_t sample_token(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) throw ValidationError("sample_token: empty distribution");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("sample_token: invalid probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw ValidationError("sample_token: probabilities sum to " + std::to_string(total));
  }
  const double u = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left u at or past the final cumulative sum.
  return last_positive;
}

std::size_t eos_rank(const LogitVector& logits) {
  logits.validate();
  const double eos = logits.eos();
  std::size_t rank = 1;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (i != logits.eos_index && logits.scores[i] > eos) ++rank;
  }
  return rank;
}

}  // namespace lenctl
