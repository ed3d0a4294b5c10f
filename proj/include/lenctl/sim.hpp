#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lenctl/logits.hpp"
#include "lenctl/policy.hpp"
#include "lenctl/trace.hpp"

namespace lenctl {

// Simulator vocabulary layout. Body tokens occupy [kSimFirstBody, vocab_size)
// and render as "t<i>".
inline constexpr std::size_t kSimEos = 0;
inline constexpr std::size_t kSimEndThink = 1;
inline constexpr std::size_t kSimWait = 2;
inline constexpr std::size_t kSimFirstBody = 3;

// Logit boost on the next block token while a loop is active.
inline constexpr double kLoopBoost = 20.0;

// An injected repetition loop: from content position `start`, the next token
// of `repeat_block` is boosted by kLoopBoost. The block plays `repeats` times
// (0 = until the run ends). An empty repeat_block is replaced by `period`
// consecutive body tokens starting at kSimFirstBody.
struct LoopInject {
  std::int64_t start = 0;
  std::int64_t period = 0;
  std::int64_t repeats = 0;
  std::vector<std::size_t> repeat_block;
  double probability = 1.0;  // chance a given run gets the loop

  std::vector<std::size_t> block(std::size_t vocab_size) const;
};

struct SimConfig {
  std::size_t vocab_size = 16;
  double eos_logit = 0.0;
  std::optional<double> end_think_logit;  // absent: end-of-thinking is never proposed
  double body_logit = 0.0;
  std::optional<LoopInject> loop_inject;
  std::uint64_t seed = 0;
  std::int64_t max_steps = 4096;
  double correct_prob = 0.0;  // chance a finished trace is marked correct

  std::string prompt = "simulated question";
  std::string model = "sim-lm";
  std::string dataset = "synthetic";

  void validate() const;
};

// Position of a simulator run. `step` counts content tokens; the
// end-of-thinking delimiter flips `in_solution` without advancing it.
struct SimState {
  std::int64_t step = 0;
  bool in_solution = false;
  bool loop_active = false;
};

// Static logits, masking end-of-thinking once the solution started and the
// wait token always, plus the loop boost when a loop covers `state.step`.
LogitVector sim_logits(const SimState& state, const SimConfig& cfg);

// Mean of a geometric stopping time with per-step stop probability p.
double expected_length(double p_eos);

class SimSource final : public TokenSource {
 public:
  SimSource(const SimConfig& cfg, bool loop_active);

  LogitVector next_logits() override;
  void accept(std::size_t token) override;
  // Whitespace words: "t<i>" maps to body token i, "</think>" to the
  // delimiter, anything else to the wait token.
  std::vector<std::size_t> encode(std::string_view text) const override;
  std::string render(std::size_t token) const override;

  const SimState& state() const { return state_; }

 private:
  const SimConfig& cfg_;
  SimState state_;
};

struct SimRun {
  Trace trace;
  PolicyState policy_state;
  bool loop_injected = false;
};

// One seeded run: sim logits -> optional EOS scaling -> policy -> sample.
// The policy's max_total is capped at cfg.max_steps. Deterministic in
// (cfg, policy, eos_temp).
SimRun generate(const SimConfig& cfg, const PolicyConfig& policy,
                std::optional<EosTemperature> eos_temp = std::nullopt);

// `runs` independent runs; run i uses seed stream_seed(cfg.seed, i) and id
// "run-<i>". Header max_context is the effective max_total.
struct SimBatch {
  TraceSet set;
  std::vector<SimRun> runs;
};
SimBatch simulate(const SimConfig& cfg, const PolicyConfig& policy, std::size_t runs,
                  std::optional<EosTemperature> eos_temp = std::nullopt);

}  // namespace lenctl
