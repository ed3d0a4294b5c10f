#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lenctl/logits.hpp"
#include "lenctl/rng.hpp"
#include "lenctl/trace.hpp"

namespace lenctl {

enum class PolicyKind { BudgetForcing, ExactControl, PromptControl, Auto };

std::string_view to_string(PolicyKind kind);
// Accepts the CLI spellings "bf", "ec", "pc", "auto".
std::optional<PolicyKind> parse_policy_kind(std::string_view text);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Auto;
  std::int64_t thinking_budget = 0;    // BF: cap on thinking tokens
  std::int64_t thinking_target = 0;    // EC: exact thinking length
  std::int64_t prompt_token_hint = 0;  // PC: n in "Think for up to n tokens."
  std::int64_t max_total = 4096;       // hard cap on thinking + solution tokens
  std::optional<std::int64_t> min_thinking;  // BF only: append wait_text before this
  std::string wait_text = "Wait";
  std::int64_t max_wait_appends = 4;

  // Throws ValidationError. EC with thinking_target >= max_total is rejected.
  void validate() const;
};

enum class Phase { Thinking, Solution, Done };

struct PolicyState {
  Phase phase = Phase::Thinking;
  std::int64_t thinking_emitted = 0;
  std::int64_t solution_emitted = 0;
  bool forced_end_think = false;
  std::int64_t suppressed_end_think_count = 0;
  std::int64_t wait_appends = 0;

  std::int64_t total() const { return thinking_emitted + solution_emitted; }
  friend bool operator==(const PolicyState&, const PolicyState&) = default;
};

enum class ActionKind { Emit, SuppressAndContinue, ForceEndThink, AppendWait, Stop };

std::string_view to_string(ActionKind kind);

struct Action {
  ActionKind kind = ActionKind::Emit;
  std::size_t token = 0;  // meaningful for Emit only

  friend bool operator==(const Action&, const Action&) = default;
};

// Decides what to do with the token the model proposed at this step.
//
// Rules, in priority order:
//   total at max_total                          -> Stop
//   BF, thinking at budget, proposal not end-of-thinking -> ForceEndThink
//   BF, proposal is EOS/end-of-thinking before min_thinking -> AppendWait
//       (until max_wait_appends is used up)
//   EC, thinking at target, proposal not end-of-thinking -> ForceEndThink
//   EC, proposal is EOS/end-of-thinking before target -> SuppressAndContinue
//   otherwise                                    -> Emit(proposed)
// A model-proposed end-of-thinking exactly at the BF budget or EC target is
// emitted as-is. AUTO and PC always emit.
//
// Throws StateError for phase Done or a state no legal run can reach.
Action policy_step(const PolicyState& state, const PolicyConfig& cfg, std::size_t proposed,
                   const LogitVector& logits);

// PC appends " Think for up to {n} tokens."; a level other than None prefixes
// the level prompt on its own line; AUTO with no level returns the question.
std::string render_prompt(std::string_view question, const PolicyConfig& cfg,
                          Level level = Level::None);

// A step-wise token source that can also be fed forced tokens.
class TokenSource {
 public:
  virtual ~TokenSource() = default;

  // Scores for the next position given everything accepted so far.
  virtual LogitVector next_logits() = 0;
  // Commits a sampled or forced token.
  virtual void accept(std::size_t token) = 0;
  virtual std::vector<std::size_t> encode(std::string_view text) const = 0;
  // Text for one token; empty for tokens that render to nothing.
  virtual std::string render(std::size_t token) const = 0;
};

struct PolicyRun {
  Trace trace;
  PolicyState state;
};

// Drives the source to completion under `cfg`: optional EOS scaling, sampling,
// policy_step, and applying the action. A suppressed proposal is resampled
// from the same position with that token masked. The end-of-thinking token is
// counted in neither segment; an emitted EOS counts as one token of the
// current phase. Generator exceptions are rethrown as GeneratorError carrying
// the step index.
PolicyRun run_policy(TokenSource& source, const PolicyConfig& cfg, Rng& rng,
                     std::optional<EosTemperature> eos_temp = std::nullopt);

}  // namespace lenctl
