#include "lenctl/policy.hpp"

#include <algorithm>
#include <exception>

#include "lenctl/errors.hpp"
#include "lenctl/reward.hpp"

namespace lenctl {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::BudgetForcing: return "bf";
    case PolicyKind::ExactControl: return "ec";
    case PolicyKind::PromptControl: return "pc";
    case PolicyKind::Auto: return "auto";
  }
  return "auto";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text) {
  if (text == "bf") return PolicyKind::BudgetForcing;
  if (text == "ec") return PolicyKind::ExactControl;
  if (text == "pc") return PolicyKind::PromptControl;
  if (text == "auto") return PolicyKind::Auto;
  return std::nullopt;
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Emit: return "EMIT";
    case ActionKind::SuppressAndContinue: return "SUPPRESS_AND_CONTINUE";
    case ActionKind::ForceEndThink: return "FORCE_END_THINK";
    case ActionKind::AppendWait: return "APPEND_WAIT";
    case ActionKind::Stop: return "STOP";
  }
  return "EMIT";
}

void PolicyConfig::validate() const {
  if (max_total <= 0) throw ValidationError("policy: max_total must be positive");
  if (max_wait_appends < 0) throw ValidationError("policy: max_wait_appends must be >= 0");
  switch (kind) {
    case PolicyKind::BudgetForcing:
      if (thinking_budget <= 0) throw ValidationError("policy bf: thinking budget must be positive");
      if (max_total < thinking_budget) throw ValidationError("policy bf: max_total must be >= budget");
      if (min_thinking) {
        if (*min_thinking <= 0 || *min_thinking > thinking_budget) {
          throw ValidationError("policy bf: min_thinking must be in (0, budget]");
        }
        if (wait_text.find_first_not_of(" \t\r\n") == std::string::npos) {
          throw ValidationError("policy bf: wait_text must contain a token");
        }
      }
      break;
    case PolicyKind::ExactControl:
      if (thinking_target <= 0) throw ValidationError("policy ec: thinking target must be positive");
      if (thinking_target >= max_total) {
        throw ValidationError("policy ec: thinking target must be < max_total");
      }
      break;
    case PolicyKind::PromptControl:
      if (prompt_token_hint <= 0) throw ValidationError("policy pc: token hint must be positive");
      break;
    case PolicyKind::Auto:
      break;
  }
  if (min_thinking && kind != PolicyKind::BudgetForcing) {
    throw ValidationError("policy: min_thinking applies to budget forcing only");
  }
}

namespace {

void check_state(const PolicyState& s, const PolicyConfig& cfg) {
  if (s.phase == Phase::Done) throw StateError("policy_step called after DONE");
  if (s.thinking_emitted < 0 || s.solution_emitted < 0) throw StateError("negative token counts");
  if (s.phase == Phase::Thinking && s.solution_emitted > 0) {
    throw StateError("solution tokens emitted while still THINKING");
  }
  if (s.total() > cfg.max_total) throw StateError("total exceeds max_total");
  if (cfg.kind == PolicyKind::BudgetForcing && s.thinking_emitted > cfg.thinking_budget) {
    throw StateError("thinking exceeds budget");
  }
  if (cfg.kind == PolicyKind::ExactControl && s.thinking_emitted > cfg.thinking_target) {
    throw StateError("thinking exceeds target");
  }
}

}  // namespace

Action policy_step(const PolicyState& state, const PolicyConfig& cfg, std::size_t proposed,
                   const LogitVector& logits) {
  check_state(state, cfg);
  if ((cfg.kind == PolicyKind::BudgetForcing || cfg.kind == PolicyKind::ExactControl) &&
      !logits.end_think_index) {
    throw ValidationError("policy: bf/ec need logits with an end-of-thinking index");
  }
  if (state.total() >= cfg.max_total) return {ActionKind::Stop, 0};
  if (state.phase == Phase::Solution) return {ActionKind::Emit, proposed};

  const bool is_end_think = logits.end_think_index && proposed == *logits.end_think_index;
  const bool is_eos = proposed == logits.eos_index;

  switch (cfg.kind) {
    case PolicyKind::BudgetForcing:
      if (state.thinking_emitted >= cfg.thinking_budget && !is_end_think) {
        return {ActionKind::ForceEndThink, 0};
      }
      if (cfg.min_thinking && state.thinking_emitted < *cfg.min_thinking &&
          (is_end_think || is_eos) && state.wait_appends < cfg.max_wait_appends) {
        return {ActionKind::AppendWait, 0};
      }
      break;
    case PolicyKind::ExactControl:
      if (state.thinking_emitted >= cfg.thinking_target && !is_end_think) {
        return {ActionKind::ForceEndThink, 0};
      }
      if (state.thinking_emitted < cfg.thinking_target && (is_end_think || is_eos)) {
        return {ActionKind::SuppressAndContinue, 0};
      }
      break;
    case PolicyKind::PromptControl:
    case PolicyKind::Auto:
      break;
  }
  return {ActionKind::Emit, proposed};
}

std::string render_prompt(std::string_view question, const PolicyConfig& cfg, Level level) {
  std::string out;
  if (level != Level::None) {
    out += level_prompt(level);
    out += '\n';
  }
  out += question;
  if (cfg.kind == PolicyKind::PromptControl) {
    out += " Think for up to " + std::to_string(cfg.prompt_token_hint) + " tokens.";
  }
  return out;
}

namespace {

class TraceBuilder {
 public:
  void add(Phase phase, const std::string& text) {
    if (text.empty()) return;
    std::string& target = phase == Phase::Thinking ? thinking_ : solution_;
    if (!target.empty()) target += ' ';
    target += text;
  }
  std::string& thinking() { return thinking_; }
  std::string& solution() { return solution_; }

 private:
  std::string thinking_;
  std::string solution_;
};

}  // namespace

PolicyRun run_policy(TokenSource& source, const PolicyConfig& cfg, Rng& rng,
                     std::optional<EosTemperature> eos_temp) {
  cfg.validate();
  PolicyState state;
  TraceBuilder text;
  std::size_t step = 0;
  bool truncated = false;

  auto guarded = [&step](auto&& fn) {
    try {
      return fn();
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw GeneratorError(step, e.what());
    }
  };

  auto accept_content = [&](std::size_t token) {
    guarded([&] { source.accept(token); });
    text.add(state.phase, source.render(token));
    if (state.phase == Phase::Thinking) {
      ++state.thinking_emitted;
    } else {
      ++state.solution_emitted;
    }
  };

  auto end_thinking = [&](std::size_t end_token) {
    guarded([&] { source.accept(end_token); });
    state.phase = Phase::Solution;
  };

  while (state.phase != Phase::Done) {
    // Out of room: stop without asking the source for another position.
    if (state.total() >= cfg.max_total) {
      truncated = true;
      state.phase = Phase::Done;
      break;
    }
    LogitVector logits;
    try {
      logits = guarded([&] { return source.next_logits(); });
      if (eos_temp) logits = scale_eos(logits, *eos_temp);
      logits.validate();
    } catch (const GeneratorError&) {
      throw;
    } catch (const Error& e) {
      throw GeneratorError(step, e.what());
    }

    Action action;
    for (;;) {
      const std::size_t proposed = sample_token(softmax(logits), rng);
      action = policy_step(state, cfg, proposed, logits);
      if (action.kind != ActionKind::SuppressAndContinue) break;
      ++state.suppressed_end_think_count;
      logits.scores[proposed] = kLogitFloor;
    }

    switch (action.kind) {
      case ActionKind::Stop:
        truncated = true;
        state.phase = Phase::Done;
        break;
      case ActionKind::ForceEndThink:
        state.forced_end_think = true;
        end_thinking(*logits.end_think_index);
        break;
      case ActionKind::AppendWait: {
        ++state.wait_appends;
        const auto forced = source.encode(cfg.wait_text);
        std::int64_t room = cfg.max_total - state.total();
        if (cfg.kind == PolicyKind::BudgetForcing) {
          room = std::min(room, cfg.thinking_budget - state.thinking_emitted);
        }
        const auto n = std::min<std::int64_t>(room, static_cast<std::int64_t>(forced.size()));
        for (std::int64_t i = 0; i < n; ++i) accept_content(forced[static_cast<std::size_t>(i)]);
        break;
      }
      case ActionKind::Emit: {
        const std::size_t tok = action.token;
        if (state.phase == Phase::Thinking && logits.end_think_index && tok == *logits.end_think_index) {
          end_thinking(tok);
        } else {
          accept_content(tok);
          if (tok == logits.eos_index) state.phase = Phase::Done;
        }
        break;
      }
      case ActionKind::SuppressAndContinue:
        break;
    }
    ++step;
  }

  PolicyRun run;
  run.state = state;
  run.trace.thinking_text = std::move(text.thinking());
  run.trace.solution_text = std::move(text.solution());
  run.trace.thinking_len = state.thinking_emitted;
  run.trace.solution_len = state.solution_emitted;
  run.trace.total_len = state.total();
  run.trace.truncated = truncated;
  return run;
}

}  // namespace lenctl
