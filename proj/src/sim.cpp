#include "lenctl/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "lenctl/errors.hpp"
#include "lenctl/rng.hpp"

namespace lenctl {

std::vector<std::size_t> LoopInject::block(std::size_t vocab_size) const {
  if (!repeat_block.empty()) return repeat_block;
  std::vector<std::size_t> out;
  const std::size_t body = vocab_size - kSimFirstBody;
  for (std::int64_t i = 0; i < period; ++i) {
    out.push_back(kSimFirstBody + static_cast<std::size_t>(i) % body);
  }
  return out;
}

void SimConfig::validate() const {
  if (vocab_size < 4) throw ValidationError("sim: vocab_size must be >= 4");
  if (max_steps <= 0) throw ValidationError("sim: max_steps must be positive");
  if (!std::isfinite(eos_logit) || !std::isfinite(body_logit) ||
      (end_think_logit && !std::isfinite(*end_think_logit))) {
    throw ValidationError("sim: logits must be finite");
  }
  if (!(correct_prob >= 0.0 && correct_prob <= 1.0)) throw ValidationError("sim: correct_prob must lie in [0, 1]");
  if (loop_inject) {
    const LoopInject& l = *loop_inject;
    if (l.start < 0 || l.repeats < 0 || l.period < 0) throw ValidationError("sim: loop fields must be >= 0");
    if (l.repeat_block.empty() && l.period == 0) throw ValidationError("sim: loop needs a block or a period");
    for (std::size_t t : l.repeat_block) {
      if (t < kSimFirstBody || t >= vocab_size) throw ValidationError("sim: loop block must use body tokens");
    }
    if (!(l.probability >= 0.0 && l.probability <= 1.0)) {
      throw ValidationError("sim: loop probability must lie in [0, 1]");
    }
  }
}

LogitVector sim_logits(const SimState& state, const SimConfig& cfg) {
  LogitVector out;
  out.scores.assign(cfg.vocab_size, cfg.body_logit);
  out.eos_index = kSimEos;
  out.end_think_index = kSimEndThink;
  out.scores[kSimEos] = cfg.eos_logit;
  out.scores[kSimEndThink] =
      (!state.in_solution && cfg.end_think_logit) ? *cfg.end_think_logit : kLogitFloor;
  out.scores[kSimWait] = kLogitFloor;

  if (state.loop_active && cfg.loop_inject && state.step >= cfg.loop_inject->start) {
    const auto block = cfg.loop_inject->block(cfg.vocab_size);
    const auto offset = static_cast<std::size_t>(state.step - cfg.loop_inject->start);
    const std::size_t limit = static_cast<std::size_t>(cfg.loop_inject->repeats) * block.size();
    if (cfg.loop_inject->repeats == 0 || offset < limit) {
      out.scores[block[offset % block.size()]] += kLoopBoost;
    }
  }
  return out;
}

double expected_length(double p_eos) {
  if (!(p_eos > 0.0) || p_eos > 1.0) throw ValidationError("expected_length: p must lie in (0, 1]");
  return 1.0 / p_eos;
}

SimSource::SimSource(const SimConfig& cfg, bool loop_active) : cfg_(cfg) {
  state_.loop_active = loop_active;
}

LogitVector SimSource::next_logits() {
  if (state_.step >= cfg_.max_steps) throw ValidationError("simulator stepped past max_steps");
  return sim_logits(state_, cfg_);
}

void SimSource::accept(std::size_t token) {
  if (token >= cfg_.vocab_size) throw ValidationError("simulator: token out of vocabulary");
  if (token == kSimEndThink && !state_.in_solution) {
    state_.in_solution = true;
    return;
  }
  ++state_.step;
}

std::vector<std::size_t> SimSource::encode(std::string_view text) const {
  std::vector<std::size_t> out;
  for (std::string_view word : whitespace_tokens(text)) {
    if (word == kDefaultDelimiter) {
      out.push_back(kSimEndThink);
      continue;
    }
    if (word.size() > 1 && word.front() == 't') {
      std::size_t id = 0;
      const auto* first = word.data() + 1;
      const auto* last = word.data() + word.size();
      auto [ptr, ec] = std::from_chars(first, last, id);
      if (ec == std::errc() && ptr == last && id >= kSimFirstBody && id < cfg_.vocab_size) {
        out.push_back(id);
        continue;
      }
    }
    out.push_back(kSimWait);
  }
  return out;
}

std::string SimSource::render(std::size_t token) const {
  if (token == kSimEos || token == kSimEndThink) return {};
  if (token == kSimWait) return "Wait";
  return "t" + std::to_string(token);
}

SimRun generate(const SimConfig& cfg, const PolicyConfig& policy,
                std::optional<EosTemperature> eos_temp) {
  cfg.validate();
  PolicyConfig capped = policy;
  capped.max_total = std::min(policy.max_total, cfg.max_steps);
  capped.validate();

  Rng rng(cfg.seed);
  bool loop = false;
  if (cfg.loop_inject) loop = rng.uniform() < cfg.loop_inject->probability;

  SimSource source(cfg, loop);
  PolicyRun run = run_policy(source, capped, rng, eos_temp);

  SimRun out;
  out.trace = std::move(run.trace);
  out.policy_state = run.state;
  out.loop_injected = loop;
  out.trace.id = "sim-" + std::to_string(cfg.seed);
  out.trace.prompt = render_prompt(cfg.prompt, capped);
  out.trace.model = cfg.model;
  out.trace.dataset = cfg.dataset;
  out.trace.correct = rng.uniform() < cfg.correct_prob;
  return out;
}

SimBatch simulate(const SimConfig& cfg, const PolicyConfig& policy, std::size_t runs,
                  std::optional<EosTemperature> eos_temp) {
  cfg.validate();
  SimBatch batch;
  batch.set.header.max_context = std::min(policy.max_total, cfg.max_steps);
  batch.set.header.tokenizer = "sim";
  batch.runs.reserve(runs);
  batch.set.traces.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    SimConfig run_cfg = cfg;
    run_cfg.seed = stream_seed(cfg.seed, i);
    SimRun r = generate(run_cfg, policy, eos_temp);
    r.trace.id = "run-" + std::to_string(i);
    batch.set.traces.push_back(r.trace);
    batch.runs.push_back(std::move(r));
  }
  return batch;
}

}  // namespace lenctl
