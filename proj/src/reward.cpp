#include "lenctl/reward.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <string>

#include "lenctl/errors.hpp"

namespace lenctl {

namespace {

std::size_t level_slot(Level level) {
  switch (level) {
    case Level::Short: return 0;
    case Level::Moderate: return 1;
    case Level::Long: return 2;
    case Level::None: break;
  }
  throw ValidationError("level NONE has no length threshold");
}

void check_length(std::int64_t length, const PenaltyConfig& cfg) {
  if (length < 0) throw ValidationError("length is negative");
  if (length > cfg.l_max) {
    throw ValidationError("length " + std::to_string(length) + " exceeds l_max " + std::to_string(cfg.l_max));
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PenaltyConfig::validate() const {
  if (l_max <= 0) throw ValidationError("penalty: l_max must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("penalty: alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("penalty: beta must be >= 0");
  for (const auto& f : level_fractions) {
    if (f.num < 0 || f.den <= 0 || f.num > f.den) {
      throw ValidationError("penalty: level fractions must lie in [0, 1]");
    }
  }
}

PenaltyConfig parse_penalty_config(std::istream& in, PenaltyConfig cfg) {
  auto parse_fraction = [](const std::string& v, std::size_t line) {
    Fraction f;
    try {
      const auto slash = v.find('/');
      std::size_t used = 0;
      if (slash == std::string::npos) {
        f.num = std::stoll(v, &used);
        f.den = 1;
        if (used != v.size()) throw std::invalid_argument(v);
      } else {
        const std::string n = trim(v.substr(0, slash));
        const std::string d = trim(v.substr(slash + 1));
        f.num = std::stoll(n, &used);
        if (used != n.size()) throw std::invalid_argument(v);
        f.den = std::stoll(d, &used);
        if (used != d.size()) throw std::invalid_argument(v);
      }
    } catch (const std::logic_error&) {
      throw ParseError(line, "bad fraction \"" + v + "\"");
    }
    return f;
  };
  auto parse_real = [](const std::string& v, std::size_t line) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::logic_error&) {
      throw ParseError(line, "bad number \"" + v + "\"");
    }
  };

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key == "alpha") {
      cfg.alpha = parse_real(value, line);
    } else if (key == "beta") {
      cfg.beta = parse_real(value, line);
    } else if (key == "l_max") {
      const Fraction f = parse_fraction(value, line);
      if (f.den != 1) throw ParseError(line, "l_max must be an integer");
      cfg.l_max = f.num;
    } else if (key == "short_fraction") {
      cfg.level_fractions[0] = parse_fraction(value, line);
    } else if (key == "moderate_fraction") {
      cfg.level_fractions[1] = parse_fraction(value, line);
    } else if (key == "long_fraction") {
      cfg.level_fractions[2] = parse_fraction(value, line);
    } else if (key == "length_basis") {
      if (value == "total") {
        cfg.basis = LengthBasis::Total;
      } else if (value == "thinking") {
        cfg.basis = LengthBasis::Thinking;
      } else {
        throw ParseError(line, "length_basis must be total or thinking");
      }
    } else {
      throw ParseError(line, "unknown key \"" + key + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

double base_reward(double r_acc, double r_format) {
  if (!(r_acc >= 0.0 && r_acc <= 1.0)) throw ValidationError("r_acc must lie in [0, 1]");
  if (!(r_format >= 0.0 && r_format <= 1.0)) throw ValidationError("r_format must lie in [0, 1]");
  return kAccuracyWeight * r_acc + kFormatWeight * r_format;
}

double sweet_spot_penalty(std::int64_t length, const PenaltyConfig& cfg) {
  cfg.validate();
  check_length(length, cfg);
  return cfg.alpha * static_cast<double>(length) / static_cast<double>(cfg.l_max);
}

std::int64_t level_threshold(Level level, const PenaltyConfig& cfg) {
  const Fraction& f = cfg.level_fractions[level_slot(level)];
  return cfg.l_max * f.num / f.den;
}

double multilevel_penalty(Level level, std::int64_t length, bool correct, const PenaltyConfig& cfg) {
  cfg.validate();
  check_length(length, cfg);
  const std::int64_t threshold = level_threshold(level, cfg);
  if (!correct) return sweet_spot_penalty(length, cfg);
  return length <= threshold ? 0.0 : cfg.beta;
}

std::vector<double> group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.size() < 2) throw ValidationError("group_advantages: need at least two rewards");
  if (!(epsilon >= 0.0)) throw ValidationError("group_advantages: epsilon must be >= 0");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw ValidationError("group_advantages: non-finite reward");
  }
  std::vector<double> out(rewards.size(), 0.0);
  bool constant = true;
  for (double r : rewards) constant = constant && r == rewards.front();
  if (constant) return out;

  // Welford.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double r : rewards) {
    ++n;
    const double delta = r - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (r - mean);
  }
  const double stddev = std::sqrt(m2 / static_cast<double>(n));
  const double denom = stddev + epsilon;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

std::string_view level_prompt(Level level) {
  switch (level) {
    case Level::Long: return "[Response Length: LONG] Provide a detailed step-by-step solution.";
    case Level::Moderate: return "[Response Length: MODERATE] Provide a concise but clear solution.";
    case Level::Short: return "[Response Length: SHORT] Provide only the essential steps.";
    case Level::None: break;
  }
  return {};
}

RewardRecord score_trace(const Trace& trace, Level level, const PenaltyConfig& cfg) {
  RewardRecord rec;
  rec.id = trace.id;
  rec.level = level;
  rec.correct = trace.correct;
  rec.length = cfg.basis == LengthBasis::Total ? trace.total_len : trace.thinking_len;
  rec.r_acc = trace.correct ? 1.0 : 0.0;
  rec.r_format = (trace.solution_len > 0 && !trace.truncated) ? 1.0 : 0.0;
  rec.r_hat = base_reward(rec.r_acc, rec.r_format);
  rec.penalty = level == Level::None ? sweet_spot_penalty(rec.length, cfg)
                                     : multilevel_penalty(level, rec.length, trace.correct, cfg);
  rec.r_total = total_reward(rec.r_hat, rec.penalty);
  return rec;
}

std::vector<RewardRecord> score_traces(const TraceSet& set, const PenaltyConfig& cfg,
                                       std::optional<Level> level_override, double epsilon) {
  std::vector<RewardRecord> out;
  out.reserve(set.traces.size());
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < set.traces.size(); ++i) {
    const Trace& t = set.traces[i];
    try {
      out.push_back(score_trace(t, level_override.value_or(t.level), cfg));
    } catch (const ValidationError& e) {
      throw ValidationError("trace '" + t.id + "': " + e.what());
    }
    groups[t.prompt].push_back(i);
  }
  for (const auto& [prompt, members] : groups) {
    if (members.size() < 2) continue;
    std::vector<double> rewards;
    rewards.reserve(members.size());
    for (std::size_t i : members) rewards.push_back(out[i].r_total);
    const auto adv = group_advantages(rewards, epsilon);
    for (std::size_t k = 0; k < members.size(); ++k) out[members[k]].advantage = adv[k];
  }
  return out;
}

}  // namespace lenctl
