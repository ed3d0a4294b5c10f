#include "lenctl/cli.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lenctl/analytics.hpp"
#include "lenctl/csv.hpp"
#include "lenctl/errors.hpp"
#include "lenctl/fixtures.hpp"
#include "lenctl/policy.hpp"
#include "lenctl/reward.hpp"
#include "lenctl/sim.hpp"
#include "lenctl/trace.hpp"

namespace lenctl::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kCsvVersion = "1";

// Raised for flag combinations CLI11 cannot express; maps to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateArgs {
  std::string policy = "auto";
  std::int64_t budget = 0;
  std::int64_t target = 0;
  std::int64_t hint = 0;
  std::int64_t max_total = 4096;
  std::int64_t min_thinking = 0;
  std::string wait_text = "Wait";
  std::int64_t max_waits = 4;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  std::size_t vocab = 16;
  double eos_logit = 0.0;
  double end_think_logit = 0.0;
  double body_logit = 0.0;
  double eos_temp = 1.0;
  std::string loop;
  double loop_prob = 1.0;
  double correct_prob = 0.0;
  std::int64_t max_steps = 4096;
  std::string out;
};

struct RewardArgs {
  std::string input;
  std::string config;
  double alpha = 0.1;
  double beta = 0.3;
  std::int64_t lmax = 4096;
  std::string level;
  std::string basis = "total";
  double epsilon = kDefaultAdvantageEpsilon;
  std::string format = "csv";
};

struct AnalyzeArgs {
  std::string input;
  std::size_t repeat_min = kDefaultRepeatMinBlock;
  std::size_t repeat_k = kDefaultRepeatK;
  std::int64_t bin_width = kDefaultBinWidth;
  std::string csv_path;
};

struct ParetoArgs {
  std::string input;
  std::string format = "csv";
};

struct FixtureArgs {
  std::string name;
  std::string format = "csv";
};

bool given(const CLI::App* app, const std::string& flag) { return app->count(flag) > 0; }

std::string env_name(const std::string& long_name) {
  std::string out = "LENCTL_";
  for (char c : long_name) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

// Every named option can also be set through LENCTL_<NAME> (dashes become
// underscores), e.g. LENCTL_SEED=7.
void add_env_overrides(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    const auto& lnames = opt->get_lnames();
    if (lnames.empty() || lnames.front() == "help") continue;
    opt->envname(env_name(lnames.front()));
  }
}

std::ostream& open_output(const std::string& path, std::unique_ptr<std::ofstream>& holder, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  holder = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*holder) throw Error("cannot write " + path);
  return *holder;
}

LoopInject parse_loop(const std::string& text) {
  LoopInject loop;
  std::stringstream ss(text);
  std::string part;
  std::vector<std::int64_t> values;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoll(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw UsageError("--loop expects START:LEN:REPEATS, got \"" + text + "\"");
    }
  }
  if (values.size() != 3) throw UsageError("--loop expects START:LEN:REPEATS, got \"" + text + "\"");
  loop.start = values[0];
  loop.period = values[1];
  loop.repeats = values[2];
  return loop;
}

int do_simulate(const SimulateArgs& a, const CLI::App* sub, std::ostream& out) {
  PolicyConfig policy;
  policy.kind = *parse_policy_kind(a.policy);
  const auto reject = [&](const char* flag, const char* why) {
    if (given(sub, flag)) throw UsageError(std::string(flag) + " " + why);
  };
  if (policy.kind != PolicyKind::ExactControl) reject("--target", "applies to --policy ec only");
  if (policy.kind != PolicyKind::BudgetForcing && policy.kind != PolicyKind::PromptControl) {
    reject("--budget", "applies to --policy bf or pc only");
  }
  if (policy.kind != PolicyKind::PromptControl) reject("--hint", "applies to --policy pc only");
  if (policy.kind != PolicyKind::BudgetForcing) reject("--min-thinking", "applies to --policy bf only");
  if (!given(sub, "--loop")) reject("--loop-prob", "requires --loop");

  policy.thinking_budget = a.budget;
  policy.thinking_target = a.target;
  policy.prompt_token_hint = given(sub, "--hint") ? a.hint : a.budget;
  policy.max_total = a.max_total;
  if (given(sub, "--min-thinking")) policy.min_thinking = a.min_thinking;
  policy.wait_text = a.wait_text;
  policy.max_wait_appends = a.max_waits;

  SimConfig sim;
  sim.vocab_size = a.vocab;
  sim.eos_logit = a.eos_logit;
  if (given(sub, "--end-think-logit")) sim.end_think_logit = a.end_think_logit;
  sim.body_logit = a.body_logit;
  sim.seed = a.seed;
  sim.max_steps = a.max_steps;
  sim.correct_prob = a.correct_prob;
  if (given(sub, "--loop")) {
    sim.loop_inject = parse_loop(a.loop);
    sim.loop_inject->probability = a.loop_prob;
  }

  std::optional<EosTemperature> temp;
  try {
    policy.validate();
    sim.validate();
    if (given(sub, "--eos-temp")) temp = EosTemperature(a.eos_temp);
    PolicyConfig capped = policy;
    capped.max_total = std::min(policy.max_total, sim.max_steps);
    capped.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }

  const SimBatch batch = simulate(sim, policy, a.runs, temp);
  std::unique_ptr<std::ofstream> file;
  std::ostream& dest = open_output(a.out, file, out);
  write_traces(dest, batch.set);
  dest.flush();
  if (!dest) throw Error("failed writing trace output");
  return kExitOk;
}

int do_reward(const RewardArgs& a, const CLI::App* sub, std::ostream& out) {
  PenaltyConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw Error("cannot open config " + a.config);
    cfg = parse_penalty_config(in);
  }
  if (given(sub, "--alpha") || a.config.empty()) cfg.alpha = a.alpha;
  if (given(sub, "--beta") || a.config.empty()) cfg.beta = a.beta;
  if (given(sub, "--lmax") || a.config.empty()) cfg.l_max = a.lmax;
  if (given(sub, "--basis") || a.config.empty()) {
    cfg.basis = a.basis == "thinking" ? LengthBasis::Thinking : LengthBasis::Total;
  }
  std::optional<Level> level;
  if (!a.level.empty()) level = parse_level(a.level);
  try {
    cfg.validate();
    if (!(a.epsilon >= 0.0)) throw ValidationError("--epsilon must be >= 0");
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }

  const TraceSet set = load_traces(a.input);
  const auto records = score_traces(set, cfg, level, a.epsilon);

  if (a.format == "json") {
    Json arr = Json::array();
    for (const auto& r : records) {
      Json j;
      j["id"] = r.id;
      j["r_acc"] = r.r_acc;
      j["r_format"] = r.r_format;
      j["r_hat"] = r.r_hat;
      j["penalty"] = r.penalty;
      j["r_total"] = r.r_total;
      j["length"] = r.length;
      j["level"] = std::string(to_string(r.level));
      j["correct"] = r.correct;
      j["advantage"] = r.advantage;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
    return kExitOk;
  }
  csv::write_row(out, {"id", "level", "correct", "length", "r_acc", "r_format", "r_hat", "penalty", "r_total",
                       "advantage", "format_version"});
  for (const auto& r : records) {
    csv::write_row(out, {r.id, std::string(to_string(r.level)), r.correct ? "true" : "false",
                         std::to_string(r.length), csv::format_number(r.r_acc), csv::format_number(r.r_format),
                         csv::format_number(r.r_hat), csv::format_number(r.penalty),
                         csv::format_number(r.r_total), csv::format_number(r.advantage), kCsvVersion});
  }
  return kExitOk;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
  if (a.repeat_min == 0 || a.repeat_k < 2) throw UsageError("--repeat-min must be >= 1 and --repeat-k >= 2");
  if (a.bin_width <= 0) throw UsageError("--bin-width must be positive");
  const TraceSet set = load_traces(a.input);
  if (set.traces.empty()) throw ValidationError("trace file has no traces");

  const LengthStats stats = length_stats(set, a.bin_width);
  Json report;
  report["schema_version"] = set.header.schema_version;
  report["tokenizer"] = set.header.tokenizer;
  report["max_context"] = set.header.max_context;
  report["n_traces"] = set.traces.size();

  Json ls;
  ls["n"] = stats.n;
  ls["n_correct"] = stats.n_correct;
  ls["n_wrong"] = stats.n_wrong;
  ls["mean_all"] = stats.mean_all;
  ls["mean_correct"] = optional_number(stats.mean_correct);
  ls["mean_wrong"] = optional_number(stats.mean_wrong);
  ls["bin_width"] = stats.bin_width;
  ls["histogram"] = stats.histogram;
  report["length_stats"] = std::move(ls);

  Json per_trace = Json::array();
  std::size_t wrong = 0;
  std::size_t flagged = 0;
  std::size_t zero_solution = 0;
  std::size_t total_steps = 0;
  double ratio_sum = 0.0;
  std::unique_ptr<std::ofstream> csv_file;
  if (!a.csv_path.empty()) {
    csv_file = std::make_unique<std::ofstream>(a.csv_path, std::ios::binary);
    if (!*csv_file) throw Error("cannot write " + a.csv_path);
    csv::write_row(*csv_file, {"id", "correct", "thinking_len", "solution_len", "total_len", "repetitive",
                               "occurrences", "block_tokens", "think_solution_ratio", "zero_solution", "steps",
                               "format_version"});
  }
  for (const auto& t : set.traces) {
    const RepeatVerdict v = detect_repetition(t, a.repeat_min, a.repeat_k);
    const ThinkSolutionRatio ratio = think_solution_ratio(t);
    const std::size_t steps = count_steps(t.thinking_text) + count_steps(t.solution_text);
    if (!t.correct) {
      ++wrong;
      if (v.repetitive) ++flagged;
    }
    zero_solution += ratio.zero_solution ? 1 : 0;
    ratio_sum += ratio.ratio;
    total_steps += steps;

    Json j;
    j["id"] = t.id;
    j["correct"] = t.correct;
    j["total_len"] = t.total_len;
    j["repetitive"] = v.repetitive;
    j["occurrences"] = v.evidence ? v.evidence->occurrences : 0;
    j["block_tokens"] = v.evidence ? v.evidence->block_tokens : 0;
    if (v.evidence) {
      std::ostringstream hex;
      hex << std::hex << v.evidence->block_hash;
      j["block_hash"] = hex.str();
    } else {
      j["block_hash"] = nullptr;
    }
    j["think_solution_ratio"] = ratio.ratio;
    j["zero_solution"] = ratio.zero_solution;
    j["steps"] = steps;
    per_trace.push_back(std::move(j));

    if (csv_file) {
      csv::write_row(*csv_file,
                     {t.id, t.correct ? "true" : "false", std::to_string(t.thinking_len),
                      std::to_string(t.solution_len), std::to_string(t.total_len), v.repetitive ? "true" : "false",
                      std::to_string(v.evidence ? v.evidence->occurrences : 0),
                      std::to_string(v.evidence ? v.evidence->block_tokens : 0), csv::format_number(ratio.ratio),
                      ratio.zero_solution ? "true" : "false", std::to_string(steps), kCsvVersion});
    }
  }

  Json rep;
  rep["min_block_tokens"] = a.repeat_min;
  rep["k"] = a.repeat_k;
  rep["wrong"] = wrong;
  rep["flagged"] = flagged;
  rep["rate"] = wrong == 0 ? Json(nullptr) : Json(static_cast<double>(flagged) / static_cast<double>(wrong));
  report["repeat"] = std::move(rep);

  const double n = static_cast<double>(set.traces.size());
  report["think_solution"] = {{"mean_ratio", ratio_sum / n}, {"zero_solution_count", zero_solution}};
  report["steps"] = {{"total", total_steps}, {"mean", static_cast<double>(total_steps) / n}};
  report["traces"] = std::move(per_trace);
  out << report.dump(2) << '\n';
  return kExitOk;
}

void points_json(std::ostream& out, const std::vector<ParetoPoint>& points) {
  Json arr = Json::array();
  for (const auto& p : points) arr.push_back({{"label", p.label}, {"accuracy", p.accuracy}, {"mean_length", p.mean_length}});
  out << arr.dump(2) << '\n';
}

int do_pareto(const ParetoArgs& a, std::ostream& out) {
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw Error("cannot open " + a.input);
  const auto points = read_points(in);
  const auto front = pareto_front(points);
  if (a.format == "json") {
    points_json(out, front);
  } else {
    write_points_csv(out, front);
  }
  return kExitOk;
}

int do_fixtures_list(std::ostream& out) {
  for (const auto& f : fixtures()) {
    out << f.name << '\t' << f.rows.size() << " rows\t" << f.source << '\t' << f.description << '\n';
  }
  return kExitOk;
}

int do_fixtures_dump(const FixtureArgs& a, std::ostream& out) {
  const Fixture& f = find_fixture(a.name);
  if (a.format == "json") {
    Json j;
    j["name"] = f.name;
    j["description"] = f.description;
    j["source"] = f.source;
    j["provenance"] = std::string(kFixtureProvenance);
    Json rows = Json::array();
    for (const auto& r : f.rows) {
      rows.push_back({{"model", r.model},
                      {"condition", r.condition},
                      {"accuracy", r.accuracy},
                      {"mean_length", r.mean_length},
                      {"citation", r.citation}});
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << '\n';
  } else {
    write_fixture_csv(out, f);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Length-control toolkit for reasoning-model traces: simulate, reward, analyze, pareto, fixtures",
               "lenctl"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run stopping policies over the token simulator; writes a trace file");
  simulate_cmd->add_option("--policy", sim.policy, "Stopping policy")->check(CLI::IsMember({"bf", "ec", "pc", "auto"}))->capture_default_str();
  simulate_cmd->add_option("--budget", sim.budget, "Thinking budget for bf; token hint for pc (tokens)");
  simulate_cmd->add_option("--target", sim.target, "Exact thinking length for ec (tokens)");
  simulate_cmd->add_option("--hint", sim.hint, "n in \"Think for up to n tokens.\" for pc (tokens)");
  simulate_cmd->add_option("--max-total", sim.max_total, "Cap on thinking + solution (tokens)")->capture_default_str();
  simulate_cmd->add_option("--min-thinking", sim.min_thinking, "bf: append the wait text before this many thinking tokens (tokens)");
  simulate_cmd->add_option("--wait-text", sim.wait_text, "Text forced in when waiting (string)")->capture_default_str();
  simulate_cmd->add_option("--max-waits", sim.max_waits, "Cap on wait appends per run (count)")->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed, "Base seed (64-bit integer)")->capture_default_str();
  simulate_cmd->add_option("--runs", sim.runs, "Number of runs (count)")->capture_default_str();
  simulate_cmd->add_option("--vocab", sim.vocab, "Vocabulary size, >= 4 (count)")->capture_default_str();
  simulate_cmd->add_option("--eos-logit", sim.eos_logit, "EOS logit (real)")->capture_default_str();
  simulate_cmd->add_option("--end-think-logit", sim.end_think_logit, "End-of-thinking logit; omitted = never proposed (real)");
  simulate_cmd->add_option("--body-logit", sim.body_logit, "Logit shared by body tokens (real)")->capture_default_str();
  simulate_cmd->add_option("--eos-temp", sim.eos_temp, "Divide the EOS logit by this temperature, > 0 (real)");
  simulate_cmd->add_option("--loop", sim.loop, "Inject a repetition loop START:LEN:REPEATS (tokens:tokens:count; REPEATS 0 = unbounded)");
  simulate_cmd->add_option("--loop-prob", sim.loop_prob, "Chance each run gets the loop (probability)")->capture_default_str();
  simulate_cmd->add_option("--correct-prob", sim.correct_prob, "Chance a trace is marked correct (probability)")->capture_default_str();
  simulate_cmd->add_option("--max-steps", sim.max_steps, "Simulator step limit (tokens)")->capture_default_str();
  simulate_cmd->add_option("--out,-o", sim.out, "Output trace file (path; default stdout)");
  add_env_overrides(simulate_cmd);

  RewardArgs rew;
  auto* reward_cmd = app.add_subcommand("reward", "Score traces with the length-penalized reward and GRPO advantages");
  reward_cmd->add_option("traces", rew.input, "Trace file (path)")->required();
  reward_cmd->add_option("--config", rew.config, "Penalty config file of key = value lines (path)");
  reward_cmd->add_option("--alpha", rew.alpha, "Linear length-penalty strength (real)")->capture_default_str();
  reward_cmd->add_option("--beta", rew.beta, "Penalty for correct answers over the level threshold (real)")->capture_default_str();
  reward_cmd->add_option("--lmax", rew.lmax, "Maximum response length (tokens)")->capture_default_str();
  reward_cmd->add_option("--level", rew.level, "Override every trace's level")->check(CLI::IsMember({"short", "moderate", "long", "none", "SHORT", "MODERATE", "LONG", "NONE"}));
  reward_cmd->add_option("--basis", rew.basis, "Length used for penalties")->check(CLI::IsMember({"total", "thinking"}))->capture_default_str();
  reward_cmd->add_option("--epsilon", rew.epsilon, "Advantage denominator offset (real)")->capture_default_str();
  reward_cmd->add_option("--format", rew.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_env_overrides(reward_cmd);

  AnalyzeArgs ana;
  auto* analyze_cmd = app.add_subcommand("analyze", "Length, repetition, ratio and step statistics for a trace file (JSON)");
  analyze_cmd->add_option("traces", ana.input, "Trace file (path)")->required();
  analyze_cmd->add_option("--repeat-min", ana.repeat_min, "Minimum repeated block length (tokens)")->capture_default_str();
  analyze_cmd->add_option("--repeat-k", ana.repeat_k, "Occurrences that make a block repetitive (count)")->capture_default_str();
  analyze_cmd->add_option("--bin-width", ana.bin_width, "Histogram bin width (tokens)")->capture_default_str();
  analyze_cmd->add_option("--csv", ana.csv_path, "Also write per-trace rows as CSV (path)");
  add_env_overrides(analyze_cmd);

  ParetoArgs par;
  auto* pareto_cmd = app.add_subcommand("pareto", "Extract the accuracy/length pareto front from a points CSV");
  pareto_cmd->add_option("points", par.input, "CSV with label, accuracy (percent), mean_length (tokens) columns (path)")->required();
  pareto_cmd->add_option("--format", par.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_env_overrides(pareto_cmd);

  FixtureArgs fix;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "Inspect the embedded published-result tables");
  fixtures_cmd->require_subcommand(1);
  auto* list_cmd = fixtures_cmd->add_subcommand("list", "List fixture names");
  auto* dump_cmd = fixtures_cmd->add_subcommand("dump", "Print one fixture with citations");
  dump_cmd->add_option("name", fix.name, "Fixture name")->required();
  dump_cmd->add_option("--format", fix.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_env_overrides(dump_cmd);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("lenctl");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate_cmd->parsed()) return do_simulate(sim, simulate_cmd, out);
    if (reward_cmd->parsed()) return do_reward(rew, reward_cmd, out);
    if (analyze_cmd->parsed()) return do_analyze(ana, out);
    if (pareto_cmd->parsed()) return do_pareto(par, out);
    if (list_cmd->parsed()) return do_fixtures_list(out);
    if (dump_cmd->parsed()) return do_fixtures_dump(fix, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnknownFixtureError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lenctl::cli
