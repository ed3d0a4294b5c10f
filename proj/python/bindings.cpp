#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lenctl/analytics.hpp"
#include "lenctl/cli.hpp"
#include "lenctl/errors.hpp"
#include "lenctl/fixtures.hpp"
#include "lenctl/logits.hpp"
#include "lenctl/policy.hpp"
#include "lenctl/reward.hpp"
#include "lenctl/sim.hpp"
#include "lenctl/trace.hpp"

namespace py = pybind11;
using namespace lenctl;

namespace {

void bind_errors(py::module_& m) {
  // Translators are tried newest first, so bases are registered before the
  // types derived from them.
  const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  const auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<StateError>(m, "StateError", base.ptr());
  py::register_exception<GeneratorError>(m, "GeneratorError", base.ptr());
  py::register_exception<UndefinedRateError>(m, "UndefinedRateError", validation.ptr());
  py::register_exception<UnknownFixtureError>(m, "UnknownFixtureError", validation.ptr());
}

void bind_trace(py::module_& m) {
  py::enum_<Level>(m, "Level")
      .value("SHORT", Level::Short)
      .value("MODERATE", Level::Moderate)
      .value("LONG", Level::Long)
      .value("NONE", Level::None);

  py::class_<Trace>(m, "Trace")
      .def(py::init<>())
      .def_readwrite("id", &Trace::id)
      .def_readwrite("prompt", &Trace::prompt)
      .def_readwrite("level", &Trace::level)
      .def_readwrite("thinking_text", &Trace::thinking_text)
      .def_readwrite("solution_text", &Trace::solution_text)
      .def_readwrite("thinking_len", &Trace::thinking_len)
      .def_readwrite("solution_len", &Trace::solution_len)
      .def_readwrite("total_len", &Trace::total_len)
      .def_readwrite("correct", &Trace::correct)
      .def_readwrite("truncated", &Trace::truncated)
      .def_readwrite("model", &Trace::model)
      .def_readwrite("dataset", &Trace::dataset)
      .def("to_json", &trace_to_json_line)
      .def("__repr__", [](const Trace& t) {
        return "<Trace " + t.id + " total_len=" + std::to_string(t.total_len) + ">";
      });

  py::class_<TraceSet>(m, "TraceSet")
      .def(py::init<>())
      .def_property(
          "max_context", [](const TraceSet& s) { return s.header.max_context; },
          [](TraceSet& s, std::int64_t v) { s.header.max_context = v; })
      .def_property(
          "tokenizer", [](const TraceSet& s) { return s.header.tokenizer; },
          [](TraceSet& s, std::string v) { s.header.tokenizer = std::move(v); })
      .def_property_readonly("schema_version", [](const TraceSet& s) { return s.header.schema_version; })
      .def_readwrite("traces", &TraceSet::traces)
      .def("__len__", [](const TraceSet& s) { return s.traces.size(); })
      .def("dumps", [](const TraceSet& s) {
        std::ostringstream out;
        write_traces(out, s);
        return out.str();
      });

  m.def("load_traces", [](const std::string& path, const std::string& schema_version) {
    return load_traces(path, schema_version);
  }, py::arg("path"), py::arg("schema_version") = std::string(kTraceSchemaVersion));
  m.def("loads_traces", [](const std::string& text) {
    std::istringstream in(text);
    return parse_traces(in);
  }, py::arg("text"));
  m.def("save_traces", [](const std::string& path, const TraceSet& s) { save_traces(path, s); });
  m.def("split_thinking", [](const std::string& text, const std::string& delimiter) {
    auto s = split_thinking(text, delimiter);
    return py::make_tuple(s.thinking, s.solution, s.delimiter_found);
  }, py::arg("text"), py::arg("delimiter") = std::string(kDefaultDelimiter));
}

void bind_logits(py::module_& m) {
  py::class_<LogitVector>(m, "LogitVector")
      .def(py::init([](std::vector<double> scores, std::size_t eos_index, std::optional<std::size_t> end_think) {
             LogitVector l{std::move(scores), eos_index, end_think};
             l.validate();
             return l;
           }),
           py::arg("scores"), py::arg("eos_index"), py::arg("end_think_index") = py::none())
      .def_readonly("scores", &LogitVector::scores)
      .def_readonly("eos_index", &LogitVector::eos_index)
      .def_readonly("end_think_index", &LogitVector::end_think_index);

  m.def("scale_eos", [](const LogitVector& l, double t) { return scale_eos(l, EosTemperature(t)); },
        py::arg("logits"), py::arg("temperature"));
  m.def("softmax", [](const std::vector<double>& s) { return softmax(s); }, py::arg("scores"));
  m.def("sample_token", [](const std::vector<double>& probs, std::uint64_t seed) {
    Rng rng(seed);
    return sample_token(probs, rng);
  }, py::arg("probs"), py::arg("seed"));
  m.def("eos_rank", &eos_rank);
}

void bind_policy(py::module_& m) {
  py::enum_<PolicyKind>(m, "PolicyKind")
      .value("BUDGET_FORCING", PolicyKind::BudgetForcing)
      .value("EXACT_CONTROL", PolicyKind::ExactControl)
      .value("PROMPT_CONTROL", PolicyKind::PromptControl)
      .value("AUTO", PolicyKind::Auto);

  py::class_<PolicyConfig>(m, "PolicyConfig")
      .def(py::init<>())
      .def_readwrite("kind", &PolicyConfig::kind)
      .def_readwrite("thinking_budget", &PolicyConfig::thinking_budget)
      .def_readwrite("thinking_target", &PolicyConfig::thinking_target)
      .def_readwrite("prompt_token_hint", &PolicyConfig::prompt_token_hint)
      .def_readwrite("max_total", &PolicyConfig::max_total)
      .def_readwrite("min_thinking", &PolicyConfig::min_thinking)
      .def_readwrite("wait_text", &PolicyConfig::wait_text)
      .def_readwrite("max_wait_appends", &PolicyConfig::max_wait_appends)
      .def("validate", &PolicyConfig::validate);

  py::class_<PolicyState>(m, "PolicyState")
      .def(py::init<>())
      .def_readwrite("thinking_emitted", &PolicyState::thinking_emitted)
      .def_readwrite("solution_emitted", &PolicyState::solution_emitted)
      .def_readwrite("forced_end_think", &PolicyState::forced_end_think)
      .def_readwrite("suppressed_end_think_count", &PolicyState::suppressed_end_think_count)
      .def_readwrite("wait_appends", &PolicyState::wait_appends)
      .def_property(
          "phase", [](const PolicyState& s) { return static_cast<int>(s.phase); },
          [](PolicyState& s, int p) { s.phase = static_cast<Phase>(p); });

  m.def("policy_step", [](const PolicyState& s, const PolicyConfig& c, std::size_t proposed, const LogitVector& l) {
    const Action a = policy_step(s, c, proposed, l);
    return py::make_tuple(std::string(to_string(a.kind)), a.token);
  });
  m.def("render_prompt", &render_prompt, py::arg("question"), py::arg("config"), py::arg("level") = Level::None);
}

void bind_reward(py::module_& m) {
  py::class_<PenaltyConfig>(m, "PenaltyConfig")
      .def(py::init([](double alpha, double beta, std::int64_t l_max) {
             PenaltyConfig c;
             c.alpha = alpha;
             c.beta = beta;
             c.l_max = l_max;
             c.validate();
             return c;
           }),
           py::arg("alpha") = 0.1, py::arg("beta") = 0.3, py::arg("l_max") = 4096)
      .def_readwrite("alpha", &PenaltyConfig::alpha)
      .def_readwrite("beta", &PenaltyConfig::beta)
      .def_readwrite("l_max", &PenaltyConfig::l_max);

  m.def("base_reward", &base_reward, py::arg("r_acc"), py::arg("r_format"));
  m.def("sweet_spot_penalty", &sweet_spot_penalty, py::arg("length"), py::arg("config"));
  m.def("multilevel_penalty", &multilevel_penalty, py::arg("level"), py::arg("length"), py::arg("correct"),
        py::arg("config"));
  m.def("total_reward", &total_reward, py::arg("r_hat"), py::arg("penalty"));
  m.def("group_advantages", [](const std::vector<double>& r, double eps) { return group_advantages(r, eps); },
        py::arg("rewards"), py::arg("epsilon") = kDefaultAdvantageEpsilon);
  m.def("level_prompt", [](Level l) { return std::string(level_prompt(l)); });
  m.def("level_threshold", &level_threshold, py::arg("level"), py::arg("config"));
}

void bind_sim(py::module_& m) {
  py::class_<LoopInject>(m, "LoopInject")
      .def(py::init<>())
      .def_readwrite("start", &LoopInject::start)
      .def_readwrite("period", &LoopInject::period)
      .def_readwrite("repeats", &LoopInject::repeats)
      .def_readwrite("repeat_block", &LoopInject::repeat_block)
      .def_readwrite("probability", &LoopInject::probability);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("vocab_size", &SimConfig::vocab_size)
      .def_readwrite("eos_logit", &SimConfig::eos_logit)
      .def_readwrite("end_think_logit", &SimConfig::end_think_logit)
      .def_readwrite("body_logit", &SimConfig::body_logit)
      .def_readwrite("loop_inject", &SimConfig::loop_inject)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("max_steps", &SimConfig::max_steps)
      .def_readwrite("correct_prob", &SimConfig::correct_prob);

  m.def("expected_length", &expected_length, py::arg("p_eos"));
  m.def("simulate", [](const SimConfig& cfg, const PolicyConfig& policy, std::size_t runs,
                       std::optional<double> eos_temp) {
    std::optional<EosTemperature> t;
    if (eos_temp) t = EosTemperature(*eos_temp);
    return simulate(cfg, policy, runs, t).set;
  }, py::arg("config"), py::arg("policy"), py::arg("runs") = 1, py::arg("eos_temp") = py::none());
}

void bind_analytics(py::module_& m) {
  py::class_<ParetoPoint>(m, "ParetoPoint")
      .def(py::init([](std::string label, double acc, double len) { return ParetoPoint{std::move(label), acc, len}; }),
           py::arg("label"), py::arg("accuracy"), py::arg("mean_length"))
      .def_readwrite("label", &ParetoPoint::label)
      .def_readwrite("accuracy", &ParetoPoint::accuracy)
      .def_readwrite("mean_length", &ParetoPoint::mean_length)
      .def("__eq__", [](const ParetoPoint& a, const ParetoPoint& b) { return a == b; })
      .def("__repr__", [](const ParetoPoint& p) {
        return "ParetoPoint(" + p.label + ", " + std::to_string(p.accuracy) + ", " + std::to_string(p.mean_length) + ")";
      });

  py::class_<LengthStats>(m, "LengthStats")
      .def_readonly("n", &LengthStats::n)
      .def_readonly("n_correct", &LengthStats::n_correct)
      .def_readonly("n_wrong", &LengthStats::n_wrong)
      .def_readonly("mean_all", &LengthStats::mean_all)
      .def_readonly("mean_correct", &LengthStats::mean_correct)
      .def_readonly("mean_wrong", &LengthStats::mean_wrong)
      .def_readonly("histogram", &LengthStats::histogram);

  m.def("length_stats", &length_stats, py::arg("traces"), py::arg("bin_width") = kDefaultBinWidth);
  m.def("repeat_rate", &repeat_rate, py::arg("traces"), py::arg("min_block") = kDefaultRepeatMinBlock,
        py::arg("k") = kDefaultRepeatK);
  m.def("is_repetitive", [](const std::string& text, std::size_t min_block, std::size_t k) {
    return detect_repetition(std::string_view(text), min_block, k).repetitive;
  }, py::arg("text"), py::arg("min_block") = kDefaultRepeatMinBlock, py::arg("k") = kDefaultRepeatK);
  m.def("think_solution_ratio", [](const Trace& t) {
    auto r = think_solution_ratio(t);
    return py::make_tuple(r.ratio, r.zero_solution);
  });
  m.def("count_steps", [](const std::string& text) { return count_steps(text); }, py::arg("text"));
  m.def("pareto_front", [](const std::vector<ParetoPoint>& pts) { return pareto_front(pts); }, py::arg("points"));

  m.def("fixture_names", [] {
    std::vector<std::string> out;
    for (const auto& f : fixtures()) out.push_back(f.name);
    return out;
  });
  m.def("fixture_rows", [](const std::string& name) {
    py::list rows;
    for (const auto& r : find_fixture(name).rows) {
      py::dict d;
      d["model"] = r.model;
      d["condition"] = r.condition;
      d["accuracy"] = r.accuracy;
      d["mean_length"] = r.mean_length;
      d["citation"] = r.citation;
      rows.append(d);
    }
    return rows;
  }, py::arg("name"));
  m.def("fixture_points", [](const std::string& name) { return fixture_points(find_fixture(name)); });
}

}  // namespace

PYBIND11_MODULE(_lenctl, m) {
  m.doc() = "Length-control toolkit: stopping policies, length-penalized rewards, trace analytics";
  bind_errors(m);
  bind_trace(m);
  bind_logits(m);
  bind_policy(m);
  bind_reward(m);
  bind_sim(m);
  bind_analytics(m);

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "lenctl");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
