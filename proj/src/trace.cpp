#include "lenctl/trace.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lenctl/errors.hpp"

namespace lenctl {

using Json = nlohmann::ordered_json;

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Short: return "SHORT";
    case Level::Moderate: return "MODERATE";
    case Level::Long: return "LONG";
    case Level::None: return "NONE";
  }
  return "NONE";
}

std::optional<Level> parse_level(std::string_view text) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "SHORT") return Level::Short;
  if (upper == "MODERATE") return Level::Moderate;
  if (upper == "LONG") return Level::Long;
  if (upper == "NONE") return Level::None;
  return std::nullopt;
}

void validate_trace(const Trace& t, std::int64_t max_context) {
  if (t.thinking_len < 0) throw ValidationError("trace '" + t.id + "': thinking_len is negative");
  if (t.solution_len < 0) throw ValidationError("trace '" + t.id + "': solution_len is negative");
  if (t.total_len != t.thinking_len + t.solution_len) {
    throw ValidationError("trace '" + t.id + "': total_len " + std::to_string(t.total_len) +
                          " != thinking_len + solution_len");
  }
  if (max_context > 0) {
    if (t.total_len > max_context) {
      throw ValidationError("trace '" + t.id + "': total_len exceeds max_context " +
                            std::to_string(max_context));
    }
    if (t.truncated && t.total_len != max_context) {
      throw ValidationError("trace '" + t.id + "': truncated but total_len " +
                            std::to_string(t.total_len) + " != max_context " +
                            std::to_string(max_context));
    }
  }
}

namespace {

const Json* find_field(const Json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const Json& require(const Json& obj, const char* key, std::size_t line) {
  const Json* v = find_field(obj, key);
  if (v == nullptr) throw SchemaError(line, key, std::string("missing required field \"") + key + "\"");
  return *v;
}

std::int64_t as_int(const Json& v, const char* key, std::size_t line) {
  if (!v.is_number_integer()) {
    throw SchemaError(line, key, std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

bool as_bool(const Json& v, const char* key, std::size_t line) {
  if (!v.is_boolean()) throw SchemaError(line, key, std::string("field \"") + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string as_string(const Json& v, const char* key, std::size_t line) {
  if (!v.is_string()) throw SchemaError(line, key, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::string optional_string(const Json& obj, const char* key, std::size_t line) {
  const Json* v = find_field(obj, key);
  return v == nullptr ? std::string() : as_string(*v, key, line);
}

TraceHeader parse_header(const Json& obj, std::size_t line, std::string_view schema_version) {
  if (!obj.is_object()) throw SchemaError(line, "", "header line must be a JSON object");
  TraceHeader h;
  h.schema_version = as_string(require(obj, "schema_version", line), "schema_version", line);
  if (h.schema_version != schema_version) {
    throw SchemaError(line, "schema_version",
                      "unsupported schema_version \"" + h.schema_version + "\" (expected \"" +
                          std::string(schema_version) + "\")");
  }
  h.max_context = as_int(require(obj, "max_context", line), "max_context", line);
  if (h.max_context < 0) throw ValidationError("line " + std::to_string(line) + ": max_context is negative");
  h.tokenizer = as_string(require(obj, "tokenizer", line), "tokenizer", line);
  return h;
}

Trace parse_trace(const Json& obj, std::size_t line) {
  if (!obj.is_object()) throw SchemaError(line, "", "trace line must be a JSON object");
  Trace t;
  t.id = as_string(require(obj, "id", line), "id", line);
  t.prompt = optional_string(obj, "prompt", line);
  if (const Json* lv = find_field(obj, "level")) {
    auto level = parse_level(as_string(*lv, "level", line));
    if (!level) throw SchemaError(line, "level", "unknown level \"" + lv->get<std::string>() + "\"");
    t.level = *level;
  }
  t.thinking_text = optional_string(obj, "thinking_text", line);
  t.solution_text = optional_string(obj, "solution_text", line);
  t.thinking_len = as_int(require(obj, "thinking_len", line), "thinking_len", line);
  t.solution_len = as_int(require(obj, "solution_len", line), "solution_len", line);
  if (const Json* tl = find_field(obj, "total_len")) {
    t.total_len = as_int(*tl, "total_len", line);
  } else {
    t.total_len = t.thinking_len + t.solution_len;
  }
  t.correct = as_bool(require(obj, "correct", line), "correct", line);
  if (const Json* tr = find_field(obj, "truncated")) t.truncated = as_bool(*tr, "truncated", line);
  t.model = optional_string(obj, "model", line);
  t.dataset = optional_string(obj, "dataset", line);
  return t;
}

Json trace_to_json(const Trace& t) {
  Json j;
  j["id"] = t.id;
  j["prompt"] = t.prompt;
  j["level"] = std::string(to_string(t.level));
  j["thinking_text"] = t.thinking_text;
  j["solution_text"] = t.solution_text;
  j["thinking_len"] = t.thinking_len;
  j["solution_len"] = t.solution_len;
  j["total_len"] = t.total_len;
  j["correct"] = t.correct;
  j["truncated"] = t.truncated;
  j["model"] = t.model;
  j["dataset"] = t.dataset;
  return j;
}

}  // namespace

TraceSet parse_traces(std::istream& in, std::string_view schema_version) {
  TraceSet set;
  bool have_header = false;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    Json obj;
    try {
      obj = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!have_header) {
      set.header = parse_header(obj, line, schema_version);
      have_header = true;
      continue;
    }
    Trace t = parse_trace(obj, line);
    try {
      validate_trace(t, set.header.max_context);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
    set.traces.push_back(std::move(t));
  }
  if (!have_header) throw ParseError(line == 0 ? 1 : line, "missing header line");
  return set;
}

TraceSet load_traces(const std::filesystem::path& path, std::string_view schema_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace file " + path.string());
  return parse_traces(in, schema_version);
}

std::string trace_to_json_line(const Trace& trace) { return trace_to_json(trace).dump(); }

void write_traces(std::ostream& out, const TraceSet& set) {
  Json header;
  header["schema_version"] = set.header.schema_version;
  header["max_context"] = set.header.max_context;
  header["tokenizer"] = set.header.tokenizer;
  out << header.dump() << '\n';
  for (const auto& t : set.traces) out << trace_to_json(t).dump() << '\n';
}

void save_traces(const std::filesystem::path& path, const TraceSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace file " + path.string());
  write_traces(out, set);
}

ThinkingSplit split_thinking(std::string_view full_text, std::string_view delimiter) {
  if (delimiter.empty()) throw ValidationError("split_thinking: delimiter must be non-empty");
  ThinkingSplit out;
  auto pos = full_text.find(delimiter);
  if (pos == std::string_view::npos) {
    out.thinking = std::string(full_text);
    return out;
  }
  out.thinking = std::string(full_text.substr(0, pos));
  out.solution = std::string(full_text.substr(pos + delimiter.size()));
  out.delimiter_found = true;
  return out;
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::int64_t count_whitespace_tokens(std::string_view text) {
  return static_cast<std::int64_t>(whitespace_tokens(text).size());
}

}  // namespace lenctl
