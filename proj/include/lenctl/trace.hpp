#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lenctl {

enum class Level { Short, Moderate, Long, None };

std::string_view to_string(Level level);
// Accepts upper or lower case ("SHORT", "short"). Returns nullopt otherwise.
std::optional<Level> parse_level(std::string_view text);

inline constexpr std::string_view kDefaultDelimiter = "</think>";
inline constexpr std::string_view kTraceSchemaVersion = "1.0";

// One model response. Token counts are supplied by the producer and never
// recomputed from the text fields.
struct Trace {
  std::string id;
  std::string prompt;
  Level level = Level::None;
  std::string thinking_text;
  std::string solution_text;
  std::int64_t thinking_len = 0;
  std::int64_t solution_len = 0;
  std::int64_t total_len = 0;
  bool correct = false;
  bool truncated = false;  // generation hit max context
  std::string model;
  std::string dataset;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct TraceHeader {
  std::string schema_version{kTraceSchemaVersion};
  std::int64_t max_context = 0;
  std::string tokenizer = "whitespace";

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct TraceSet {
  TraceHeader header;
  std::vector<Trace> traces;

  std::int64_t max_context() const { return header.max_context; }
  friend bool operator==(const TraceSet&, const TraceSet&) = default;
};

// Throws ValidationError when a trace breaks a length invariant relative to
// max_context (pass 0 to skip the context checks).
void validate_trace(const Trace& trace, std::int64_t max_context);

// Reads the JSON-lines trace format: a header object on line 1, then one Trace
// object per line. Blank lines are skipped. Throws ParseError, SchemaError or
// ValidationError with the offending line number.
TraceSet parse_traces(std::istream& in, std::string_view schema_version = kTraceSchemaVersion);
TraceSet load_traces(const std::filesystem::path& path,
                     std::string_view schema_version = kTraceSchemaVersion);

// Writes a TraceSet with a fixed key order. Output of write_traces is accepted
// by parse_traces and re-serializes to identical bytes.
void write_traces(std::ostream& out, const TraceSet& set);
void save_traces(const std::filesystem::path& path, const TraceSet& set);

std::string trace_to_json_line(const Trace& trace);

struct ThinkingSplit {
  std::string thinking;
  std::string solution;
  bool delimiter_found = false;
};

// Splits at the first occurrence of the delimiter, which belongs to neither
// side. Without a delimiter the whole text is thinking.
ThinkingSplit split_thinking(std::string_view full_text,
                             std::string_view delimiter = kDefaultDelimiter);

// Fallback counter for simulator-produced text only.
std::vector<std::string_view> whitespace_tokens(std::string_view text);
std::int64_t count_whitespace_tokens(std::string_view text);

}  // namespace lenctl
