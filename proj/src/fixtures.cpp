#include "lenctl/fixtures.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "lenctl/csv.hpp"

namespace lenctl {

namespace {

constexpr const char* kTsCite = "Results of post-hoc temperature scaling (table tab:ts)";
constexpr const char* kSweetCite = "Sweet-spot length penalty results on MATH500 (table tab:sweet_spot)";
constexpr const char* kMl500Cite =
    "Multi-level length control, MATH500, with length control (table tab:multi-level_length_control_MATH500)";

void add_triplet(Fixture& f, const std::string& model, const char* const conditions[3],
                 const double values[6], const char* cite) {
  for (int i = 0; i < 3; ++i) {
    f.rows.push_back({model, conditions[i], values[2 * i], values[2 * i + 1], cite});
  }
}

std::vector<Fixture> build() {
  std::vector<Fixture> out;
  const char* ts_conditions[3] = {"Base", "BF", "TS"};
  const char* rl_conditions[3] = {"Base", "RL", "RL+LP"};
  const char* levels[3] = {"SHORT", "MODERATE", "LONG"};

  {
    Fixture f{"ts_math500", "EOS temperature scaling vs budget forcing on SFT-distilled models",
              "tab:ts", {}};
    const double s1[] = {77.00, 4842.68, 77.17, 3591.21, 77.01, 1983.93};
    const double ds15[] = {80.60, 5869.60, 81.03, 3162.49, 81.09, 2615.66};
    const double ds7[] = {88.17, 4078.26, 88.03, 2839.95, 88.95, 2547.42};
    add_triplet(f, "SFT-S1-7b", ts_conditions, s1, kTsCite);
    add_triplet(f, "SFT-DeepSeek-1.5b", ts_conditions, ds15, kTsCite);
    add_triplet(f, "SFT-DeepSeek-7b", ts_conditions, ds7, kTsCite);
    out.push_back(std::move(f));
  }
  {
    Fixture f{"sweet_spot", "Base vs RL vs RL with linear length penalty", "tab:sweet_spot", {}};
    const double q15[] = {23.4, 1976.874, 68.2, 685.896, 71.4, 495.842};
    const double q7[] = {57.2, 1109.13, 70, 671.58, 71.2, 404.962};
    const double ds15[] = {80.6, 5769.596, 77.2, 1929.208, 80.4, 1104.748};
    add_triplet(f, "Qwen2.5-Math-1.5B(4k)", rl_conditions, q15, kSweetCite);
    add_triplet(f, "Qwen2.5-Math-7B(4k)", rl_conditions, q7, kSweetCite);
    add_triplet(f, "DeepSeek-R1-Distill-Qwen-1.5B(32768)", rl_conditions, ds15, kSweetCite);
    out.push_back(std::move(f));
  }
  {
    Fixture f{"ml_math500_1p5b_4k_new", "Multi-level length control, 1.5B model, 4k, new run",
              "tab:multi-level_length_control_MATH500", {}};
    const double v[] = {62.4, 714.17, 72.4, 927.476, 78.4, 1285.882};
    add_triplet(f, "DeepSeek-R1-Distill-Qwen-1.5B-4k-new", levels, v, kMl500Cite);
    out.push_back(std::move(f));
  }
  {
    Fixture f{"math500_4k", "All 4k-context MATH500 rows with length control (pareto input)",
              "tab:multi-level_length_control_MATH500", {}};
    struct Row {
      const char* model;
      double v[6];
    };
    const Row rows[] = {
        {"DeepSeek-R1-Distill-Qwen-1.5B-4k", {60.0, 650.08, 65.0, 868.134, 74.4, 1194.83}},
        {"DeepSeek-R1-Distill-Qwen-1.5B-4k-new", {62.4, 714.17, 72.4, 927.476, 78.4, 1285.882}},
        {"DeepSeek-R1-Distill-Qwen-7B-4k", {70.2, 351.828, 74.4, 433.952, 77.2, 673.16}},
        {"DeepScaleR-1.5B-Preview-4k", {68.6, 577.702, 75.2, 706.082, 74.8, 857.298}},
        {"L1-Qwen-1.5B-Max-4k", {70.4, 351.774, 76.2, 656.242, 80.2, 1353.576}},
        {"S1-Qwen-1.5B-BudgetForcing-4k", {43.60, 876.31, 66.20, 1360.79, 76.80, 1936.26}},
        {"S1-Qwen-7B-BudgetForcing-4k", {48.20, 871.75, 72.00, 1366.49, 83.00, 2044.31}},
        {"DeepSeek-R1-Distill-Qwen-1.5B-prompt-4k", {32.20, 890.22, 55.60, 1441.21, 69.60, 2108.98}},
        {"DeepSeek-R1-Distill-Qwen-7B-prompt-4k", {28.20, 918.25, 51.20, 1480.86, 76.40, 2153.89}},
    };
    for (const auto& r : rows) add_triplet(f, r.model, levels, r.v, kMl500Cite);
    out.push_back(std::move(f));
  }
  return out;
}

double parse_double(const std::string& text, std::size_t line, const char* column) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string("bad ") + column + " value \"" + text + "\"");
  }
  return value;
}

}  // namespace

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> all = build();
  return all;
}

const Fixture& find_fixture(std::string_view name) {
  for (const auto& f : fixtures()) {
    if (f.name == name) return f;
  }
  std::string msg = "unknown fixture \"" + std::string(name) + "\"; available:";
  for (const auto& f : fixtures()) msg += " " + f.name;
  throw UnknownFixtureError(msg);
}

std::vector<ParetoPoint> fixture_points(const Fixture& fixture) {
  std::vector<ParetoPoint> out;
  out.reserve(fixture.rows.size());
  for (const auto& r : fixture.rows) out.push_back({r.label(), r.accuracy, r.mean_length});
  return out;
}

void write_fixture_csv(std::ostream& out, const Fixture& fixture) {
  csv::write_row(out, {"label", "accuracy", "mean_length", "citation"});
  for (const auto& r : fixture.rows) {
    csv::write_row(out, {r.label(), csv::format_number(r.accuracy), csv::format_number(r.mean_length),
                         r.citation});
  }
}

std::vector<ParetoPoint> read_points(std::istream& in) {
  const auto rows = csv::parse(in);
  if (rows.empty()) throw ParseError(1, "points CSV is empty");
  const auto& header = rows.front();
  auto column = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError(1, name, std::string("missing column \"") + name + "\"");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t label = column("label");
  const std::size_t acc = column("accuracy");
  const std::size_t len = column("mean_length");
  const std::size_t needed = std::max({label, acc, len}) + 1;

  std::vector<ParetoPoint> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t line = i + 1;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() < needed) throw ParseError(line, "too few columns");
    ParetoPoint p{row[label], parse_double(row[acc], line, "accuracy"), parse_double(row[len], line, "mean_length")};
    out.push_back(std::move(p));
  }
  return out;
}

void write_points_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
  csv::write_row(out, {"label", "accuracy", "mean_length"});
  for (const auto& p : points) {
    csv::write_row(out, {p.label, csv::format_number(p.accuracy), csv::format_number(p.mean_length)});
  }
}

}  // namespace lenctl
