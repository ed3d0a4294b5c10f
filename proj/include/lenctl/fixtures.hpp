#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lenctl/analytics.hpp"
#include "lenctl/errors.hpp"

namespace lenctl {

// Published accuracy/length results carried as reference data for the
// analytics path. These numbers come from trained models and are never
// produced by this library.
struct FixtureRow {
  std::string model;
  std::string condition;  // e.g. "Base", "TS", "SHORT"
  double accuracy = 0.0;     // percent
  double mean_length = 0.0;  // tokens
  std::string citation;

  std::string label() const { return model + "/" + condition; }
};

struct Fixture {
  std::string name;
  std::string description;
  std::string source;  // table the rows were transcribed from
  std::vector<FixtureRow> rows;
};

inline constexpr std::string_view kFixtureProvenance = "transcribed";

class UnknownFixtureError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

const std::vector<Fixture>& fixtures();

// Throws UnknownFixtureError whose message lists the available names.
const Fixture& find_fixture(std::string_view name);

std::vector<ParetoPoint> fixture_points(const Fixture& fixture);

// CSV with header "label,accuracy,mean_length,citation"; readable by
// read_points.
void write_fixture_csv(std::ostream& out, const Fixture& fixture);

// Reads a points CSV. Columns are located by header name; "label",
// "accuracy" and "mean_length" are required, anything else is ignored.
std::vector<ParetoPoint> read_points(std::istream& in);
void write_points_csv(std::ostream& out, const std::vector<ParetoPoint>& points);

}  // namespace lenctl
