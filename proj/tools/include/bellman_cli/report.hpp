#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellman/exponents.hpp"
#include "bellman/properties.hpp"
#include "json.hpp"

namespace bellman::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "bellman-lab";
inline constexpr const char* kToolVersion = "0.1.0";

// Settings shared by every subcommand. Only the fields that influence the
// numbers are echoed into reports, so thread count and output path do not
// change the report bytes.
struct RunConfig {
  std::string command;
  double p = 2.0, q = 6.0, r = 3.0;
  std::optional<double> a, b, c;  // missing entries take the default coefficients
  std::uint64_t seed = 7;
  std::size_t samples = 0;        // 0: the subcommand's default
  std::size_t budget = 40;        // search-coeffs feasibility evaluations
  std::size_t paths = 100000;     // martingale-sim Brownian paths
  double tol = kMarginTolerance;
  std::vector<double> point;      // eval: u,v,w or u,v,w,U,V,W
  std::string out;
  unsigned threads = 1;
  bool timing = false;

  Exponents exponents() const;
  Coefficients coefficients() const;
  // Throws ConstraintViolation on an invalid exponent triple, non-positive
  // coefficient, tolerance or budget.
  void validate() const;

  Json to_json() const;
  // Accepts either a bare config object or a full report with a "config"
  // member. Throws IOError on malformed fields.
  static RunConfig from_json(const Json& j);
};

struct Witness {
  std::vector<double> coordinates;
  std::vector<double> values;
};

struct Check {
  Check() = default;
  explicit Check(std::string n) : name(std::move(n)) {}

  std::string name;
  bool passed = true;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
  double tol = 0.0;
  Json metrics = Json::object();
  std::string coordinate_names;  // ';'-separated labels of Witness::coordinates
  std::string value_names;       // ';'-separated labels of Witness::values
  std::vector<Witness> witnesses;
};

Check from_property(const PropertyResult& r, const std::string& coordinate_names);

struct Report {
  RunConfig config;
  std::vector<Check> checks;
  Json result = Json::object();
  std::optional<double> wall_time;  // seconds, only with --timing

  bool passed() const;
  Json to_json() const;
  // Header "check,index,coordinates,coordinate_names,values,value_names",
  // one row per witness; list entries are ';'-separated.
  std::string witnesses_csv() const;
};

// Stable pretty-printed JSON with a trailing newline.
std::string render_report(const Report& report);
// `<stem>.witnesses.csv` next to a report path.
std::string witnesses_path(const std::string& report_path);
// Writes the JSON report and its sibling witness CSV. Throws IOError.
void write_report(const Report& report, const std::string& path);

}  // namespace bellman::cli
