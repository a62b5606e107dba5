#include "bellman_cli/report.hpp"

#include <sstream>

#include "bellman/errors.hpp"
#include "bellman/io.hpp"

namespace bellman::cli {
namespace {

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += format_double(xs[i]);
  }
  return out;
}

// Quotes a CSV cell when it contains a separator.
std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

template <typename T>
void read_if(const Json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const Json::exception& ex) {
    throw IOError(std::string("config field '") + key + "': " + ex.what());
  }
}

void read_if(const Json& j, const char* key, std::optional<double>& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<double>();
  } catch (const Json::exception& ex) {
    throw IOError(std::string("config field '") + key + "': " + ex.what());
  }
}

}  // namespace

Exponents RunConfig::exponents() const { return {p, q, r}; }

Coefficients RunConfig::coefficients() const {
  const Coefficients d = coefficients_default(exponents());
  return {a.value_or(d.a()), b.value_or(d.b()), c.value_or(d.c())};
}

void RunConfig::validate() const {
  (void)exponents();
  (void)coefficients();
  if (!(tol >= 0.0)) throw ConstraintViolation("tolerance must be >= 0");
  if (budget < 1) throw ConstraintViolation("budget must be >= 1");
  if (paths < 2) throw ConstraintViolation("paths must be >= 2");
}

Json RunConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["p"] = p;
  j["q"] = q;
  j["r"] = r;
  const Coefficients co = coefficients();
  j["A"] = co.a();
  j["B"] = co.b();
  j["C"] = co.c();
  j["seed"] = seed;
  j["samples"] = samples;
  j["budget"] = budget;
  j["paths"] = paths;
  j["tol"] = tol;
  j["point"] = point;
  return j;
}

RunConfig RunConfig::from_json(const Json& in) {
  if (!in.is_object()) throw IOError("config must be a JSON object");
  const Json& j = in.contains("config") ? in.at("config") : in;
  RunConfig cfg;
  read_if(j, "command", cfg.command);
  read_if(j, "p", cfg.p);
  read_if(j, "q", cfg.q);
  read_if(j, "r", cfg.r);
  read_if(j, "A", cfg.a);
  read_if(j, "B", cfg.b);
  read_if(j, "C", cfg.c);
  read_if(j, "seed", cfg.seed);
  read_if(j, "samples", cfg.samples);
  read_if(j, "budget", cfg.budget);
  read_if(j, "paths", cfg.paths);
  read_if(j, "tol", cfg.tol);
  read_if(j, "point", cfg.point);
  return cfg;
}

Check from_property(const PropertyResult& r, const std::string& coordinate_names) {
  Check ch;
  ch.name = r.name;
  ch.passed = r.passed();
  ch.samples = r.samples;
  ch.skipped = r.skipped;
  ch.violations = r.violation_count;
  ch.tol = r.tol;
  ch.metrics["worst_relative_margin"] = r.worst_margin;
  ch.metrics["seed"] = r.seed;
  ch.coordinate_names = coordinate_names;
  ch.value_names = "margin;scale";
  for (const PropertyWitness& w : r.violations) ch.witnesses.push_back({w.point, {w.margin, w.scale}});
  return ch;
}

bool Report::passed() const {
  for (const Check& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

Json Report::to_json() const {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config"] = config.to_json();
  j["verdict"] = passed() ? "pass" : "fail";
  j["result"] = result;
  Json checks_json = Json::array();
  for (const Check& c : checks) {
    Json cj;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    cj["samples"] = c.samples;
    cj["skipped"] = c.skipped;
    cj["violations"] = c.violations;
    cj["tol"] = c.tol;
    cj["metrics"] = c.metrics;
    cj["witnesses_listed"] = c.witnesses.size();
    checks_json.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks_json);
  if (wall_time) j["wall_time_seconds"] = *wall_time;
  return j;
}

std::string Report::witnesses_csv() const {
  std::ostringstream out;
  out << "check,index,coordinates,coordinate_names,values,value_names\n";
  for (const Check& c : checks) {
    for (std::size_t i = 0; i < c.witnesses.size(); ++i) {
      const Witness& w = c.witnesses[i];
      out << cell(c.name) << ',' << i << ',' << join(w.coordinates) << ',' << c.coordinate_names << ','
          << join(w.values) << ',' << c.value_names << '\n';
    }
  }
  return out.str();
}

std::string render_report(const Report& report) { return report.to_json().dump(2) + "\n"; }

std::string witnesses_path(const std::string& report_path) {
  const std::size_t slash = report_path.find_last_of('/');
  const std::size_t dot = report_path.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash + 1);
  return (has_ext ? report_path.substr(0, dot) : report_path) + ".witnesses.csv";
}

void write_report(const Report& report, const std::string& path) {
  write_text_file(path, render_report(report));
  write_text_file(witnesses_path(path), report.witnesses_csv());
}

}  // namespace bellman::cli
