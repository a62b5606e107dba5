#include "bellman/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "bellman/errors.hpp"
#include "json.hpp"

namespace bellman {
namespace {

using nlohmann::ordered_json;

ordered_json parse(std::string_view text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::exception& ex) {
    throw IOError(std::string("malformed ") + what + ": " + ex.what());
  }
}

template <typename T>
T field(const ordered_json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const ordered_json::exception& ex) {
    throw IOError(std::string(what) + " field '" + key + "': " + ex.what());
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IOError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string dyadic_step_to_json(const DyadicStep& f) {
  ordered_json j;
  j["depth"] = f.depth();
  j["values"] = f.values();
  return j.dump();
}

DyadicStep dyadic_step_from_json(std::string_view text) {
  const ordered_json j = parse(text, "dyadic step");
  const auto depth = field<unsigned>(j, "depth", "dyadic step");
  auto values = field<std::vector<double>>(j, "values", "dyadic step");
  if (depth >= 63 || values.size() != (std::size_t{1} << depth)) {
    throw IOError("dyadic step depth does not match its cell count");
  }
  try {
    return DyadicStep(std::move(values));
  } catch (const Error& ex) {
    throw IOError(std::string("invalid dyadic step: ") + ex.what());
  }
}

std::string martingale_replay_to_json(const MartingaleReplay& r) {
  ordered_json j;
  j["depth"] = r.branch_probs.size();
  j["seed"] = r.seed;
  j["branch_probs"] = r.branch_probs;
  j["x"] = r.x_leaf;
  j["y"] = r.y_leaf;
  j["z"] = r.z_leaf;
  return j.dump();
}

MartingaleReplay martingale_replay_from_json(std::string_view text) {
  const ordered_json j = parse(text, "martingale replay");
  MartingaleReplay r;
  const auto depth = field<std::size_t>(j, "depth", "martingale replay");
  r.seed = field<std::uint64_t>(j, "seed", "martingale replay");
  r.branch_probs = field<std::vector<std::vector<std::vector<double>>>>(j, "branch_probs", "martingale replay");
  r.x_leaf = field<std::vector<double>>(j, "x", "martingale replay");
  r.y_leaf = field<std::vector<double>>(j, "y", "martingale replay");
  r.z_leaf = field<std::vector<double>>(j, "z", "martingale replay");
  if (depth != r.branch_probs.size()) throw IOError("martingale replay depth does not match branch_probs");
  try {
    const Filtration tree = r.tree();
    const std::size_t leaves = tree.size(tree.depth());
    if (r.x_leaf.size() != leaves || r.y_leaf.size() != leaves || r.z_leaf.size() != leaves) {
      throw IOError("martingale replay leaf count does not match the tree");
    }
  } catch (const IOError&) {
    throw;
  } catch (const Error& ex) {
    throw IOError(std::string("invalid martingale replay: ") + ex.what());
  }
  return r;
}

std::string heat_field_csv(const HeatField& field) {
  std::ostringstream out;
  out << "x,t,value,dx\n";
  for (std::size_t j = 0; j < field.value.size(); ++j) {
    for (std::size_t i = 0; i < field.value[j].size(); ++i) {
      out << format_double(field.grid.x(i)) << ',' << format_double(field.grid.t(j)) << ','
          << format_double(field.value[j][i]) << ',' << format_double(field.dx[j][i]) << '\n';
    }
  }
  return out.str();
}

}  // namespace bellman
