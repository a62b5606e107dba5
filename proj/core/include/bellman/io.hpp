#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bellman/dyadic.hpp"
#include "bellman/heat.hpp"
#include "bellman/martingale.hpp"

namespace bellman {

// Shortest decimal that parses back to the same double (at most 17
// significant digits). Non-finite values become "nan", "inf", "-inf".
std::string format_double(double x);

// Writes the whole string; throws IOError on failure.
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

// {"depth": n, "values": [...]} with round-trip decimals. Throws IOError on
// malformed input or a depth that does not match the cell count.
std::string dyadic_step_to_json(const DyadicStep& f);
DyadicStep dyadic_step_from_json(std::string_view text);

// Everything needed to rebuild a MartingaleTriple.
struct MartingaleReplay {
  std::uint64_t seed = 0;
  std::vector<std::vector<std::vector<double>>> branch_probs;
  std::vector<double> x_leaf, y_leaf, z_leaf;

  Filtration tree() const { return Filtration(branch_probs); }
  bool operator==(const MartingaleReplay&) const = default;
};

// {"depth", "seed", "branch_probs", "x", "y", "z"}. Throws IOError on
// malformed input or a leaf count that does not match the tree.
std::string martingale_replay_to_json(const MartingaleReplay& replay);
MartingaleReplay martingale_replay_from_json(std::string_view text);

// Header "x,t,value,dx", one row per grid node, t-major.
std::string heat_field_csv(const HeatField& field);

}  // namespace bellman
