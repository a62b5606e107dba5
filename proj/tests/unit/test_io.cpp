#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "bellman/errors.hpp"
#include "bellman/io.hpp"
#include "doctest.h"

using namespace bellman;

TEST_CASE("format_double round-trips and is shortest") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(114048.0) == "114048");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::bit_cast<double>(rng());
    if (!std::isfinite(x)) continue;
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
    CHECK(s.size() <= 24);
  }
}

TEST_CASE("text files") {
  const std::string path = (std::filesystem::temp_directory_path() / "bellman_io_test.txt").string();
  write_text_file(path, "line\n");
  CHECK(read_text_file(path) == "line\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file(path), IOError);
  CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x.txt", "a"), IOError);
}

TEST_CASE("dyadic step JSON") {
  const DyadicStep f({0.1, 2.0, 1e-300, 3.0});
  const std::string s = dyadic_step_to_json(f);
  CHECK(dyadic_step_from_json(s) == f);
  CHECK(s.find("\"depth\"") != std::string::npos);
  CHECK_THROWS_AS(dyadic_step_from_json("{\"depth\": 1, \"values\": [1, 2, 3, 4]}"), IOError);
  CHECK_THROWS_AS(dyadic_step_from_json("{\"depth\": 1, \"values\": [1, -2]}"), IOError);
  CHECK_THROWS_AS(dyadic_step_from_json("not json"), IOError);
  CHECK_THROWS_AS(dyadic_step_from_json("{\"values\": [1, 2]}"), IOError);
}

TEST_CASE("martingale replay JSON rebuilds the same triple") {
  Rng rng(9);
  MartingaleReplay rp;
  rp.seed = 99;
  const Filtration tree = Filtration::random(rng, 3, 3);
  rp.branch_probs = tree.branch_probs();
  const std::size_t n = tree.size(3);
  rp.x_leaf = random_leaves(rng, n);
  rp.y_leaf = random_leaves(rng, n);
  rp.z_leaf = random_leaves(rng, n);
  const MartingaleReplay back = martingale_replay_from_json(martingale_replay_to_json(rp));
  CHECK(back == rp);
  const Exponents e(2, 6, 3);
  const MartingaleTriple a = martingale_from_terminal(rp.tree(), e, rp.x_leaf, rp.y_leaf, rp.z_leaf);
  const MartingaleTriple b = martingale_from_terminal(back.tree(), e, back.x_leaf, back.y_leaf, back.z_leaf);
  CHECK(a.x == b.x);
  CHECK(a.w == b.w);

  MartingaleReplay short_leaves = rp;
  short_leaves.x_leaf.pop_back();
  CHECK_THROWS_AS(martingale_replay_from_json(martingale_replay_to_json(short_leaves)), IOError);
  CHECK_THROWS_AS(martingale_replay_from_json("{\"depth\": 1}"), IOError);
}

TEST_CASE("heat field CSV") {
  Grid1D g;
  g.radius = 0.5;
  g.dx = 0.25;
  g.delta = 0.1;
  g.dt = 0.1;
  g.horizon = 0.3;
  const HeatField field = heat_extend(Profile::indicator(-0.25, 0.25).function(), g);
  const std::string csv = heat_field_csv(field);
  CHECK(csv.rfind("x,t,value,dx\n", 0) == 0);
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 1 + g.nx() * g.nt());
  CHECK(csv.find("\n-0.5,0.1,") != std::string::npos);
}
