#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "bellman/errors.hpp"
#include "bellman/io.hpp"
#include "bellman_cli/commands.hpp"
#include "doctest.h"

using namespace bellman;
using namespace bellman::cli;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bellman-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bellman_cli_" + name)).string();
}

}  // namespace

TEST_CASE("eval prints A and the region") {
  const Run r = run({"eval", "--point", "1,1,1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("A = 58213\n") != std::string::npos);
  CHECK(r.out.find("region = Boundary") != std::string::npos);
  const Run b = run({"eval", "--point", "1,1,1,1,1,1.5"});
  CHECK(b.code == 0);
  CHECK(b.out.find("B = ") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"eval"}).code == 2);
  CHECK(run({"eval", "--point", "1,x,1"}).code == 2);
  CHECK(run({"verify-psd", "--p", "3", "--q", "3", "--r", "3"}).code == 2);
  const Run bad_coef = run({"verify-psd", "--A", "-1"});
  CHECK(bad_coef.code == 2);
  CHECK(bad_coef.err.find("error:") != std::string::npos);
  CHECK(run({"eval", "--point", "-1,1,1"}).code == 2);
  CHECK(run({"verify-psd", "--config", temp_path("missing.json")}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("unit coefficients fail the PSD scan and leave witnesses") {
  const std::string path = temp_path("ones.json");
  const Run r = run({"verify-psd", "--A", "1", "--B", "1", "--C", "1", "--samples", "500", "--out", path});
  CHECK(r.code == 1);
  CHECK(r.out.find("verdict: fail") != std::string::npos);
  const Json j = Json::parse(read_text_file(path));
  CHECK(j["verdict"] == "fail");
  const std::string csv = read_text_file(witnesses_path(path));
  CHECK(csv.rfind("check,index,coordinates,coordinate_names,values,value_names\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 1);
  std::filesystem::remove(path);
  std::filesystem::remove(witnesses_path(path));
}

TEST_CASE("reports replay to identical bytes") {
  const std::string first = temp_path("first.json"), second = temp_path("second.json");
  const Run a = run({"verify-psd", "--samples", "2000", "--seed", "11", "--threads", "1", "--out", first});
  CHECK(a.code == 0);
  CHECK(a.out.find("verdict: pass") != std::string::npos);
  const Run b = run({"verify-psd", "--config", first, "--threads", "3", "--out", second});
  CHECK(b.code == 0);
  CHECK(read_text_file(first) == read_text_file(second));
  const Json j = Json::parse(read_text_file(first));
  CHECK(j["verdict"] == "pass");
  CHECK(j["config"]["seed"] == 11);
  CHECK(j["config"]["samples"] == 2000);
  CHECK_FALSE(j["config"].contains("threads"));
  CHECK_FALSE(j.contains("wall_time_seconds"));
  // An explicit flag overrides the replayed config.
  const Run c = run({"verify-psd", "--config", first, "--seed", "12", "--out", second});
  CHECK(c.code == 0);
  CHECK(Json::parse(read_text_file(second))["config"]["seed"] == 12);
  for (const auto& p : {first, second}) {
    std::filesystem::remove(p);
    std::filesystem::remove(witnesses_path(p));
  }
}

TEST_CASE("run_command and render_report are deterministic") {
  RunConfig cfg;
  cfg.command = "verify-properties";
  cfg.samples = 500;
  const std::string one = render_report(run_command(cfg));
  cfg.threads = 4;
  CHECK(render_report(run_command(cfg)) == one);
  CHECK(one.back() == '\n');
  RunConfig replay = RunConfig::from_json(Json::parse(one));
  CHECK(replay.command == "verify-properties");
  CHECK(replay.samples == 500);
  CHECK(render_report(run_command(replay)) == one);
}

TEST_CASE("timing is opt-in") {
  const std::string path = temp_path("timed.json");
  CHECK(run({"eval", "--point", "1,2,3", "--timing", "--out", path}).code == 0);
  CHECK(Json::parse(read_text_file(path)).contains("wall_time_seconds"));
  std::filesystem::remove(path);
  std::filesystem::remove(witnesses_path(path));
}

TEST_CASE("subcommands and defaults") {
  const auto& subs = subcommands();
  CHECK(subs.size() == 7);
  CHECK(default_samples("verify-psd") == 100000);
  RunConfig cfg;
  cfg.command = "bogus";
  CHECK_THROWS_AS(run_command(cfg), ConstraintViolation);
}
