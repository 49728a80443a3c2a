#include <doctest.h>

#include "config.hpp"
#include "shearstab/shearstab.h"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

using namespace shearstab::cli;

namespace {

ParseOutcome parse(std::vector<std::string> args) { return parse_config(args); }

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& text) : path(name) {
    std::ofstream(path) << text;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("energy defaults are applied") {
  const auto r = parse({"energy", "--profile", "couette", "--mode", "spanwise"});
  REQUIRE(r.kind == ParseOutcome::Kind::Run);
  CHECK(r.exit_code() == 0);
  CHECK(r.config.command == Command::Energy);
  CHECK(r.config.n_modes == 64);
  CHECK(r.config.check_modes == 48);
  CHECK(r.config.mode == "spanwise");
  CHECK(r.config.a.has_value());
  CHECK(r.config.format == "both");
}

TEST_CASE("cli search boxes match the library defaults") {
  const auto span = parse({"energy", "--search"});
  REQUIRE(span.kind == ParseOutcome::Kind::Run);
  const sst_search_box sb = sst_default_search_box(SST_ENERGY_SPANWISE);
  CHECK(*span.config.a_min == sb.a_min);
  CHECK(*span.config.a_max == sb.a_max);
  CHECK(*span.config.coarse_step == sb.coarse_step);

  const auto full = parse({"energy", "--search", "--mode", "full"});
  REQUIRE(full.kind == ParseOutcome::Kind::Run);
  const sst_search_box fb = sst_default_search_box(SST_ENERGY_FULL);
  CHECK(*full.config.a_min == fb.a_min);
  CHECK(*full.config.a_max == fb.a_max);
  CHECK(*full.config.b_min == fb.b_min);
  CHECK(*full.config.b_max == fb.b_max);

  const auto lin = parse({"linear", "--critical"});
  REQUIRE(lin.kind == ParseOutcome::Kind::Run);
  const sst_linear_box lb = sst_default_linear_box();
  CHECK(*lin.config.a_min == lb.a_min);
  CHECK(*lin.config.a_max == lb.a_max);
  CHECK(*lin.config.re_min == lb.re_min);
  CHECK(*lin.config.re_max == lb.re_max);
  CHECK(*lin.config.re_scan_points == lb.re_scan_points);
}

TEST_CASE("unknown flags and misplaced keys are errors") {
  const auto r = parse({"energy", "--bogus", "1"});
  CHECK(r.kind == ParseOutcome::Kind::Error);
  CHECK(r.exit_code() == 2);
  CHECK(r.text.find("bogus") != std::string::npos);

  const auto dt = parse({"energy", "--dt", "0.1"});
  CHECK(dt.kind == ParseOutcome::Kind::Error);

  CHECK(parse({}).kind == ParseOutcome::Kind::Error);
  CHECK(parse({"transmogrify"}).kind == ParseOutcome::Kind::Error);
}

TEST_CASE("out-of-range values name the key") {
  const auto r = parse({"energy", "--n-modes", "4"});
  REQUIRE(r.kind == ParseOutcome::Kind::Error);
  CHECK(r.text.find("n_modes") != std::string::npos);

  const auto dt = parse({"evolve", "--dt", "-1"});
  REQUIRE(dt.kind == ParseOutcome::Kind::Error);
  CHECK(dt.text.find("dt") != std::string::npos);

  const auto nx = parse({"evolve", "--nx", "7"});
  REQUIRE(nx.kind == ParseOutcome::Kind::Error);
  CHECK(nx.text.find("nx") != std::string::npos);

  const auto typ = parse({"energy", "--a", "abc"});
  REQUIRE(typ.kind == ParseOutcome::Kind::Error);
  CHECK(typ.text.find("'a'") != std::string::npos);

  const auto mode = parse({"energy", "--mode", "sideways"});
  REQUIRE(mode.kind == ParseOutcome::Kind::Error);
  CHECK(mode.text.find("mode") != std::string::npos);

  const auto both = parse({"linear", "--critical", "--scan"});
  CHECK(both.kind == ParseOutcome::Kind::Error);
}

TEST_CASE("config file with an overriding flag") {
  TempFile file("cli_config_test.json", R"({"n_modes": 40, "re": 50, "dt": 0.002})");
  const auto r = parse({"evolve", "--config", file.path, "--re", "30"});
  REQUIRE(r.kind == ParseOutcome::Kind::Run);
  CHECK(r.config.n_modes == 40);
  CHECK(*r.config.re == 30.0);
  CHECK(r.config.dt == 0.002);

  TempFile bad("cli_config_bad.json", R"({"n_modes": 40, "colour": "red"})");
  const auto e = parse({"evolve", "--config", bad.path});
  REQUIRE(e.kind == ParseOutcome::Kind::Error);
  CHECK(e.text.find("colour") != std::string::npos);

  TempFile typ("cli_config_type.json", R"({"n_modes": "many"})");
  const auto t = parse({"evolve", "--config", typ.path});
  REQUIRE(t.kind == ParseOutcome::Kind::Error);
  CHECK(t.text.find("n_modes") != std::string::npos);

  TempFile broken("cli_config_broken.json", "{ not json");
  CHECK(parse({"evolve", "--config", broken.path}).kind == ParseOutcome::Kind::Error);
  CHECK(parse({"evolve", "--config", "does-not-exist.json"}).kind == ParseOutcome::Kind::Error);
}

TEST_CASE("boolean flags have negations") {
  const auto r = parse({"energy", "--no-timestamp"});
  REQUIRE(r.kind == ParseOutcome::Kind::Run);
  CHECK_FALSE(r.config.timestamp);
}

TEST_CASE("help is not an error") {
  const auto r = parse({"--help"});
  CHECK(r.kind == ParseOutcome::Kind::Help);
  CHECK(r.exit_code() == 0);
  CHECK(r.text.find("energy") != std::string::npos);
}

TEST_CASE("echo holds exactly the keys of the command") {
  const auto r = parse({"maximize", "--a", "2"});
  REQUIRE(r.kind == ParseOutcome::Kind::Run);
  const auto echo = config_echo(r.config);
  CHECK(echo["a"] == 2.0);
  CHECK(echo["command"] == "maximize");
  for (const auto& key : keys_for(Command::Maximize)) CHECK(echo.contains(key));
  CHECK_FALSE(echo.contains("dt"));
}

TEST_CASE("default full sweep grid avoids a = b = 0") {
  const auto r = parse({"sweep", "--mode", "full"});
  REQUIRE(r.kind == ParseOutcome::Kind::Run);
  CHECK(*r.config.a_min == 0.0);
  CHECK(*r.config.b_min == 0.2);
  CHECK(parse({"sweep", "--mode", "full", "--b-min", "0"}).kind == ParseOutcome::Kind::Error);
  const auto shifted = parse({"sweep", "--mode", "full", "--a-min", "0.5"});
  REQUIRE(shifted.kind == ParseOutcome::Kind::Run);
  CHECK(*shifted.config.b_min == 0.0);
}
