#include <doctest.h>

#include "cli_runner.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

json parse_summary(const CliResult& r) {
  REQUIRE_FALSE(r.out.empty());
  return json::parse(r.out);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("version") {
  const auto r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "shearstab 0.1.0\n");
}

TEST_CASE("point energy solve summary") {
  const auto r = run_cli("energy --profile couette --a 1.9 --n-modes 48 --check-modes 32");
  REQUIRE(r.exit_code == 0);
  const json s = parse_summary(r);
  CHECK(s["schema_version"] == 1);
  CHECK(s["tool"] == "shearstab");
  CHECK(s["command"] == "energy");
  CHECK(s["status"] == "ok");
  CHECK(s["timestamp"].is_string());
  CHECK(s["config"]["n_modes"] == 48);
  CHECK(s["config"]["a"] == 1.9);
  CHECK(s["residual"].get<double>() < 1e-8);
  CHECK(s["results"]["reynolds_critical"].get<double>() == doctest::Approx(44.3).epsilon(0.01));
  CHECK(s["resolution"]["check_modes"] == 32);
  CHECK(s["resolution"]["agrees"] == true);
  CHECK(s["warnings"].is_array());
}

TEST_CASE("invalid configuration exits with 2") {
  CHECK(run_cli("energy --bogus").exit_code == 2);
  CHECK(run_cli("energy --n-modes 2").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
  const auto r = run_cli("energy --profile custom --profile-file does-not-exist.txt");
  CHECK(r.exit_code == 2);
  const json s = parse_summary(r);
  CHECK(s["status"] == "error");
  CHECK(s["error"]["key"] == "profile_file");
}

TEST_CASE("numerical failure exits with 1") {
  const auto r = run_cli("maximize --profile poiseuille --a 2 --max-iters 1 --tol 1e-300");
  CHECK(r.exit_code == 1);
  const json s = parse_summary(r);
  CHECK(s["status"] == "error");
  CHECK(s["error"]["code"] == "no convergence");
}

TEST_CASE("output files and csv formats") {
  const std::string prefix = "cli_test_spectrum";
  const auto r = run_cli("linear --profile poiseuille --n-modes 48 --check-modes 0 --output " +
                         prefix);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());
  const json s = json::parse(slurp(prefix + ".json"));
  CHECK(s["results"]["growth_rate"].get<double>() > 0.0);
  CHECK(s["resolution"]["check_modes"].is_null());
  const std::string csv = slurp(prefix + ".csv");
  CHECK(csv.rfind("c_real,c_imag,growth", 0) == 0);
  std::remove((prefix + ".json").c_str());
  std::remove((prefix + ".csv").c_str());

  const auto c = run_cli("linear --profile poiseuille --n-modes 32 --check-modes 0 --format csv");
  REQUIRE(c.exit_code == 0);
  CHECK(c.out.rfind("c_real,c_imag,growth", 0) == 0);
}

TEST_CASE("custom profile file") {
  const std::string path = "cli_test_profile.txt";
  {
    std::ofstream out(path);
    out << "# couette on three nodes\n1\n0\n-1\n";
  }
  const auto r = run_cli("energy --profile custom --profile-file " + path +
                         " --a 1.9 --n-modes 40 --check-modes 0");
  std::remove(path.c_str());
  REQUIRE(r.exit_code == 0);
  CHECK(parse_summary(r)["results"]["reynolds_critical"].get<double>() ==
        doctest::Approx(44.3).epsilon(0.01));
}

TEST_CASE("maximize agrees with the eigensolver") {
  const auto r = run_cli("maximize --profile poiseuille --a 2 --n-modes 40 --check-modes 0");
  REQUIRE(r.exit_code == 0);
  const json s = parse_summary(r);
  CHECK(s["results"]["converged"] == true);
  CHECK(s["results"]["relative_difference"].get<double>() < 1e-4);
}

TEST_CASE("sweep and growth scan") {
  const auto r = run_cli(
      "sweep --profile couette --mode full --a-min 0 --a-max 1 --a-points 2 --b-min 1 --b-max 2 "
      "--b-points 2 --n-modes 32 --check-modes 24 --format json");
  REQUIRE(r.exit_code == 0);
  const json s = parse_summary(r);
  CHECK(s["results"]["points"] == 4);

  const auto scan = run_cli(
      "linear --scan --profile couette --a-min 0.5 --a-max 2 --a-points 3 --re-points 2 "
      "--n-modes 32 --check-modes 0 --format json");
  REQUIRE(scan.exit_code == 0);
  CHECK(parse_summary(scan)["results"]["unstable"] == false);
}

TEST_CASE("short evolution") {
  const auto r = run_cli(
      "evolve --profile couette --re 40 --n-modes 32 --check-modes 0 --nx 16 --dt 0.002 "
      "--t-final 0.4 --sample-every 20 --format json");
  REQUIRE(r.exit_code == 0);
  const json s = parse_summary(r);
  CHECK(s["results"]["decay_bound"]["satisfied"] == true);
  CHECK(s["results"]["energy_final"].get<double>() < s["results"]["energy_initial"].get<double>());
}

TEST_CASE("output is deterministic without a timestamp") {
  const std::string args =
      "energy --profile poiseuille --search --n-modes 32 --check-modes 24 --no-timestamp "
      "--format json";
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(parse_summary(first)["timestamp"].is_null());
}
