#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vlab/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = vlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("vlab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bifurcate prints the sequence as JSON") {
  const auto r = run({"bifurcate", "--b", "0.2805", "--kmax", "3"});
  REQUIRE(r.code == vlab::cli::kExitOk);
  const auto doc = json::parse(r.out);
  REQUIRE(doc["h_values"].size() == 3);
  CHECK(std::abs(doc["h_values"][0].get<double>() - 0.9598) < 5e-3);
  CHECK(std::abs(doc["h_values"][1].get<double>() - 0.8568) < 5e-3);
  CHECK(std::abs(doc["h_values"][2].get<double>() - 0.8096) < 5e-3);
  CHECK(doc["b"].get<double>() == 0.2805);
}

TEST_CASE("bifurcate writes CSV alongside") {
  const auto dir = scratch_dir("bif");
  const auto csv = dir / "seq.csv";
  const auto r = run({"bifurcate", "--b", "0.3", "--kmax", "2", "--csv", csv.string()});
  REQUIRE(r.code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("k,h,tolerance,gap\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("usage and validation errors exit with 1") {
  auto r = run({"bifurcate", "--bogus", "1"});
  CHECK(r.code == vlab::cli::kExitValidation);
  CHECK(json::parse(r.err.substr(0, r.err.find('\n')))["error"] == "usage");
  CHECK(r.err.find("--kmax") != std::string::npos);

  r = run({"topology", "--b", "0.9", "--h", "0.5"});
  CHECK(r.code == vlab::cli::kExitValidation);
  CHECK(json::parse(r.err)["error"] == "validation");

  r = run({"scaling", "--b", "0.2805", "--window", "70,20"});
  CHECK(r.code == vlab::cli::kExitValidation);

  r = run({"field", "--format", "png"});
  CHECK(r.code == vlab::cli::kExitValidation);

  r = run({});
  CHECK(r.code == vlab::cli::kExitValidation);
}

TEST_CASE("numerical failures exit with 2") {
  const auto r = run({"topology", "--h", "0.959831510371"});
  CHECK(r.code == vlab::cli::kExitNumerical);
  const auto doc = json::parse(r.err);
  CHECK(doc["error"] == "degenerate");
  CHECK(doc["message"].get<std::string>().find("bifurcation") != std::string::npos);

  CHECK(run({"bifurcate", "--b", "0.5"}).code == vlab::cli::kExitNumerical);
}

TEST_CASE("help exits with 0") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("bifurcate") != std::string::npos);
  CHECK(run({"evolve", "--help"}).code == 0);
}

TEST_CASE("field output formats") {
  const auto dir = scratch_dir("field");
  const auto svg = dir / "psi.svg";
  auto r = run({"field", "--nx", "41", "--ny", "41", "--out", svg.string()});
  REQUIRE(r.code == 0);
  const auto text = slurp(svg);
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(text.find("stroke-width=\"2.4\"") != std::string::npos);

  r = run({"field", "--nx", "3", "--ny", "2", "--window", "0,1,0.3,0.4", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);

  r = run({"field", "--nx", "3", "--ny", "2", "--window", "0,1,0.3,0.4", "--quantity", "velocity", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["vx"].size() == 6);

  r = run({"field", "--source", "finite", "--nx", "5", "--ny", "5", "--format", "json"});
  CHECK(r.code == 0);
}

TEST_CASE("config file with flag overrides") {
  const auto dir = scratch_dir("config");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# street geometry\nb = 0.2805\nh = 0.9\nbig_n = 150\n";
  auto r = run({"topology", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["k"] == 2);
  r = run({"topology", "--config", cfg.string(), "--h", "1.2"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["k"] == 1);
  CHECK(run({"topology", "--config", (dir / "missing.cfg").string()}).code == vlab::cli::kExitValidation);
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"stagnation", "--h", "0.9", "--format", "json"};
  const auto first = run(args);
  REQUIRE(first.code == 0);
  CHECK(run(args).out == first.out);
  const auto doc = json::parse(first.out);
  CHECK(doc["points"].size() >= 2);
}

TEST_CASE("equilibrium CSV") {
  const auto r = run({"equilibrium", "--hs", "0.3,0.7", "--n-list", "0,1,2"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "h,two_n_plus_one,u_n");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 6);
}

TEST_CASE("separatrix, curves, scaling and report run") {
  auto r = run({"separatrix", "--h", "1.2", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("saddle,", 0) == 0);
  r = run({"curves", "--bmin", "0.3", "--bmax", "0.5", "--increments", "2", "--kmax", "2", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto curves = json::parse(r.out);
  CHECK(curves["points"].size() == 3);
  r = run({"scaling", "--b", "0.4", "--kmax", "30", "--window", "5,25"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["delta"].get<double>() > 1.0);
  r = run({"report"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["topology"]["k"] == 1);
}

TEST_CASE("small evolve run writes snapshots and the conserved log") {
  const auto dir = scratch_dir("evolve");
  const auto r = run({"evolve", "--n-streets", "3", "--per-row", "4", "--t-end", "1", "--snapshots", "0,0.5,1",
                      "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto summary = json::parse(r.out);
  CHECK(summary["completed"] == true);
  CHECK(summary["hamiltonian_relative_drift"].get<double>() < 1e-6);
  for (const char* name : {"snapshot_t0.csv", "snapshot_t0.5.csv", "snapshot_t1.csv", "conserved.json"})
    CHECK(fs::exists(dir / name));
  const auto snap = slurp(dir / "snapshot_t1.csv");
  CHECK(snap.rfind("p,n,strength,x,y\n", 0) == 0);
  CHECK(std::count(snap.begin(), snap.end(), '\n') == 25);
  const auto log = json::parse(slurp(dir / "conserved.json"));
  CHECK(log.size() == 3);
}
