#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

// PSCE_CLI_PATH is injected by the build as the path to the psce binary.
int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(PSCE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("psce_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("scenario run succeeds and writes artifacts") {
  fs::path out = fresh_dir("trivial");
  CHECK(run_cli("evolve --scenario TRIVIAL_ODE --out " + out.string()) == 0);
  for (const char* f :
       {"config.json", "trajectory.csv", "series.csv", "diagnostics.json"})
    CHECK(fs::exists(out / f));

  // report consumes the directory it just wrote.
  CHECK(run_cli("report " + out.string()) == 0);
  fs::remove_all(out);
}

TEST_CASE("malformed configs exit nonzero and leave no artifacts") {
  fs::path out = fresh_dir("bad");

  fs::path cfg = fs::temp_directory_path() / "psce_cli_bad.json";
  std::ofstream(cfg) << "{this is not json";
  CHECK(run_cli("evolve --config " + cfg.string() + " --out " + out.string()) !=
        0);
  CHECK_FALSE(fs::exists(out));

  std::ofstream(cfg) << R"({"scenario": "NO_SUCH", "points": 16})";
  CHECK(run_cli("evolve --config " + cfg.string() + " --out " + out.string()) !=
        0);
  CHECK_FALSE(fs::exists(out));

  CHECK(run_cli("evolve --config /does/not/exist.json --out " + out.string()) !=
        0);
  CHECK_FALSE(fs::exists(out));
  fs::remove(cfg);
}

TEST_CASE("identical config and seed reproduce byte-identical artifacts") {
  fs::path a = fresh_dir("det_a");
  fs::path b = fresh_dir("det_b");
  const std::string common = "csf --scenario CSF_CIRCLE --seed 7 --out ";
  CHECK(run_cli(common + a.string()) == 0);
  CHECK(run_cli(common + b.string()) == 0);
  CHECK(slurp(a / "diagnostics.json") == slurp(b / "diagnostics.json"));
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("stationary and extend subcommands write their artifacts") {
  fs::path s = fresh_dir("stationary");
  CHECK(run_cli("stationary --scenario CUSTOM --out " + s.string()) == 0);
  CHECK(fs::exists(s / "omega.csv"));
  CHECK(fs::exists(s / "stationary.json"));
  fs::remove_all(s);

  fs::path e = fresh_dir("extend");
  CHECK(run_cli("extend --scenario TRIVIAL_ODE --out " + e.string()) == 0);
  CHECK(fs::exists(e / "extension.json"));
  fs::remove_all(e);
}

TEST_CASE("report on a directory without artifacts fails") {
  fs::path out = fresh_dir("empty");
  fs::create_directories(out);
  CHECK(run_cli("report " + out.string()) != 0);
  fs::remove_all(out);
}

TEST_CASE("unknown subcommands and missing arguments fail") {
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("report") != 0);  // run_dir is required
  CHECK(run_cli("") != 0);        // a subcommand is required
}
