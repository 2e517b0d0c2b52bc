#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bcl/experiment.hpp"

using namespace bcl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig tiny(const fs::path& out) {
  ExperimentConfig c = parse_experiment(
      "beta = 3\nlambda = 2\nn = 8\nkappa = 1/2\ndelta = 0\nT = 0.05\nsamples = 2\n"
      "testfns = sdir:odd-gauss:1, s:gauss:1\nreplicas = 3\nseed = 42\n");
  c.out_dir = out.string();
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bcl_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("experiment config parsing and errors with field paths") {
  const ExperimentConfig c = parse_experiment("beta = 2\nsweep.delta = -2, 0, 2\nreplicas = 4\n");
  CHECK(c.model.beta == 2.0);
  CHECK(c.delta_axis == std::vector<double>{-2, 0, 2});
  CHECK(c.replicas == 4);
  try {
    parse_experiment("beta = 2\nsweep.kapa = 1\n", "run.cfg");
    FAIL("typo accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sweep.kapa") != std::string::npos);
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
  }
  try {
    parse_experiment("beta = 2\nbeta_ok = 1\nlambda = -3\n", "run.cfg");
    FAIL("bad input accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("run.cfg") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_experiment("replicas = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment("testfns = s:nope:1\n"), ConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
  ExperimentConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  b.model.delta = 0.5;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("run_jobs keeps job order and rethrows the first failure") {
  const auto v = run_jobs<int>(50, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  CHECK_THROWS_WITH(run_jobs<int>(10,
                                  [](std::size_t i) -> int {
                                    if (i == 3 || i == 7)
                                      throw std::runtime_error("job " + std::to_string(i));
                                    return 0;
                                  }),
                    "job 3");
  CHECK(replica_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST_CASE("regime labels") {
  CHECK(theory_dynamics(0.5) == "SBE");
  CHECK(theory_dynamics(1.0) == "OU");
  CHECK(theory_space(2.0) == "S");
  CHECK(theory_space(0.0) == "S_Dir");
  CHECK(theory_space(-2.0) == "S_0");
  CHECK(empirical_dynamics(0.0) == "SBE");
  CHECK(empirical_dynamics(-1.0) == "OU");
  CHECK(empirical_space(0.0) == "S");
  CHECK(empirical_space(-1.0) == "S_Dir");
  CHECK(empirical_space(-3.0) == "S_0");
}

TEST_CASE("simulate is deterministic and resume reproduces it") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  REQUIRE(cmd_simulate(tiny(a), false).ok);
  REQUIRE(cmd_simulate(tiny(b), false).ok);
  for (int r = 0; r < 3; ++r) {
    const std::string name = "observations_r000" + std::to_string(r) + ".jsonl";
    CHECK(slurp(a / name) == slurp(b / name));
  }
  // drop one replica and truncate another, then resume
  fs::remove(b / "observations_r0001.jsonl");
  {
    const std::string text = slurp(b / "observations_r0002.jsonl");
    std::ofstream(b / "observations_r0002.jsonl", std::ios::binary) << text.substr(0, text.size() / 2);
  }
  const CommandResult res = cmd_simulate(tiny(b), true);
  CHECK(res.summary["reused"] == 1);
  for (int r = 0; r < 3; ++r) {
    const std::string name = "observations_r000" + std::to_string(r) + ".jsonl";
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(res.summary["config_hash"] == cmd_simulate(tiny(a), true).summary["config_hash"]);

  const CommandResult an = cmd_analyze({a.string()}, a.string());
  CHECK(an.ok);
  CHECK(fs::exists(a / "analyze.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("selftest passes") {
  const CommandResult r = cmd_selftest(20240601);
  CHECK(r.ok);
}
