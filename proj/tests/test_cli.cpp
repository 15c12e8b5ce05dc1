// End-to-end runs of the command-line tool.
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "learnpath_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LEARNPATH_CLI_PATH + "\" " + args + " >" + (kRoot / "stdout").string() +
                          " 2>" + (kRoot / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Fresh {
  Fresh() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
};

}  // namespace

TEST_CASE("identical config and seed give byte-identical CSVs") {
  Fresh fresh;
  const std::string out1 = (kRoot / "a").string(), out2 = (kRoot / "b").string();
  const std::string args = "train --dataset two_moons --max_steps 80 --seed 3 --out ";
  REQUIRE(run_cli(args + out1) == 0);
  REQUIRE(run_cli(args + out2) == 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(out1)) {
    if (entry.path().extension() != ".csv") continue;
    CHECK(slurp(entry.path()) == slurp(fs::path(out2) / entry.path().filename()));
    ++compared;
  }
  CHECK(compared == 3);

  REQUIRE(run_cli("train --dataset two_moons --max_steps 80 --seed 4 --out " + (kRoot / "c").string()) == 0);
  CHECK(slurp(kRoot / "c" / "train_sgd.csv") != slurp(fs::path(out1) / "train_sgd.csv"));
}

TEST_CASE("every subcommand writes a manifest") {
  Fresh fresh;
  const char* cmds[] = {
      "trajectory --segments 100 --horizon 10",
      "momentum",
      "geometry --samples 50",
      "adaptive --ou_steps 20000 --horizon_factor 1",
      "continual --duration 20 --duration2 20",
      "train --max_steps 20",
      "verify --only 5,6",
  };
  for (const char* c : cmds) {
    const std::string name = std::string(c).substr(0, std::string(c).find(' '));
    const fs::path out = kRoot / name;
    CAPTURE(c);
    CHECK(run_cli(std::string(c) + " --out " + out.string()) == 0);
    const std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("\"experiment\": \"" + name + "\"") != std::string::npos);
    CHECK(manifest.find("\"reproduces\"") != std::string::npos);
    CHECK(manifest.find("\"wall_time_seconds\"") != std::string::npos);
  }
}

TEST_CASE("flags override the config file") {
  Fresh fresh;
  {
    std::ofstream cfg(kRoot / "m.cfg");
    cfg << "# sweep\ngammas = 0,3\nsamples = 10\n";
  }
  const fs::path out = kRoot / "m";
  REQUIRE(run_cli("momentum --config " + (kRoot / "m.cfg").string() + " --samples 4 --out " + out.string()) == 0);
  const std::string traces = slurp(out / "momentum_traces.csv");
  CHECK(traces.find("\n3,") != std::string::npos);
  // 2 gammas × 5 samples + header
  CHECK(std::count(traces.begin(), traces.end(), '\n') == 11);
}

TEST_CASE("exit codes") {
  Fresh fresh;
  const std::string out = " --out " + (kRoot / "x").string();
  CHECK(run_cli("momentum --not_a_key 1" + out) == 1);
  CHECK(run_cli("momentum --gammas 0,x" + out) == 1);
  CHECK(slurp(kRoot / "stderr").find("gammas") != std::string::npos);
  {
    std::ofstream cfg(kRoot / "bad.cfg");
    cfg << "eta = 1\nbogus = 2\n";
  }
  CHECK(run_cli("momentum --config " + (kRoot / "bad.cfg").string() + out) == 1);
  CHECK(slurp(kRoot / "stderr").find("bad.cfg:2") != std::string::npos);
  CHECK(run_cli("momentum --config " + (kRoot / "missing.cfg").string() + out) == 1);
  CHECK(run_cli("train --dataset idx --idx_images /nonexistent --idx_labels /nonexistent" + out) == 1);
  CHECK(run_cli("plot" + out) == 1);
  CHECK(run_cli("") == 1);

  CHECK(run_cli("train --optimizers sgd --eta_sgd 1e200" + out) == 2);
  const std::string err = slurp(kRoot / "stderr");
  CHECK(err.find("train") != std::string::npos);
  CHECK(err.find("non-finite") != std::string::npos);

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--version") == 0);
  CHECK(slurp(kRoot / "stdout").find("0.1.0") != std::string::npos);
}
