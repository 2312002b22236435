#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI with stdout captured to a file.
Result run(const std::string& args) {
  static int counter = 0;
  const fs::path capture = fs::temp_directory_path() /
                           ("msim_cli_" + std::to_string(::getpid()) + "_" +
                            std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + MSIM_CLI_PATH + "\" " + args + " > \"" +
                          capture.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream buf;
  buf << in.rdbuf();
  r.out = buf.str();
  fs::remove(capture);
  return r;
}

std::string fixture(const char* name) {
  return std::string("\"") + MSIM_FIXTURE_DIR + "/" + name + "\"";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / ("msim_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("predict") {
  const auto qm = run("predict --theory qm");
  CHECK(qm.code == 0);
  CHECK(qm.out.find("E(sigma)       +0.666667") != std::string::npos);
  const auto ms = run("predict --theory ms --timing t2");
  CHECK(ms.code == 2);
  CHECK(ms.out.find("INVALID") != std::string::npos);
  CHECK(ms.out.find("E(sigma)       +0.000000") != std::string::npos);
  CHECK(run("predict --theory ms --timing t2 --alpha 0.3 --beta 1.2 --gamma 2").code == 0);
  const auto dir = scratch("predict");
  CHECK(run("predict --config " + fixture("rest_t3.json") + " --out \"" + dir.string() +
            "\" --format json")
            .code == 0);
  CHECK(slurp(dir / "prediction.json").find("\"timing\": \"t3\"") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("predict --theory bohm").code == 1);
  CHECK(run("predict --timing t4").code == 1);
  CHECK(run("predict --config /nonexistent.json").code == 1);
  CHECK(run("predict --theory ms --config " + fixture("mixed.json")).code == 1);
  CHECK(run("scan --steps 1").code == 1);
  CHECK(run("simulate --bin-width 1e-9 --trials 1000 --out \"" +
            scratch("bad_bins").string() + "\"")
            .code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("classify") {
  const auto t2 = run("classify --config " + fixture("moving_t2.json"));
  CHECK(t2.code == 0);
  CHECK(t2.out.find("timing: (b11, b21 a22[11])  rule: t2") != std::string::npos);
  const auto mixed = run("classify --config " + fixture("mixed.json"));
  CHECK(mixed.code == 0);
  CHECK(mixed.out.find("Mixed") != std::string::npos);
}

TEST_CASE("simulate writes events, spectrum and estimate") {
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  const std::string args = "simulate --config " + fixture("rest_t3.json") +
                           " --trials 50000 --seed 3 --check --out ";
  CHECK(run(args + "\"" + a.string() + "\"").code == 0);
  CHECK(run(args + "\"" + b.string() + "\" --threads 4").code == 0);
  CHECK(slurp(a / "events.csv") == slurp(b / "events.csv"));
  CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
  CHECK(slurp(a / "estimate.csv").rfind("r_pp,r_pm,r_mp,r_mm,", 0) == 0);
  CHECK(run("simulate --config " + fixture("moving_t2.json") + " --trials 1000").code == 2);
  CHECK(run("simulate --config " + fixture("rest_t3.json") + " --trials 50000 --check --nsigma 1e-9")
            .code == 3);
}

TEST_CASE("scan, paradox and audit") {
  const auto scan = run("scan --config " + fixture("rest_t3.json") + " --param beta --steps 2");
  CHECK(scan.code == 0);
  CHECK(scan.out.rfind("beta,qm_e_sigma_omega,ms_t3_e_sigma_omega,ms_valid\n", 0) == 0);
  const auto paradox = run("paradox");
  CHECK(paradox.code == 0);
  CHECK(paradox.out.find("both fire                      0.2500") != std::string::npos);
  CHECK(paradox.out.find("neither fires                  0.2500") != std::string::npos);
  const auto audit = run("audit --grid 4");
  CHECK(audit.code == 0);
  CHECK(audit.out.find("VIOLATED") == std::string::npos);
}
