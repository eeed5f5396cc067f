#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "kirchdelay/cli.hpp"

using namespace kirchdelay;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("kirchdelay_test_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return (dir / file).string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> summary_of(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

int data_rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("shipped scenario validates") {
  Scratch s("validate");
  CliOptions o;
  o.config = s.write("default.ini", "");
  std::ostringstream out, err;
  CHECK(cmd_validate(o, out, err) == exit_ok);
  CHECK(out.str().find("valid") != std::string::npos);
}

TEST_CASE("excess delayed gain fails validation and names the gain condition") {
  Scratch s("gain");
  CliOptions o;
  o.config = s.write("gain.ini", "[problem]\nmu1 = 1\nmu2 = 2\n");
  std::ostringstream out, err;
  CHECK(cmd_validate(o, out, err) == exit_invalid);
  CHECK(err.str().find("A4.gain") != std::string::npos);
}

TEST_CASE("malformed kernel section is a parse error naming the section") {
  Scratch s("parse");
  CliOptions o;
  o.config = s.write("bad.ini", "[kernel]\nh0 = 0.4.1\n");
  std::ostringstream out, err;
  CHECK(cmd_validate(o, out, err) == exit_error);
  CHECK(err.str().find("[kernel]") != std::string::npos);
}

TEST_CASE("zero horizon gives one row and no decay fit") {
  Scratch s("t0");
  CliOptions o;
  o.config = s.write("t0.ini", "[numerics]\nT = 0\n");
  o.out = (s.dir / "out").string();
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == exit_ok);
  CHECK(data_rows(s.dir / "out" / "trajectory.tsv") == 1);
  CHECK(summary_of(s.dir / "out" / "summary.txt")["decay_fit"].rfind("not applicable", 0) == 0);
}

TEST_CASE("run writes a trajectory with the documented columns") {
  Scratch s("run");
  CliOptions o;
  o.config = s.write("short.ini", "[numerics]\nT = 1.5\nn_modes = 4\n[output]\nstride = 10\n");
  o.out = (s.dir / "out").string();
  o.seed_free = true;
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == exit_ok);
  const std::string text = slurp(s.dir / "out" / "trajectory.tsv");
  CHECK(text.find("t\ta1\ta2\ta3\ta4\tv1") != std::string::npos);
  CHECK(text.find("E_total\tidentity_residual\tdissipation_margin\tphi\tpsi\tupsilon\tF") !=
        std::string::npos);
  CHECK(data_rows(s.dir / "out" / "trajectory.tsv") == 301);
  auto summary = summary_of(s.dir / "out" / "summary.txt");
  CHECK(summary["decay_fit"] == "applicable");
  CHECK(summary["validation"] == "pass");
  CHECK(summary["seed_free"].rfind("yes", 0) == 0);
  CHECK(summary.count("max_identity_residual") == 1);
  CHECK(summary.count("k0") == 1);
}

TEST_CASE("run refuses an invalid scenario unless forced") {
  Scratch s("force");
  CliOptions o;
  o.config = s.write("bad.ini", "[problem]\nmu2 = 1.2\n[numerics]\nT = 0.5\nn_modes = 3\n");
  o.out = (s.dir / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_run(o, out, err) == exit_invalid);
  CHECK_FALSE(fs::exists(s.dir / "out" / "summary.txt"));
  o.force = true;
  CHECK(cmd_run(o, out, err) == exit_ok);
  auto summary = summary_of(s.dir / "out" / "summary.txt");
  CHECK(summary["monotonicity"] == "monotonicity not guaranteed");
  CHECK(summary["validation"] == "fail");
  CHECK(std::stod(summary["theta1"]) < 0.0);
}

TEST_CASE("identical configs give bit-identical trajectory files") {
  Scratch s("determinism");
  CliOptions o;
  o.config = s.write("c.ini", "[numerics]\nT = 0.5\nn_modes = 4\n");
  std::ostringstream out, err;
  o.out = (s.dir / "a").string();
  REQUIRE(cmd_run(o, out, err) == exit_ok);
  o.out = (s.dir / "b").string();
  REQUIRE(cmd_run(o, out, err) == exit_ok);
  CHECK(slurp(s.dir / "a" / "trajectory.tsv") == slurp(s.dir / "b" / "trajectory.tsv"));
}

TEST_CASE("sweep output does not depend on the number of workers") {
  Scratch s("sweep");
  CliOptions o;
  o.config = s.write("sweep.ini",
                     "[sweep]\nproblem.mu2 = 0.5, 0, 0.25\nproblem.tau = 0.5, 0.25\n"
                     "[numerics]\nT = 0.5\nn_modes = 3\n");
  std::ostringstream out, err;
  o.jobs = 1;
  o.out = (s.dir / "serial").string();
  REQUIRE(cmd_sweep(o, out, err) == exit_ok);
  o.jobs = 4;
  o.out = (s.dir / "parallel").string();
  REQUIRE(cmd_sweep(o, out, err) == exit_ok);
  const std::string a = slurp(s.dir / "serial" / "sweep.tsv");
  CHECK(a == slurp(s.dir / "parallel" / "sweep.tsv"));
  CHECK(data_rows(s.dir / "serial" / "sweep.tsv") == 6);
  // rows sorted numerically by the first axis
  CHECK(a.find("\n0\t") < a.find("\n0.25\t"));
  CHECK(a.find("\n0.25\t") < a.find("\n0.5\t"));
}

TEST_CASE("sweep flags and skips assumption-violating points unless forced") {
  Scratch s("sweep_force");
  CliOptions o;
  o.config = s.write("sweep.ini", "[sweep]\nproblem.mu2 = 0.4, 1.2\n[numerics]\nT = 1.5\n"
                                  "n_modes = 3\n");
  o.out = (s.dir / "plain").string();
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(o, out, err) == exit_ok);
  const std::string plain = slurp(s.dir / "plain" / "sweep.tsv");
  CHECK(plain.find("1.2\tfail\tfail\tyes\tskipped") != std::string::npos);
  o.force = true;
  o.out = (s.dir / "forced").string();
  REQUIRE(cmd_sweep(o, out, err) == exit_ok);
  const std::string forced = slurp(s.dir / "forced" / "sweep.tsv");
  CHECK(forced.find("1.2\tfail\tfail\tyes\tok") != std::string::npos);
}

TEST_CASE("a sweep without axes is one point matching the run summary") {
  Scratch s("sweep_single");
  const std::string body = "[numerics]\nT = 1.5\nn_modes = 3\n";
  CliOptions o;
  o.config = s.write("sweep.ini", "[sweep]\njobs = 1\n" + body);
  o.out = (s.dir / "sweep").string();
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(o, out, err) == exit_ok);
  CHECK(data_rows(s.dir / "sweep" / "sweep.tsv") == 1);
  CliOptions r;
  r.config = s.write("run.ini", body);
  r.out = (s.dir / "run").string();
  REQUIRE(cmd_run(r, out, err) == exit_ok);
  auto point = summary_of(s.dir / "sweep" / "points" / "point_0.txt");
  auto run = summary_of(s.dir / "run" / "summary.txt");
  CHECK(point["k"] == run["k"]);
  CHECK(point["K"] == run["K"]);
  CHECK(point["max_identity_residual"] == run["max_identity_residual"]);
}

}
