#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "pqlab/report_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pqlab_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string(PQLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pqlab::Json read_json(const fs::path& p) { return pqlab::Json::parse(slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = kRoot / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EigenWritesArtifacts) {
  ASSERT_EQ(run("eigen --m 2 --r 2 --domain disk:1 --h 1/16 --out " + out("e")), 0);
  for (const char* f : {"eigen.json", "domain.json", "eigen_trace.csv", "eigenfield.bin", "eigenfield.svg"})
    EXPECT_TRUE(fs::exists(dir_ / "e" / f)) << f;
  const pqlab::Json j = read_json(dir_ / "e" / "eigen.json");
  EXPECT_EQ(j["artifact_version"], pqlab::kArtifactVersion);
}

TEST_F(Cli, MalformedShapeIsConfigErrorWithoutOutput) {
  EXPECT_EQ(run("eigen --m 2 --r 2 --domain blob:3 --out " + out("bad")), 1);
  EXPECT_FALSE(fs::exists(dir_ / "bad"));
  EXPECT_EQ(run("solve --p 4 --q 4 --domain disk:1 --out " + out("bad")), 1);
  EXPECT_EQ(run("solve --nonsense 1"), 1);
  EXPECT_EQ(run("eigen --m 2 --r 2 --h 1/0 --out " + out("bad")), 1);
  EXPECT_EQ(run("solve --p 4 --q 3 --lambda 2 --lambda-mult 2 --out " + out("bad")), 1);
  EXPECT_FALSE(fs::exists(dir_ / "bad"));
}

TEST_F(Cli, GateRefusalExitsThree) {
  ASSERT_EQ(run("solve --p 4 --q 3 --r 4 --lambda-mult 0.9 --domain disk:1 --h 0.0625 --out " + out("g")), 3);
  const pqlab::Json j = read_json(dir_ / "g" / "solve.json");
  EXPECT_EQ(j["flags"]["gate_refused"], true);
  EXPECT_FALSE(fs::exists(dir_ / "g" / "field.bin"));
}

TEST_F(Cli, SolveReachesNehariManifold) {
  ASSERT_EQ(run("solve --p 4 --q 3 --r 4 --lambda-mult 2 --domain disk:1 --h 0.0625 --out " + out("s")), 0);
  const pqlab::Json j = read_json(dir_ / "s" / "solve.json");
  EXPECT_LE(j["report"]["nehari_residual"].get<double>(), 1e-8);
  EXPECT_GT(j["report"]["energy"]["total"].get<double>(), 0.0);
}

TEST_F(Cli, PLessThanQGivesNegativeEnergy) {
  ASSERT_EQ(run("solve --p 3 --q 4 --r 3 --lambda-mult 2 --domain disk:1 --h 0.0625 --out " + out("s")), 0);
  const pqlab::Json j = read_json(dir_ / "s" / "solve.json");
  EXPECT_LT(j["report"]["energy"]["total"].get<double>(), 0.0);
  EXPECT_LE(j["report"]["nehari_residual"].get<double>(), 1e-8);
}

TEST_F(Cli, RerunsAreBitIdentical) {
  const std::string args = "solve --p 4 --q 3 --r 4 --lambda-mult 2 --domain square:1 --h 0.0625 --seed 7 --out ";
  ASSERT_EQ(run(args + out("a")), 0);
  ASSERT_EQ(run(args + out("b")), 0);
  for (const char* f : {"solve.json", "solve_trace.csv", "field.bin", "solve.svg"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(Cli, ConfigFileMatchesFlags) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "run.cfg") << "p = 4\nq = 3\nr = 4\nlambda-mult = 2\ndomain = disk:1\nh = 0.0625\n";
  ASSERT_EQ(run("solve --config " + (dir_ / "run.cfg").string() + " --out " + out("c")), 0);
  ASSERT_EQ(run("solve --p 4 --q 3 --r 4 --lambda-mult 2 --domain disk:1 --h 0.0625 --out " + out("f")), 0);
  EXPECT_EQ(slurp(dir_ / "c" / "solve.json"), slurp(dir_ / "f" / "solve.json"));
  EXPECT_EQ(run("solve --config " + (dir_ / "missing.cfg").string()), 1);
}

TEST_F(Cli, InfharmAutoPuncture) {
  ASSERT_EQ(run("infharm --peak 0.25 --puncture auto --domain disk:1 --h 0.0625 --out " + out("i")), 0);
  const pqlab::Json j = read_json(dir_ / "i" / "infharm.json");
  EXPECT_LE(j["defect"].get<double>(), 1e-8);
}

TEST_F(Cli, WorkerCountDoesNotChangeOutputs) {
  const std::string args = "sweep-p --Q 0.5 --Lambda 2 --p-list 8,12 --r-top 1024 --domain disk:1 --h 1/16 --out ";
  ASSERT_EQ(run(args + out("w1") + " --workers 1"), 0);
  ASSERT_EQ(run(args + out("w3") + " --workers 3"), 0);
  for (const char* f : {"sweep.json", "sweep.csv", "field_p8.bin", "field_p12.bin"})
    EXPECT_EQ(slurp(dir_ / "w1" / f), slurp(dir_ / "w3" / f)) << f;
  EXPECT_EQ(run(args + out("bad") + " --workers -1"), 1);
}
