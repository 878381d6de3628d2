#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(RKCERT_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rkcert_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DeterminantOfIdentity) {
  const auto id3 = write("id3.mat", "3 3 131071\n1 0 0\n0 1 0\n0 0 1\n");
  const auto o = cli("run det " + id3);
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("verdict: accept"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("det: 1"), std::string::npos) << o.out;
}

TEST_F(Cli, ColumnProfileMatchesOracle) {
  const auto a = write("a.mat", "3 4 7\n0 2 0 1\n0 4 0 2\n3 1 0 0\n");
  const auto o = cli("run crp " + a + " --json");
  ASSERT_EQ(o.code, 0) << o.out;
  const auto j = json::parse(o.out);
  const auto want = rkcert::oracle::oracle_crp(rkcert::la::parse_matrix(read(a)));
  std::vector<std::size_t> one_based;
  for (auto c : want.indices) one_based.push_back(c + 1);
  EXPECT_EQ(j["result"]["profile"].get<std::vector<std::size_t>>(), one_based);
  EXPECT_EQ(j["meter"]["verifier_matvecs"], 2);
}

TEST_F(Cli, ReportSchemaAndDeterminism) {
  const auto a = write("a.mat", "2 2 131071\n1 2\n3 4\n");
  const auto x = cli("run grp " + a + " --json --seed 7");
  const auto y = cli("run grp " + a + " --json --seed 7");
  ASSERT_EQ(x.code, 0);
  EXPECT_EQ(x.out, y.out);
  const auto j = json::parse(x.out);
  for (const char* key : {"protocol", "m", "n", "p", "seed", "verdict", "cause", "meter"})
    EXPECT_TRUE(j.contains(key)) << key;
  for (const char* key : {"elements_prover_to_verifier", "elements_verifier_to_prover", "integers_sent",
                          "verifier_matvecs", "verifier_field_ops"})
    EXPECT_TRUE(j["meter"].contains(key)) << key;
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["verdict"], "accept");
}

TEST_F(Cli, GrpWithoutGenericProfileAborts) {
  const auto swap2 = write("swap2.mat", "2 2 131071\n0 1\n1 0\n");
  const auto o = cli("run grp " + swap2 + " --json");
  EXPECT_EQ(o.code, 2);
  const auto j = json::parse(o.out);
  EXPECT_EQ(j["verdict"], "abort");
  EXPECT_EQ(j["cause"], "NoGrpWitness");
}

TEST_F(Cli, UsageAndFileErrors) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("run det " + path("missing.mat")).code, 2);
  EXPECT_EQ(cli("run nope " + write("a.mat", "1 1 7\n3\n")).code, 2);
  EXPECT_EQ(cli("run det " + write("bad.mat", "2 2 7\n1 2\n")).code, 2);
  EXPECT_EQ(cli("run det " + write("rect.mat", "1 2 7\n1 2\n")).code, 2);
  EXPECT_EQ(cli("run tri-equiv " + path("a.mat")).code, 2);
}

TEST_F(Cli, RankProtocolsAndSides) {
  const auto a = write("a.mat", "3 2 7\n1 0\n0 1\n1 1\n");
  const auto b = write("b.mat", "3 2 7\n2 0\n5 3\n0 3\n");
  EXPECT_EQ(cli("run tri-equiv " + a + " --rhs " + b).code, 0);
  EXPECT_EQ(cli("run tri-equiv " + a + " --rhs " + b + " --side upper").code, 2);
  EXPECT_EQ(cli("run rank-upper " + a + " --claim 2").code, 0);
  EXPECT_EQ(cli("run rank-upper " + a + " --claim 1").code, 2);
  EXPECT_EQ(cli("run rank-lower " + a).code, 0);
  const auto sq = write("sq.mat", "2 2 7\n1 2\n3 4\n");
  EXPECT_EQ(cli("run freivalds " + sq + " --rhs " + sq + " --repetitions 3").code, 0);
}

TEST_F(Cli, ModulusReducesEntries) {
  const auto a = write("a.mat", "2 2 131071\n8 0\n0 9\n");
  const auto j = json::parse(cli("run det " + a + " --modulus 7 --json").out);
  EXPECT_EQ(j["p"], 7);
  EXPECT_EQ(j["result"]["determinant"], 2);
}

TEST_F(Cli, GeneratorKinds) {
  for (const std::string kind : {"identity", "swap", "antidiag", "random", "nonsingular"}) {
    const auto o = cli("gen " + kind + " 4 --modulus 7 --seed 3");
    ASSERT_EQ(o.code, 0) << kind;
    const auto a = rkcert::la::parse_matrix(o.out);
    EXPECT_EQ(a.rows(), 4u);
    EXPECT_EQ(a.field().modulus(), 7u);
    if (kind == "nonsingular" || kind == "identity" || kind == "antidiag") {
      EXPECT_EQ(rkcert::oracle::oracle_rank(a), 4u) << kind;
    }
  }
  const auto o = cli("gen rankdef 5 6 --rank 2 --seed 1");
  const auto a = rkcert::la::parse_matrix(o.out);
  EXPECT_EQ(a.cols(), 6u);
  EXPECT_EQ(rkcert::oracle::oracle_rank(a), 2u);
  EXPECT_EQ(cli("gen rankdef 5 6 --seed 1 --rank 2").out, o.out);
  EXPECT_EQ(cli("gen spiral 3").code, 2);
  EXPECT_EQ(cli("gen random 3 -o " + path("g.mat")).code, 0);
  EXPECT_EQ(rkcert::la::parse_matrix(read(path("g.mat"))).rows(), 3u);
}

TEST_F(Cli, SealCheckRoundTrip) {
  ASSERT_EQ(cli("gen random 8 --seed 5 -o " + path("r.mat")).code, 0);
  for (const std::string p : {"rpm", "crp", "det", "rank-lower", "rpm-static"}) {
    const auto blob = path(p + ".cert");
    ASSERT_EQ(cli("seal " + p + " " + path("r.mat") + " -o " + blob).code, 0) << p;
    const auto o = cli("check " + p + " " + path("r.mat") + " " + blob + " --json");
    EXPECT_EQ(o.code, 0) << p << o.out;
    EXPECT_EQ(json::parse(o.out)["verdict"], "accept");
  }
}

TEST_F(Cli, CheckRefusesDamagedCertificates) {
  ASSERT_EQ(cli("gen nonsingular 8 --seed 6 -o " + path("r.mat")).code, 0);
  ASSERT_EQ(cli("seal det " + path("r.mat") + " -o " + path("c")).code, 0);
  auto bytes = read(path("c"));
  bytes[bytes.size() / 2] ^= 0x5a;
  std::ofstream(path("flipped"), std::ios::binary) << bytes;
  EXPECT_NE(cli("check det " + path("r.mat") + " " + path("flipped")).code, 0);

  std::ofstream(path("empty"), std::ios::binary).flush();
  const auto o = cli("check det " + path("r.mat") + " " + path("empty") + " --json");
  EXPECT_EQ(o.code, 2);
  EXPECT_EQ(json::parse(o.out)["cause"], "MalformedCertificate");
  EXPECT_EQ(cli("check ldup " + path("r.mat") + " " + path("c")).code, 2);
  EXPECT_EQ(cli("check det " + path("r.mat") + " " + path("nothing")).code, 2);
}

TEST_F(Cli, AttackReports) {
  const auto o = cli("attack crp-shift --trials 2000 --seed 3 --json");
  EXPECT_EQ(o.code, 0);
  const auto j = json::parse(o.out);
  EXPECT_EQ(j["p"], 101);
  EXPECT_EQ(j["trials"], 2000);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(cli("attack scale-d --trials 2000 --modulus 7").code, 0);
  EXPECT_EQ(cli("attack crp-shift --trials 0").code, 2);
  EXPECT_EQ(cli("attack nobody --trials 10").code, 2);
}

TEST_F(Cli, BenchSmall) {
  const auto o = cli("bench 16 --repeat 1 --json");
  ASSERT_EQ(o.code, 0);
  const auto j = json::parse(o.out);
  EXPECT_EQ(j["n"], 16);
  EXPECT_TRUE(j.contains("pluq_seconds"));
  EXPECT_EQ(cli("bench 1 --repeat 1").code, 0);
  EXPECT_EQ(cli("bench 5000").code, 2);
  EXPECT_EQ(cli("bench 0").code, 2);
}
