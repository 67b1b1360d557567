#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncclab/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ncclab::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ncclab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EndToEndPipeline) {
  ASSERT_EQ(run({"hardpoly", "--n", "2", "--d", "4", "--emit-circuit", path("c.json")}).code, 0);
  ASSERT_EQ(run({"normalize", "--in", path("c.json"), "--out", path("n.json"), "--report", path("nr.json")}).code, 0);
  const auto nr = nlohmann::json::parse(read("nr.json"));
  EXPECT_TRUE(nr["manifest"]["outcome"]["properties"].get<bool>());
  const Result tr = run({"trace", "--in", path("n.json"), "--d", "4"});
  ASSERT_EQ(tr.code, 0) << tr.err;
  const auto j = nlohmann::json::parse(tr.out);
  EXPECT_TRUE(j["result"]["verification"]["ok"].get<bool>());
  EXPECT_EQ(j["manifest"]["config"]["alpha"], "1/4");
  EXPECT_EQ(j["manifest"]["config"]["c"], 64);
  EXPECT_EQ(run({"trace", "--in", path("n.json"), "--d", "4"}).out, tr.out);
}

TEST_F(CliTest, RankCheckGates) {
  ASSERT_EQ(run({"hardpoly", "--n", "2", "--d", "4", "--emit-circuit", path("c.json")}).code, 0);
  ASSERT_EQ(run({"normalize", "--in", path("c.json"), "--out", path("n.json"), "--report", path("r.json")}).code, 0);
  const Result r = run({"rank", "--in", path("n.json"), "--a", "2", "--b", "2", "--check-gates"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["result"]["violations"], 0);
  EXPECT_EQ(j["result"]["rank"]["rank"], 4);
  EXPECT_FALSE(j["result"]["gates"].empty());
}

TEST_F(CliTest, TraceOnRawCircuitIsADomainError) {
  ASSERT_EQ(run({"hardpoly", "--n", "2", "--d", "4", "--emit-circuit", path("c.json")}).code, 0);
  const Result r = run({"trace", "--in", path("c.json"), "--d", "4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("P1..P5 required"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"trace", "--in", path("missing.json"), "--d", "2"}).code, 1);
  EXPECT_EQ(run({"hardpoly", "--n", "2", "--d", "4", "--bogus"}).code, 1);
  EXPECT_EQ(run({"hardpoly", "--n", "2", "--d", "3"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  write("bad.json", R"({"field":"Q","x_vars":1,"nodes":[{"id":0,"kind":"sum","args":[{"node":3}]}],"output":0})");
  const Result r = run({"parse", "--in", path("bad.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("3"), std::string::npos);
}

TEST_F(CliTest, GuardFromEnvironment) {
  ::setenv("NCCLAB_GUARD_ENTRIES", "10", 1);
  const Result r = run({"hardpoly", "--n", "2", "--d", "4"});
  ::unsetenv("NCCLAB_GUARD_ENTRIES");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("16 entries"), std::string::npos);
}

TEST_F(CliTest, RingTranslateAndVerify) {
  ASSERT_EQ(run({"hardpoly", "--n", "2", "--d", "2", "--emit-circuit", path("r.json"), "--emit-poly", path("f.txt"),
                 "--z-noise", "2", "--seed", "4"}).code, 0);
  const Result v = run({"verify-ring", "--in", path("r.json"), "--f", path("f.txt"), "--samples", "3"});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_TRUE(nlohmann::json::parse(v.out)["result"]["passed"].get<bool>());
  const Result t = run({"translate", "--in", path("r.json"), "--out", path("t.json")});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto j = nlohmann::json::parse(t.out);
  EXPECT_EQ(j["result"]["before"]["sums"], j["result"]["after"]["sums"]);
  EXPECT_EQ(j["result"]["polynomial"], "1 * x1.x1 + 1 * x2.x2");

  write("neg.json", R"({"field":"Q","x_vars":1,"z_vars":1,"nodes":[{"id":0,"kind":"input","var":1},
      {"id":1,"kind":"const","poly":[[1,[1]]]},{"id":2,"kind":"sum","args":[{"node":0},{"node":1}]}],"output":2})");
  write("x1.txt", "field: Q\n1 * x1\n");
  const Result neg = run({"verify-ring", "--in", path("neg.json"), "--f", path("x1.txt")});
  EXPECT_EQ(neg.code, 1);
  EXPECT_NE(neg.err.find("hypothesis fails"), std::string::npos);
}

TEST_F(CliTest, CorpusIsReproducible) {
  const Result a = run({"corpus", "--seed", "0", "--count", "10", "--out", path("a")});
  const Result b = run({"corpus", "--seed", "0", "--count", "10", "--out", path("b")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "c0009.json"));
  EXPECT_EQ(read("a/ledger.json"), read("b/ledger.json"));
  const Result empty = run({"corpus", "--seed", "0", "--count", "0", "--out", path("e")});
  EXPECT_EQ(empty.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(read("e/ledger.json"))["entries"].empty());
  const Result parsed = run({"parse", "--in", path("a/c0003.json"), "--out", path("round.json")});
  EXPECT_EQ(parsed.code, 0);
  EXPECT_EQ(read("round.json"), read("a/c0003.json"));
}

TEST_F(CliTest, EvalWritesPolynomial) {
  ASSERT_EQ(run({"hardpoly", "--n", "2", "--d", "2", "--emit-circuit", path("c.json")}).code, 0);
  const Result r = run({"eval", "--in", path("c.json"), "--out", path("p.txt")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read("p.txt"), "field: Q\n1 * x1.x1 + 1 * x2.x2\n");
}
