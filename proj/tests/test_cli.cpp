#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pado_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome run(const std::string& args) const {
    const std::string cmd = std::string(PADO_CLI_PATH) + " " + args + " 2>/dev/null";
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  void make_oracle(const std::string& extra = "") {
    ASSERT_EQ(run("generate --kind grid --rows 12 --cols 12 --lengths uniform --seed 3 --out " + path("g.txt")).status, 0);
    ASSERT_EQ(run("build " + path("g.txt") + " --epsilon 0.5 --c-ell 0.3 --out " + path("o.bin") + " " + extra).status, 0);
  }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST_F(Cli, GenerateIsDeterministic) {
  ASSERT_EQ(run("generate --kind delaunay -n 200 --seed 5 --out " + path("a.txt")).status, 0);
  ASSERT_EQ(run("generate --kind delaunay -n 200 --seed 5 --out " + path("b.txt")).status, 0);
  EXPECT_EQ(slurp("a.txt"), slurp("b.txt"));
  EXPECT_EQ(run("generate --kind delaunay -n 200 --seed 5").out, slurp("a.txt"));
  EXPECT_EQ(run("generate --kind hexagon").status, 2);
}

TEST_F(Cli, BuildIsBitIdentical) {
  make_oracle();
  const std::string first = slurp("o.bin");
  ASSERT_EQ(run("build " + path("g.txt") + " --epsilon 0.5 --c-ell 0.3 --out " + path("o2.bin")).status, 0);
  EXPECT_EQ(first, slurp("o2.bin"));
  EXPECT_FALSE(first.empty());
}

TEST_F(Cli, BuildRejectsBadEpsilon) {
  ASSERT_EQ(run("generate --rows 4 --cols 4 --out " + path("g.txt")).status, 0);
  EXPECT_EQ(run("build " + path("g.txt") + " --epsilon 0 --out " + path("o.bin")).status, 2);
  EXPECT_EQ(run("build " + path("g.txt") + " --epsilon -1 --out " + path("o.bin")).status, 2);
  EXPECT_EQ(run("build " + path("missing.txt") + " --out " + path("o.bin")).status, 1);
}

TEST_F(Cli, QueryPairsFile) {
  ASSERT_EQ(run("generate --rows 5 --cols 5 --out " + path("g.txt")).status, 0);
  ASSERT_EQ(run("build " + path("g.txt") + " --out " + path("o.bin")).status, 0);
  {
    std::ofstream pairs(path("pairs.txt"));
    pairs << "3 3\n0 1\n0 5\n";
  }
  const Outcome r = run("query " + path("o.bin") + " --pairs " + path("pairs.txt"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out), (std::vector<std::string>{"3 3 0", "0 1 1", "0 5 1"}));
  {
    std::ofstream pairs(path("bad.txt"));
    pairs << "0 99\n";
  }
  EXPECT_EQ(run("query " + path("o.bin") + " --pairs " + path("bad.txt")).status, 1);
}

TEST_F(Cli, RandomQueriesRepeatWithSeed) {
  make_oracle();
  const Outcome a = run("query " + path("o.bin") + " --random 50 --seed 9");
  const Outcome b = run("query " + path("o.bin") + " --random 50 --seed 9 --threads 3");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 50u);
}

TEST_F(Cli, VerifyReportsStretch) {
  make_oracle();
  const Outcome r = run("verify " + path("o.bin") + " " + path("g.txt") + " -k 300 --seed 2");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"violations\":0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("max_stretch"), std::string::npos);
  EXPECT_EQ(run("verify " + path("o.bin") + " " + path("g.txt") + " -k 0").status, 0);
}

TEST_F(Cli, CorruptOracleFails) {
  make_oracle();
  std::string bytes = slurp("o.bin");
  bytes.resize(bytes.size() / 2);
  {
    std::ofstream out(path("cut.bin"), std::ios::binary);
    out << bytes;
  }
  EXPECT_EQ(run("query " + path("cut.bin") + " --random 3").status, 1);
  EXPECT_EQ(run("stats " + path("cut.bin")).status, 1);
}

TEST_F(Cli, BenchCsv) {
  const Outcome r = run("bench --kind grid --sizes 100,400 --epsilon 0.5,1 --queries 20");
  ASSERT_EQ(r.status, 0);
  const std::vector<std::string> rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "n,epsilon,c_ell,build_s,query_us_mean,bytes,connections,max_stretch");
  EXPECT_EQ(rows[1].rfind("100,0.5,", 0), 0u) << rows[1];
}

TEST_F(Cli, StatsHistograms) {
  make_oracle();
  const Outcome r = run("stats " + path("o.bin"));
  ASSERT_EQ(r.status, 0);
  for (const char* name : {"region_edges", "keys_per_boundary_node", "connections_per_key", "decomposition_depth"}) {
    EXPECT_NE(r.out.find(std::string("\"histogram\":\"") + name + "\""), std::string::npos) << name;
  }
}

}  // namespace
