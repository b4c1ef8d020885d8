#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "subkern/io.hpp"
#include "subkern/kernels.hpp"

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("subkern_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int run(const std::string& args) {
    const std::string cmd = std::string(SUBKERN_CLI) + " " + args + " > " +
                            (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string path(const std::string& name) { return (dir / name).string(); }

  fs::path dir;
};

TEST_F(Cli, SynthNoiseFree) {
  ASSERT_EQ(run("synth --m 2 --sigma 0 --out " + path("s")), 0);
  EXPECT_EQ(read(dir / "s" / "rankings.txt"),
            "#n=8\n3 < 5 < 4 < 6 < 7 < 1 < 0 < 2\n1 < 0 < 2 < 7 < 6 < 3 < 4 < 5\n");
  EXPECT_EQ(read(dir / "s" / "labels.csv"), "row_index,label\n0,1\n1,-1\n");
  EXPECT_TRUE(fs::exists(dir / "s" / "features.csv"));
  const auto config = nlohmann::json::parse(read(dir / "s" / "config.json"));
  EXPECT_EQ(config["subcommand"], "synth");
  EXPECT_EQ(config["options"]["sigma"], "0");
}

TEST_F(Cli, ConfigEchoReproducesOutput) {
  ASSERT_EQ(run("synth --m 30 --sigma 1 --kind exh-interleave:3 --seed 4 --out " + path("a")), 0);
  const auto config = nlohmann::json::parse(read(dir / "a" / "config.json"));
  std::string args;
  const auto& argv = config["argv"];
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string v = argv[i];
    args += " " + (v == path("a") ? path("b") : v);
  }
  ASSERT_EQ(run(args), 0);
  EXPECT_EQ(read(dir / "a" / "rankings.txt"), read(dir / "b" / "rankings.txt"));
  EXPECT_EQ(read(dir / "a" / "labels.csv"), read(dir / "b" / "labels.csv"));
}

TEST_F(Cli, UsageAndInputErrors) {
  EXPECT_EQ(run("synth --m 4"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("gram --rankings " + path("missing.txt") + " --out " + path("k")), 2);
  std::ofstream(dir / "bad.txt") << "#n=8\n0 < 1\n0 < 1\n0 < 1\n0 < 1\n0 < 1\n0 < 0\n";
  EXPECT_EQ(run("gram --rankings " + path("bad.txt") + " --out " + path("k")), 3);
  EXPECT_NE(read(dir / "stderr.txt").find("bad.txt:7:"), std::string::npos);
  std::ofstream(dir / "wide.txt") << "#n=5\n0 < 1\n";
  EXPECT_EQ(run("gram --rankings " + path("wide.txt") + " --out " + path("k")), 3);
  std::ofstream(dir / "partial.txt") << "#n=8\n0 < 1\n";
  EXPECT_EQ(run("gram --rankings " + path("partial.txt") + " --budget 10 --out " + path("k")), 3);
}

TEST_F(Cli, GramFormatsAgree) {
  ASSERT_EQ(run("synth --m 20 --sigma 0.5 --seed 1 --out " + path("s")), 0);
  const std::string r = "--rankings " + path("s/rankings.txt");
  ASSERT_EQ(run("gram " + r + " --out " + path("csv")), 0);
  ASSERT_EQ(run("gram " + r + " --format bin --threads 1 --out " + path("bin")), 0);
  const auto a = subkern::io::load_gram_csv(dir / "csv" / "gram.csv");
  const auto b = subkern::io::load_gram_binary(dir / "bin" / "gram.bin");
  EXPECT_EQ(a.values, b.values);
  EXPECT_TRUE(subkern::psd_check(a, 1e-8));
  EXPECT_EQ(read(dir / "csv" / "timing.csv").substr(0, 14), "phase,seconds\n");
  ASSERT_EQ(run("gram " + r + " --kernel kendall --out " + path("kendall")), 0);
  EXPECT_EQ(subkern::io::load_gram_csv(dir / "kendall" / "gram.csv").at(0, 0), 1.0);
}

TEST_F(Cli, SampledGramIsReproducible) {
  ASSERT_EQ(run("synth --m 16 --kind interleave:4 --seed 2 --out " + path("s")), 0);
  const std::string args = "gram --rankings " + path("s/rankings.txt") +
                           " --mode sampled --samples 600 --seed 3 --out ";
  ASSERT_EQ(run(args + path("a")), 0);
  ASSERT_EQ(run(args + path("b") + " --threads 1"), 0);
  EXPECT_EQ(read(dir / "a" / "gram.csv"), read(dir / "b" / "gram.csv"));
}

TEST_F(Cli, ClassifyNoiseFreeIsPerfect) {
  ASSERT_EQ(run("classify --sigmas 0 --seeds 0 1 2 3 4 5 --dummy --m 60 --out " + path("c")), 0);
  std::istringstream csv(read(dir / "c" / "metrics.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "seed,kernel,ranking_kind,noise,f1");
  int rows = 0, dummy = 0;
  while (std::getline(csv, line)) {
    ++rows;
    if (line.find(",dummy,") != std::string::npos) {
      ++dummy;
      continue;
    }
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "1") << line;
  }
  EXPECT_EQ(rows, 18);
  EXPECT_EQ(dummy, 6);
}

TEST_F(Cli, ClassifyFromFiles) {
  ASSERT_EQ(run("synth --m 40 --sigma 0.3 --seed 9 --out " + path("s")), 0);
  ASSERT_EQ(run("classify --rankings " + path("s/rankings.txt") + " --labels " +
                path("s/labels.csv") + " --seeds 1 2 --kernels mallows --out " + path("c")),
            0);
  const auto text = read(dir / "c" / "metrics.csv");
  EXPECT_NE(text.find("1,mallows,file,NA,"), std::string::npos) << text;
  EXPECT_EQ(run("classify --rankings " + path("s/rankings.txt") + " --out " + path("c2")), 2);
}

TEST_F(Cli, BenchReportsPhasesAndTimeouts) {
  ASSERT_EQ(run("bench --grid 50 100 --kernels submodular kendall --repeats 3 --out " + path("b")), 0);
  const auto text = read(dir / "b" / "bench.csv");
  EXPECT_NE(text.find("50,submodular,features,"), std::string::npos);
  EXPECT_NE(text.find("100,submodular,products,"), std::string::npos);
  EXPECT_NE(text.find("100,kendall,total,"), std::string::npos);
  ASSERT_EQ(run("bench --grid 200 400 --kernels kendall --timeout 1e-9 --repeats 1 --out " + path("t")), 0);
  EXPECT_EQ(read(dir / "t" / "bench.csv"),
            "m,kernel,phase,median_seconds\n200,kendall,total,NA\n400,kendall,total,NA\n");
}

TEST_F(Cli, GraphAndFeatmap) {
  ASSERT_EQ(run("graph --keep-fraction 0.5 --out " + path("g")), 0);
  std::istringstream edges(read(dir / "g" / "graph.txt"));
  int count = 0;
  for (std::string line; std::getline(edges, line);) ++count;
  EXPECT_EQ(count, 14);
  ASSERT_EQ(run("synth --m 4 --out " + path("s")), 0);
  ASSERT_EQ(run("featmap --rankings " + path("s/rankings.txt") + " --out " + path("f")), 0);
  ASSERT_EQ(run("featmap --rankings " + path("s/rankings.txt") + " --row 1 --out " + path("f1")), 0);
  EXPECT_EQ(read(dir / "f1" / "feature_map.csv").substr(0, 16), "object_id,value\n");
  EXPECT_EQ(run("featmap --rankings " + path("s/rankings.txt") + " --row 9 --out " + path("f2")), 3);
}

}  // namespace
