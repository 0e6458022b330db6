/*
 * Copyright 2026 The agr-cbr Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Drives the agr binary end to end through the shell.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(AGR_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("agr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  const std::string fixture_ = std::string(AGR_SAMPLES_DIR) + "/six_cases.csv";
  fs::path dir_;
};

TEST_F(Cli, GenWritesRequestedRowsAndValidates) {
  ASSERT_EQ(run("dataset gen --n 100 --seed 1 --out " + path("a.csv")).status, 0);
  ASSERT_EQ(run("dataset gen --n 100 --seed 1 --out " + path("b.csv")).status, 0);
  const std::string a = slurp(path("a.csv"));
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 101);
  EXPECT_EQ(run("dataset validate --in " + path("a.csv")).status, 0);
}

TEST_F(Cli, ValidateReportsDataErrors) {
  std::ofstream(path("bad.csv")) << slurp(fixture_) << "7,7,2,3,7,City,Rome,Plane,abc,H,3,Rome\n";
  EXPECT_EQ(run("dataset validate --in " + path("bad.csv")).status, 2);
  EXPECT_EQ(run("retrieve --cases " + path("bad.csv") + " --query-case 1 --k 1").status, 2);
}

TEST_F(Cli, KnnOnlyStoredCase) {
  const auto r = run("retrieve --cases " + fixture_ + " --query-case 4 --k 1 --knn-only");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "query_id,rank,case_id,similarity,source,level\n4,1,4,1,KNN,2\n");
}

TEST_F(Cli, FixtureHybridOutput) {
  const auto r = run("retrieve --cases " + fixture_ +
                     " --query Duration=7,Persons=2,Accommodation=3,Season=7,HolidayType=City,"
                     "Destination=Rome,Transport=Plane --query-id 1 --k 4 --accept-p 1");
  ASSERT_EQ(r.status, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1], "1,1,1,1,KNN,1");
  EXPECT_EQ(rows[2], "1,2,2,0.875,KNN,1");
  EXPECT_EQ(rows[3], "1,3,3,0.875,KNN,1");
  EXPECT_EQ(rows[4].substr(0, 6), "1,4,5,");
  EXPECT_NE(rows[4].find(",MRF,1"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("retrieve --cases " + fixture_ + " --query-case 1 --k 2 --pt 1.5").status, 1);
  EXPECT_EQ(run("retrieve --cases " + fixture_ + " --query-case 1 --k 7").status, 1);
  EXPECT_EQ(run("retrieve --cases " + fixture_ + " --query Altitude=3 --k 1").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, MrfDumpOfFixture) {
  const auto r = run("mrf dump --cases " + fixture_ + " --st 0.9 --levels 2");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "# metric-mrf l=2 st=0.9 nodes=6 edges=6");
}

TEST_F(Cli, EvalWritesDeclaredFilesDeterministically) {
  std::ofstream(path("cfg.json")) << R"({"alphas": [1.5], "ks": [2], "folds": 2, "seed": 3})";
  ASSERT_EQ(run("dataset gen --n 60 --seed 2 --out " + path("cases.csv")).status, 0);
  const auto first = run("eval --cases " + path("cases.csv") + " --config " + path("cfg.json") +
                         " --out " + path("one"));
  ASSERT_EQ(first.status, 0);
  EXPECT_EQ(first.out.rfind("config_hash=", 0), 0u);
  ASSERT_EQ(run("eval --cases " + path("cases.csv") + " --config " + path("cfg.json") +
                " --out " + path("two") + " --jobs 2")
                .status,
            0);
  for (const char* name : {"results.csv", "means.csv", "pr_kNN_alpha1.5.csv", "pr_MRF_alpha1.5.csv"}) {
    const auto a = slurp(dir_ / "one" / name);
    ASSERT_FALSE(a.empty()) << name;
    EXPECT_EQ(a.rfind("# config_hash=", 0), 0u) << name;
    EXPECT_EQ(a, slurp(dir_ / "two" / name)) << name;
  }
  const auto pr = slurp(dir_ / "one" / "pr_MRF_alpha1.5.csv");
  EXPECT_NE(pr.find("\nAUC,"), std::string::npos);
}

TEST_F(Cli, EvalRejectsBadConfig) {
  std::ofstream(path("cfg.json")) << R"({"pt": 2})";
  EXPECT_EQ(run("eval --cases " + fixture_ + " --config " + path("cfg.json") + " --out " + path("o")).status, 1);
  std::ofstream(path("big.json")) << R"({"ks": [50], "folds": 2})";
  EXPECT_EQ(run("eval --cases " + fixture_ + " --config " + path("big.json") + " --out " + path("o")).status, 1);
}

}  // namespace
