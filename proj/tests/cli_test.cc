// Copyright 2026 The FairRank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int RunCli(const std::string& args) {
  const std::string command =
      std::string(FAIRRANK_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path Scratch() {
  const fs::path dir = fs::temp_directory_path() / "fairrank_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path SmokeConfig(const std::string& extra = "") {
  const fs::path path = Scratch() / "smoke.conf";
  std::ofstream(path) << "dataset = german\ndata_dir = " << FAIRRANK_DATA_DIR
                      << "\nseed = 5\nn_train = 20\nn_test = 6\nrepeats = 2\n"
                         "folds = 2\nrobust_lambdas = 0, 1\n"
                         "postproc_lambdas = 0\ngamma_grid = 0.1\n"
                         "mu_grid = 10\n"
                      << extra;
  return path;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("frobnicate"), 2);
  EXPECT_EQ(RunCli("sweep --config /nonexistent.conf --out /tmp/x"), 2);
  const fs::path bad = Scratch() / "bad.conf";
  std::ofstream(bad) << "repeats = 0\n";
  EXPECT_EQ(RunCli("sweep --config " + bad.string() + " --out /tmp/x"), 2);
  EXPECT_EQ(RunCli("sweep --config " + SmokeConfig().string() +
                " --dataset nothing --out /tmp/x"),
            2);
}

TEST(Cli, SweepAndReport) {
  const fs::path out = Scratch() / "sweep";
  fs::remove_all(out);
  ASSERT_EQ(RunCli("sweep --config " + SmokeConfig().string() + " --out " +
                out.string()),
            0);
  EXPECT_TRUE(fs::exists(out / "results.tsv"));
  EXPECT_TRUE(fs::exists(out / "manifest.txt"));
  EXPECT_EQ(RunCli("report --in " + out.string() + " --out " +
                (out / "report.tsv").string()),
            0);
  EXPECT_TRUE(fs::exists(out / "report.tsv"));
  EXPECT_EQ(RunCli("report --in " + (Scratch() / "empty").string()), 2);
}

TEST(Cli, PartialFailureExitsOne) {
  const fs::path out = Scratch() / "partial";
  EXPECT_EQ(RunCli("sweep --config " + SmokeConfig("admm_max_iter = 1\n").string() +
                " --method postproc --out " + out.string()),
            1);
  EXPECT_TRUE(fs::exists(out / "diagnostics.log"));
}

TEST(Cli, PrepareTrainInfer) {
  const fs::path dir = Scratch() / "pipeline";
  fs::remove_all(dir);
  const std::string config = SmokeConfig().string();
  ASSERT_EQ(RunCli("prepare --config " + config + " --out " + dir.string()), 0);
  ASSERT_TRUE(fs::exists(dir / "train" / "manifest.txt"));
  ASSERT_EQ(RunCli("train --config " + config + " --tasks " +
                (dir / "train").string() + " --lambda 1 --out " +
                (dir / "model.txt").string()),
            0);
  ASSERT_EQ(RunCli("infer --model " + (dir / "model.txt").string() + " --tasks " +
                (dir / "test").string() + " --out " +
                (dir / "ranked.tsv").string()),
            0);
  std::ifstream in(dir / "ranked.tsv");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 7);
  EXPECT_EQ(RunCli("infer --model /nonexistent --tasks " + (dir / "test").string()),
            2);
}

}  // namespace
