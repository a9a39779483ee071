// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result run(const std::string& args) {
  const std::string cmd = std::string(CTVGAN_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One small dataset and a two-step checkpoint shared by all tests.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = ctvgan::testing::scratch_dir("cli");
    std::ofstream(root_ / "small.conf") << "motion.dim = 4\nmotion.kernel_size = 3\nmotion.lead_tokens = 4\n"
                                           "gen.resolution = 32\ngen.fmaps = 4\ngen.w_dim = 4\ngen.z_dim = 4\n"
                                           "disc.fmaps = 4\ndisc.d_pe = 4\nsample.t_max = 64\n"
                                           "train.batch = 2\ntrain.steps = 2\ntrain.eval_every = 2\n"
                                           "train.log_every = 1\neval.num_fake = 4\n";
    data_ok_ = run("make-data --kind bouncing-ball --count 4 --length 40 --resolution 32 --out " +
                   (root_ / "data").string()).code == 0;
    train_ = run("train --config " + (root_ / "small.conf").string() + " --data " + (root_ / "data").string() +
                 " --out " + (root_ / "run").string());
  }

  static fs::path root_;
  static bool data_ok_;
  static Result train_;
};

fs::path Cli::root_;
bool Cli::data_ok_ = false;
Result Cli::train_;

TEST_F(Cli, MakeDataWritesDataset) {
  ASSERT_TRUE(data_ok_);
  EXPECT_TRUE(fs::exists(root_ / "data" / "manifest.json"));
  const auto bad = run("make-data --kind spinning-cube --out " + (root_ / "bad").string());
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.output.find("unknown dataset kind"), std::string::npos);
}

TEST_F(Cli, TrainWritesArtifacts) {
  ASSERT_EQ(train_.code, 0) << train_.output;
  for (const char* f : {"checkpoint.ckpt", "metrics.csv", "config.txt"}) EXPECT_TRUE(fs::exists(root_ / "run" / f)) << f;
  EXPECT_NE(train_.output.find("real frames seen"), std::string::npos);
  EXPECT_NE(read_file(root_ / "run" / "config.txt").find("gen.fmaps = 4"), std::string::npos);
}

TEST_F(Cli, DryRunPrintsResolvedConfigWithoutTraining) {
  const auto out = root_ / "dry";
  const auto r = run("train --dry-run --config " + (root_ / "small.conf").string() + " --set train.lr=0.01 --out " +
                     out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("train.lr = 0.01"), std::string::npos);
  EXPECT_NE(r.output.find("motion.dim = 4"), std::string::npos);
  EXPECT_FALSE(fs::exists(out / "checkpoint.ckpt"));
}

TEST_F(Cli, UnknownKeyIsUsageError) {
  const auto r = run("train --dry-run --set motion.colour=3");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("unknown config key 'motion.colour'"), std::string::npos);
  EXPECT_NE(r.output.find("motion.spacing"), std::string::npos);
  EXPECT_EQ(run("no-such-command").code, 1);
  EXPECT_EQ(run("train --config " + (root_ / "absent.conf").string() + " --dry-run").code, 2);
}

TEST_F(Cli, GenerateAtContinuousTimestamps) {
  ASSERT_EQ(train_.code, 0);
  const auto out = root_ / "gen";
  const auto r = run("generate --ckpt " + (root_ / "run" / "checkpoint.ckpt").string() +
                     " --timestamps 0,0.5,1,2048 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"frame_0000.png", "frame_0001.png", "frame_0002.png", "frame_0003.png", "timestamps.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(read_file(out / "timestamps.csv"),
            "frame,timestamp\nframe_0000.png,0\nframe_0001.png,0.5\nframe_0002.png,1\nframe_0003.png,2048\n");
  EXPECT_TRUE(fs::exists(out / "config.txt"));
  EXPECT_EQ(run("generate --ckpt " + (root_ / "run" / "checkpoint.ckpt").string() + " --timestamps 0,-1 --out " +
                out.string()).code, 1);
  EXPECT_EQ(run("generate --ckpt " + (root_ / "missing.ckpt").string() + " --out " + out.string()).code, 2);
}

TEST_F(Cli, EvalWritesReports) {
  ASSERT_EQ(train_.code, 0);
  const auto out = root_ / "eval";
  const auto r = run("eval --real " + (root_ / "data").string() + " --ckpt " +
                     (root_ / "run" / "checkpoint.ckpt").string() +
                     " --clip-len 16 --protocol num_fake=4 --protocol offset_policy=first --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const std::string text = read_file(out / "report.txt");
  EXPECT_NE(text.find("fvd_proxy"), std::string::npos);
  EXPECT_NE(text.find("fid_proxy"), std::string::npos);
  EXPECT_NE(text.find("feature_dim"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "report.csv"));

  const auto same = run("eval --real " + (root_ / "data").string() + " --fake " + (root_ / "data").string() +
                        " --protocol offset_policy=first --protocol num_fake=4 --out " + (root_ / "eval_same").string());
  ASSERT_EQ(same.code, 0) << same.output;
  EXPECT_EQ(run("eval --real " + (root_ / "data").string() + " --clip-len 17 --fake x").code, 1);
  EXPECT_EQ(run("eval --real " + (root_ / "data").string()).code, 1);
}

TEST_F(Cli, CheckMarginalsBuiltinsAndFiles) {
  auto r = run("check-marginals --dist builtin:parity --k 3");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("{1,2}"), std::string::npos);
  EXPECT_NE(r.output.find("statement consistent: yes"), std::string::npos);
  r = run("check-marginals --dist builtin:parity --k 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("explaining sets: none"), std::string::npos);

  std::ofstream(root_ / "joint.txt") << "# independent bits\nn 2\nalphabet 2 2\n0.06\n0.14\n0.24\n0.56\n";
  const auto csv = root_ / "marg.csv";
  r = run("check-marginals --dist " + (root_ / "joint.txt").string() + " --k 1 --csv " + csv.string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(csv));
  EXPECT_EQ(run("check-marginals --dist builtin:nothing").code, 1);
  EXPECT_EQ(run("check-marginals --dist " + (root_ / "absent.txt").string()).code, 1);
}

TEST_F(Cli, GradMapWritesNonConstantMaps) {
  ASSERT_EQ(train_.code, 0);
  const auto out = root_ / "gradmap";
  const auto r = run("grad-map --ckpt " + (root_ / "run" / "checkpoint.ckpt").string() + " --data " +
                     (root_ / "data").string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"gradmap_0.png", "gradmap_1.png", "gradmap_2.png", "gradmap.png"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_NE(r.output.find("non-constant maps: yes"), std::string::npos);
}

TEST_F(Cli, EmbedPlotRepresentationsDiffer) {
  const auto out = root_ / "embed";
  const auto r = run("embed-plot --config " + (root_ / "small.conf").string() + " --t-max 64 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const std::string a = read_file(out / "embed_acyclic.csv");
  const std::string b = read_file(out / "embed_interp.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_NE(a, b);
  EXPECT_TRUE(fs::exists(out / "embed_plot.png"));
  EXPECT_EQ(run("embed-plot --step 0 --out " + out.string()).code, 1);
}

}  // namespace
