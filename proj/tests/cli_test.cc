// Copyright 2026 The SMM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_split.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "smm/accountant.h"

namespace smm {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string TempPath(const std::string& name) {
  return ::testing::TempDir() + "/smm_cli_test_" + name;
}

CliResult RunCli(const std::string& args) {
  const std::string out = TempPath("stdout");
  const std::string err = TempPath("stderr");
  const std::string cmd =
      std::string(SMM_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(out);
  r.err = ReadFile(err);
  return r;
}

// "key = value" lines from a report.
std::map<std::string, std::string> Report(const std::string& text) {
  std::map<std::string, std::string> kv;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    std::vector<std::string> parts = absl::StrSplit(line, " = ");
    if (parts.size() == 2) kv[parts[0]] = parts[1];
  }
  return kv;
}

double Number(const std::string& s) {
  double v = 0;
  EXPECT_TRUE(absl::SimpleAtod(s, &v)) << s;
  return v;
}

std::vector<std::string> DataLines(const std::string& text) {
  std::vector<std::string> lines;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    if (!line.empty() && line[0] != '#') lines.emplace_back(line);
  }
  return lines;
}

TEST(CliTest, DirectConversion) {
  CliResult r = RunCli("account --alpha 2 --tau 1 --delta 1e-5");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(Number(Report(r.out)["epsilon"]), 11.1266, 1e-4);
}

TEST(CliTest, AccountMatchesLibrary) {
  CliResult r =
      RunCli("account --mech smm --T 1 --q 1 --n 100 --c 16 --lambda 4");
  ASSERT_EQ(r.code, 0) << r.err;
  auto want = AccountSmmAutoLinf(1, 1.0, 100, 16, 4, 1e-5);
  ASSERT_TRUE(want.ok());
  auto kv = Report(r.out);
  EXPECT_NEAR(Number(kv["epsilon"]), want->report.epsilon, 1e-9);
  EXPECT_EQ(kv["best_alpha"], std::to_string(want->report.best_alpha));
  EXPECT_EQ(kv["delta_inf"], std::to_string(want->delta_inf));
}

TEST(CliTest, CalibrateThenAccount) {
  for (std::string mech : {"smm", "dgm", "skellam_cr", "ddg"}) {
    CliResult cal =
        RunCli("calibrate --mech " + mech + " --eps 3 --n 100 --d 1024");
    ASSERT_EQ(cal.code, 0) << mech << cal.err;
    auto kv = Report(cal.out);
    const bool skellam = mech == "smm" || mech == "skellam_cr";
    const std::string key = skellam ? "lambda" : "sigma2";
    ASSERT_TRUE(kv.count(key)) << cal.out;
    std::string args =
        "account --mech " + mech + " --n 100 --d 1024 --" + key + " " + kv[key];
    if (mech == "smm") args += " --delta-inf " + kv["delta_inf"];
    CliResult acc = RunCli(args);
    ASSERT_EQ(acc.code, 0) << mech << acc.err;
    EXPECT_LE(Number(Report(acc.out)["epsilon"]), 3.0) << mech;
  }
}

TEST(CliTest, InfeasibleExitsThree) {
  CliResult r = RunCli("account --mech smm --n 1 --c 16 --lambda 0.01");
  EXPECT_EQ(r.code, 3);
  EXPECT_THAT(r.err, HasSubstr("order conditions"));
  CliResult d = RunCli("account --mech dgm --n 1 --c 16 --sigma2 0.01");
  EXPECT_EQ(d.code, 3);
  EXPECT_THAT(d.err, HasSubstr("infeasible"));
}

TEST(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli("sample --dist nope").code, 2);
  EXPECT_EQ(RunCli("account --bogus").code, 2);
  EXPECT_EQ(RunCli("sum-estimate --mech cpsgd").code, 2);
  EXPECT_EQ(RunCli("").code, 2);
}

TEST(CliTest, SampleOutputAndDeterminism) {
  const std::string path = TempPath("sample.txt");
  const std::string args =
      "sample --dist skellam --lambda 2 --count 2000 --seed 4 --out " + path;
  ASSERT_EQ(RunCli(args).code, 0);
  const std::string text = ReadFile(path);
  ASSERT_EQ(RunCli(args).code, 0);
  EXPECT_EQ(text, ReadFile(path));
  EXPECT_THAT(text, StartsWith("# smm_cli "));
  EXPECT_THAT(text, HasSubstr("# lambda=2"));
  EXPECT_THAT(text, HasSubstr("# gof chi2="));
  EXPECT_EQ(DataLines(text).size(), 2000u);
}

TEST(CliTest, SampleGof) {
  CliResult r =
      RunCli("sample --dist poisson --lambda 1 --count 100000 --seed 7");
  ASSERT_EQ(r.code, 0) << r.err;
  const size_t at = r.out.find("p_value=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_GT(std::stod(r.out.substr(at + 8)), 1e-3);
}

TEST(CliTest, EmptySample) {
  CliResult r = RunCli("sample --dist dgauss --sigma2 1 --count 0");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(DataLines(r.out).empty());
}

TEST(CliTest, ConfigFileWithOverride) {
  const std::string cfg = TempPath("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# comment\ndist = skellam\nlambda = 3\ncount = 10\nseed = 9\n";
  }
  CliResult from_file = RunCli("sample --config " + cfg);
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_THAT(from_file.out, HasSubstr("# lambda=3"));
  EXPECT_EQ(DataLines(from_file.out).size(), 10u);
  CliResult flags =
      RunCli("sample --dist skellam --lambda 3 --count 10 --seed 9");
  EXPECT_EQ(DataLines(from_file.out), DataLines(flags.out));
  CliResult overridden = RunCli("sample --config " + cfg + " --count 4");
  EXPECT_EQ(DataLines(overridden.out).size(), 4u);
}

TEST(CliTest, SumEstimateConcatenatesMechanisms) {
  const std::string path = TempPath("sum.csv");
  CliResult r = RunCli(
      "sum-estimate --mech smm --mech ddg --mech skellam_cr --d 64 --trials 2 "
      "--seed 1 --out " +
      path);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_THAT(r.out, HasSubstr("smm: mean_mse = "));
  std::vector<std::string> lines = DataLines(ReadFile(path));
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "mechanism,eps,m,gamma,d,n,trial,mse");
  EXPECT_THAT(lines[1], StartsWith("smm,"));
  EXPECT_THAT(lines[3], StartsWith("ddg,"));
  EXPECT_THAT(lines[5], StartsWith("skellam_cr,"));
}

TEST(CliTest, FlTrainMetrics) {
  CliResult r = RunCli(
      "fl-train --mech smm --n 100 --T 5 --q 1 --no-noise --m-bits 30 "
      "--gamma 1024 --seed 2");
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines = DataLines(r.out);
  auto header = std::find(lines.begin(), lines.end(),
                          "round,loss,accuracy,batch_size,eps_spent_running");
  ASSERT_NE(header, lines.end()) << r.out;
  EXPECT_EQ(lines.end() - header, 6);
  EXPECT_THAT(lines.back(), StartsWith("5,"));
  EXPECT_THAT(lines.back(), HasSubstr(",100,inf"));
}

TEST(CliTest, BenchExactSlowerThanFast) {
  CliResult r = RunCli("bench --count 100000");
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines = DataLines(r.out);
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines[0], "sampler,mode,variance,samples_per_second");
  std::map<std::string, double> rate;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = absl::StrSplit(lines[i], ',');
    ASSERT_EQ(f.size(), 4u);
    rate[f[0] + "/" + f[1] + "/" + f[2]] = Number(f[3]);
  }
  int compared = 0;
  for (const auto& [key, exact] : rate) {
    const size_t at = key.find("/exact/");
    if (at == std::string::npos) continue;
    std::string fast = key;
    fast.replace(at, 7, "/fast/");
    ASSERT_TRUE(rate.count(fast)) << fast;
    EXPECT_LT(exact, rate[fast]) << key;
    ++compared;
  }
  EXPECT_EQ(compared, 10);
}

}  // namespace
}  // namespace smm
