#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gchain/errors.hpp"
#include "gchain/experiment.hpp"

namespace fs = std::filesystem;
using gchain::ExperimentConfig;
using nlohmann::json;

namespace {

const std::string kCli = GCHAIN_CLI;
const std::string kModels = GCHAIN_MODELS;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gchain_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with stdout and stderr captured in `dir`; returns the exit status.
int cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = kCli + " " + args + " --out " + dir.string() + " > " + (dir / "stdout.txt").string() +
                          " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int cli_raw(const fs::path& dir, const std::string& args) {
  const std::string cmd = kCli + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::map<std::string, std::string> checksums(const fs::path& dir) {
  std::map<std::string, std::string> out;
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  for (const auto& o : manifest["outputs"])
    out[o["file"].get<std::string>()] = o["fnv1a64"].get<std::string>();
  return out;
}

}  // namespace

TEST(Cli, RenewalExampleConvergesToTwoThirds) {
  const fs::path d = scratch("renewal");
  ASSERT_EQ(cli(d, "renewal --d 0.5 --b 2,2 --K 1 --n-max 400"), 0) << slurp(d / "stderr.txt");
  const auto u = lines(d / "renewal_u.csv");
  ASSERT_EQ(u.size(), 402u);
  EXPECT_EQ(u[0], "n,u_n = Ptilde[1 at -n]");
  const std::string last = u.back();
  EXPECT_EQ(last.substr(0, 4), "400,");
  EXPECT_NEAR(std::stod(last.substr(4)), 2.0 / 3.0, 1e-9);
  const json r = json::parse(slurp(d / "renewal.json"));
  EXPECT_EQ(r["period"], 2);
}

TEST(Cli, CriteriaVerdictsForSquareDecay) {
  const fs::path d = scratch("criteria");
  ASSERT_EQ(cli(d, "criteria --variation power:c=1,p=2 --lambda 1.5,2,4"), 0) << slurp(d / "stderr.txt");
  const json r = json::parse(slurp(d / "criteria.json"));
  std::map<std::string, std::string> verdicts;
  for (const auto& rep : r["reports"]) {
    EXPECT_EQ(rep["verdict"], "Satisfied") << rep["id"];
    verdicts[rep["id"]] = rep["verdict"];
  }
  EXPECT_EQ(verdicts.count("hyp1") + verdicts.count("hyp3") + verdicts.count("hyp5"), 3u);
  EXPECT_EQ(r["consistent"], true);
  EXPECT_TRUE(fs::exists(d / "criteria_hyp1.csv"));
  EXPECT_TRUE(fs::exists(d / "criteria_hyp5_2.csv"));
  EXPECT_EQ(json::parse(slurp(d / "manifest.json"))["checks_passed"], true);
}

TEST(Cli, CriteriaFromModelFile) {
  const fs::path d = scratch("criteria_model");
  ASSERT_EQ(cli(d, "criteria --model " + kModels + "/longrange_p2.model --horizon 64 --checks hyp1,hyp5,thm_h "
                   "--dsequence power:a=0.5,p=1"),
            0)
      << slurp(d / "stderr.txt");
  const json r = json::parse(slurp(d / "criteria.json"));
  ASSERT_EQ(r["reports"].size(), 3u);
}

TEST(Cli, CoupleIsDeterministicForAFixedSeed) {
  const fs::path a = scratch("couple_a"), b = scratch("couple_b"), c = scratch("couple_c");
  const std::string args = "couple --model " + kModels + "/longrange_p2.model --depth 16 --trajectories 300 "
                           "--tail-len 16 --dn-max 3 --threads ";
  ASSERT_EQ(cli(a, args + "1 --seed 5"), 0) << slurp(a / "stderr.txt");
  ASSERT_EQ(cli(b, args + "3 --seed 5"), 0) << slurp(b / "stderr.txt");
  ASSERT_EQ(cli(c, args + "1 --seed 6"), 0) << slurp(c / "stderr.txt");
  const auto ca = checksums(a), cb = checksums(b), cc = checksums(c);
  ASSERT_TRUE(ca.count("couple_disagreement.csv"));
  ASSERT_TRUE(ca.count("dn.csv"));
  EXPECT_EQ(ca.at("couple_disagreement.csv"), cb.at("couple_disagreement.csv"));
  EXPECT_EQ(ca.at("couple_runs.csv"), cb.at("couple_runs.csv"));
  EXPECT_EQ(ca.at("dn.csv"), cb.at("dn.csv"));
  EXPECT_EQ(slurp(a / "couple_disagreement.csv"), slurp(b / "couple_disagreement.csv"));
  EXPECT_NE(ca.at("couple_disagreement.csv"), cc.at("couple_disagreement.csv"));
  const auto head = lines(a / "dn.csv");
  EXPECT_EQ(head.size(), 4u);
}

TEST(Cli, TransferWritesStationaryMeasure) {
  const fs::path d = scratch("transfer");
  ASSERT_EQ(cli(d, "transfer --model " + kModels + "/iid.model --n-max 5"), 0) << slurp(d / "stderr.txt");
  const auto st = lines(d / "stationary.csv");
  ASSERT_GE(st.size(), 3u);
  EXPECT_TRUE(fs::exists(d / "transfer.csv"));
  const json j = json::parse(slurp(d / "transfer.json"));
  EXPECT_EQ(j["unique"], true);
}

TEST(Cli, PipelineSmallRun) {
  const fs::path d = scratch("pipeline");
  ASSERT_EQ(cli(d, "pipeline --model " + kModels + "/longrange_p2.model --seed 3 --depth 16 --trajectories 400 "
                   "--tail-len 32 --profile-horizon 32 --dbar-horizon 8 --compare-from 8"),
            0)
      << slurp(d / "stderr.txt");
  for (const char* f : {"pipeline_dbar.csv", "pipeline_bound.csv", "pipeline_mc.csv", "pipeline_runs.csv",
                        "pipeline.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  EXPECT_EQ(json::parse(slurp(d / "manifest.json"))["checks_passed"], true);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path d = scratch("config");
  {
    std::ofstream cfg(d / "run.cfg");
    cfg << "# renewal example\nexperiment = renewal\nd = 0.5\nb = 2, 2\nK = 1\nn_max = 50\n";
  }
  ASSERT_EQ(cli(d, "renewal --config " + (d / "run.cfg").string() + " --n-max 20"), 0) << slurp(d / "stderr.txt");
  EXPECT_EQ(lines(d / "renewal_u.csv").size(), 22u);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  const fs::path d = scratch("errors");
  const std::string m = " --model " + kModels + "/longrange_p2.model";
  EXPECT_EQ(cli(d, "couple" + m + " --depth 4"), 2);  // no seed
  EXPECT_NE(slurp(d / "stderr.txt").find("seed"), std::string::npos);
  EXPECT_EQ(cli(d, "couple" + m + " --seed 1 --depth -3"), 2);
  EXPECT_EQ(cli(d, "renewal --d 0.2,0.5 --b 1,1,1 --K 2"), 2);  // d increasing
  EXPECT_EQ(cli(d, "renewal --K 1"), 2);                        // d missing
  EXPECT_EQ(cli(d, "criteria --variation zeta:s=2"), 2);
  EXPECT_EQ(cli(d, "transfer --model /nonexistent.model"), 2);
  EXPECT_EQ(cli(d, "transfer --model " + kModels + "/iid.model --schedule weird:3"), 2);
  EXPECT_EQ(cli(d, "renewal --bogus 1"), 2);
  {
    std::ofstream cfg(d / "bad.cfg");
    cfg << "experiment = renewal\nd = 0.5\nunknown_key = 3\n";
  }
  EXPECT_EQ(cli(d, "renewal --config " + (d / "bad.cfg").string()), 2);
  EXPECT_EQ(cli_raw(d, ""), 2);
}

TEST(Cli, BudgetErrorsExitWithThree) {
  const fs::path d = scratch("budget");
  const std::string m = " --model " + kModels + "/longrange_p2.model";
  EXPECT_EQ(cli(d, "couple" + m + " --seed 1 --schedule const:4 --block-cap 3 --depth 8 --trajectories 5"), 3);
  EXPECT_EQ(cli(d, "couple" + m + " --seed 1 --depth 4 --trajectories 5 --dn-max 6 --dn-tail 12"), 3);
  EXPECT_EQ(cli(d, "transfer" + m + " --truncation 40"), 3);
}

TEST(Cli, SelftestPasses) {
  const fs::path d = scratch("selftest");
  EXPECT_EQ(cli_raw(d, "selftest"), 0);
  const std::string out = slurp(d / "stdout.txt");
  EXPECT_EQ(out.find("FAIL"), std::string::npos);
  EXPECT_NE(out.find("selftest passed"), std::string::npos);
}

TEST(ExperimentConfig, CanonicalFormAndHashAreStable) {
  gchain::KeyValues kv{{"experiment", "renewal"}, {"d", "0.5"}, {"b", "2,2"}};
  const ExperimentConfig a = ExperimentConfig::from_key_values(kv);
  kv["b"] = "2, 2";
  const ExperimentConfig b = ExperimentConfig::from_key_values(kv);
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(gchain::fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(gchain::fnv1a64_hex("a"), "af63dc4c8601ec8c");
  kv["trajectories"] = "0";
  kv["experiment"] = "couple";
  kv["seed"] = "1";
  EXPECT_THROW(ExperimentConfig::from_key_values(kv).validate(), gchain::ConfigError);
}
