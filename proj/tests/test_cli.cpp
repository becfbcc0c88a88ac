#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shrinkreg/cli.hpp"
#include "shrinkreg/io.hpp"

using namespace shrinkreg;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "shrinkreg");
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "shrinkreg_cli_tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST(Cli, UnknownCommandPrintsUsage) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("usage:"), std::string::npos);
  EXPECT_EQ(run({}).code, kExitUsage);
}

TEST(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({"table1", "--help"}).code, kExitOk);
}

TEST(Cli, SimulateIsByteIdentical) {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  ASSERT_EQ(run({"simulate", "--n", "2", "--p", "5", "--seed", "7", "--out", a.string()}).code, 0);
  ASSERT_EQ(run({"simulate", "--n", "2", "--p", "5", "--seed", "7", "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "path.csv"), slurp(b / "path.csv"));
  EXPECT_EQ(slurp(a / "path.bin"), slurp(b / "path.bin"));
  const auto back = read_path_csv(a / "path.csv");
  EXPECT_EQ(back.grid.N, 10);
}

TEST(Cli, ManifestListsOutputs) {
  const auto dir = scratch("manifest");
  ASSERT_EQ(run({"simulate", "--n", "3", "--p", "7", "--out", dir.string()}).code, 0);
  const auto m = read_json(dir / "manifest.json");
  EXPECT_EQ(m["command"], "simulate");
  ASSERT_EQ(m["outputs"].size(), 2u);
  for (const auto& o : m["outputs"])
    EXPECT_EQ(o["sha256"], sha256_file(dir / o["path"].get<std::string>()));
  EXPECT_EQ(m["config"]["p"], 7);
}

TEST(Cli, ValidationErrorsExitOne) {
  EXPECT_EQ(run({"simulate", "--n", "0", "--out", scratch("bad1").string()}).code, kExitValidation);
  EXPECT_EQ(run({"simulate", "--rho2", "0.9", "--out", scratch("bad2").string()}).code,
            kExitValidation);
  EXPECT_EQ(run({"simulate", "--no-such-flag"}).code, kExitValidation);
  EXPECT_EQ(run({"table1", "--scale", "huge", "--out", scratch("bad3").string()}).code,
            kExitValidation);
}

TEST(Cli, EstimateFromFile) {
  const auto sim = scratch("est_sim"), est = scratch("est_out");
  ASSERT_EQ(run({"simulate", "--n", "20", "--p", "21", "--out", sim.string()}).code, 0);
  ASSERT_EQ(run({"estimate", "--input", (sim / "path.csv").string(), "--d", "10", "--out",
                 est.string()})
                .code,
            0);
  const auto j = read_json(est / "estimate.json");
  EXPECT_EQ(j["p"], 21);
  EXPECT_TRUE(j.contains("sigma_hat"));
  EXPECT_EQ(j["constants"]["c_n"], 0.0);
  EXPECT_TRUE(fs::exists(est / "coeffs.csv"));
}

TEST(Cli, SelectWritesFamilyAndObjective) {
  const auto dir = scratch("select");
  ASSERT_EQ(run({"select", "--n", "100", "--p", "201", "--out", dir.string()}).code, 0);
  const auto j = read_json(dir / "selection.json");
  EXPECT_GT(j["family_size"].get<int>(), 0);
  EXPECT_TRUE(fs::exists(dir / "j_values.csv"));
  EXPECT_TRUE(fs::exists(dir / "family.csv"));
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  write_json(dir / "cfg.json", {{"signals", {"s1"}}, {"n_values", {50}}, {"p", 101},
                                {"replications", 3}, {"master_seed", 4}});
  const auto out = dir / "run";
  ASSERT_EQ(run({"table2", "--config", (dir / "cfg.json").string(), "--reps", "2", "--out",
                 out.string()})
                .code,
            0);
  const auto m = read_json(out / "manifest.json");
  EXPECT_EQ(m["config"]["replications"], 2);
  EXPECT_EQ(m["config"]["p"], 101);
  const auto csv = slurp(out / "risk_table.csv");
  EXPECT_EQ(csv.rfind("signal,n,estimator,risk,stderr,ratio\n", 0), 0u);
  EXPECT_TRUE(fs::exists(out / "figure_s1_n50.csv"));
}

TEST(Cli, EnvironmentOverridesDefaults) {
  const auto dir = scratch("env");
  ::setenv("SHRINKREG_SEED", "123", 1);
  const auto r = run({"simulate", "--n", "2", "--p", "5", "--out", dir.string()});
  ::unsetenv("SHRINKREG_SEED");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_json(dir / "manifest.json")["config"]["master_seed"], 123);
}

TEST(Cli, TableOutputsIndependentOfWorkers) {
  const auto a = scratch("w1"), b = scratch("w4");
  const std::vector<std::string> base{"table1", "--signal", "s2", "--n-values", "60", "--p", "121",
                                      "--reps", "6"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--workers", "1", "--out", a.string()});
  args_b.insert(args_b.end(), {"--workers", "4", "--out", b.string()});
  ASSERT_EQ(run(args_a).code, 0);
  ASSERT_EQ(run(args_b).code, 0);
  for (const char* f : {"risk_table.csv", "figure_s2_n60.csv", "report.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, VerifyAndAudit) {
  const auto v = scratch("verify");
  const auto r = run({"verify", "--d-max", "60", "--paths", "4000", "--resolution", "1024", "--out",
                      v.string()});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_TRUE(read_json(v / "verify.json")["pass"].get<bool>());
  const auto a = scratch("audit");
  EXPECT_EQ(run({"audit", "--n-values", "100", "1000", "--out", a.string()}).code, kExitOk);
  EXPECT_EQ(read_json(a / "audit.json")["entries"].size(), 2u);
}

TEST(Cli, ImproveAndOracle) {
  const auto i = scratch("improve");
  ASSERT_EQ(run({"improve", "--n", "100", "--d", "70", "--p", "301", "--reps", "10", "--out",
                 i.string()})
                .code,
            0);
  EXPECT_LT(read_json(i / "improve.json")["delta_hat"].get<double>(), 0.0);
  const auto o = scratch("oracle");
  ASSERT_EQ(run({"oracle-check", "--n", "100", "--p", "201", "--reps", "5", "--max-members", "5",
                 "--out", o.string()})
                .code,
            0);
  EXPECT_LE(read_json(o / "oracle.json")["members_evaluated"].get<int>(), 5);
}
