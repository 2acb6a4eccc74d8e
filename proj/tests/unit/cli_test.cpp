#include "chj/cli.hpp"

#include <gtest/gtest.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chj/config.hpp"

namespace fs = std::filesystem;

namespace chj::cli {
namespace {

const char* kE1 = R"(model:
  kind: quadratic
  A: 1.0
  g: {linear: 1.0}
grid: {resolution: 64}
evolution: {dt: 2e-3}
battery: {samples: 60, horizons: [0.1, 0.4]}
flow:
  states: [[0, 1, 0], [0.25, -0.5, 0.1]]
  T: 1
initial: "-1"
)";

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("chj_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string read(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    int invoke(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }
    std::string out(const std::string& sub) { return (dir_ / sub).string(); }

    fs::path dir_;
    std::ostringstream out_, err_;
};

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, FlowLastRowMatchesClosedForm) {
    const auto cfg = write("e1.yaml", kE1);
    ASSERT_EQ(invoke({"flow", "--config", cfg, "--out", out("f")}), kExitOk) << err_.str();
    std::istringstream csv(read(dir_ / "f" / "trajectory_0.csv"));
    std::string line, last;
    while (std::getline(csv, line))
        if (!line.empty()) last = line;
    double t, x, p, u;
    char c;
    std::istringstream row(last);
    row >> t >> c >> x >> c >> p >> c >> u;
    EXPECT_EQ(t, 1.0);
    EXPECT_NEAR(x, 0.6321205588285577, 1e-6);
    EXPECT_NEAR(p, 0.36787944117144233, 1e-6);
    EXPECT_NEAR(u, 0.11627207896741482, 1e-6);
    EXPECT_TRUE(fs::exists(dir_ / "f" / "trajectory_1.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "f" / "manifest.yaml"));
}

TEST_F(CliTest, TheoremAPassesForNegativeConstant) {
    const auto cfg = write("e1.yaml", kE1);
    ASSERT_EQ(invoke({"verify", "--battery", "theorem-a", "--config", cfg, "--out", out("v")}), kExitOk)
        << err_.str();
    const YAML::Node rep = YAML::LoadFile((dir_ / "v" / "report.yaml").string());
    ASSERT_EQ(rep["verdicts"].size(), 4u);
    for (const auto& v : rep["verdicts"]) EXPECT_TRUE(v["passed"].as<bool>()) << v["name"].as<std::string>();
}

TEST_F(CliTest, TheoremAFailsForPositiveConstantWithExitTwo) {
    const auto cfg = write("e1.yaml", kE1);
    EXPECT_EQ(invoke({"verify", "--battery", "theorem-a", "--config", cfg, "--phi", "0.5", "--out", out("v")}),
              kExitCheckFailed);
    const YAML::Node rep = YAML::LoadFile((dir_ / "v" / "report.yaml").string());
    for (const auto& v : rep["verdicts"]) EXPECT_FALSE(v["passed"].as<bool>());
}

TEST_F(CliTest, MissingModelExitsOneAndNamesTheKey) {
    const auto cfg = write("bad.yaml", "grid: {resolution: 64}\n");
    EXPECT_EQ(invoke({"flow", "--config", cfg, "--out", out("b")}), kExitUsage);
    EXPECT_NE(err_.str().find("'model'"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ParseErrorsCarryLineAndColumn) {
    const auto cfg = write("bad.yaml", "model:\n  A: 1.0\n  g: {linear: oops}\n");
    EXPECT_EQ(invoke({"flow", "--config", cfg, "--out", out("b")}), kExitUsage);
    EXPECT_NE(err_.str().find("line 3, column"), std::string::npos) << err_.str();

    const auto cfg2 = write("bad2.yaml", "model:\n  A: 1.0\n  gee: 1\n");
    EXPECT_EQ(invoke({"flow", "--config", cfg2, "--out", out("b")}), kExitUsage);
    EXPECT_NE(err_.str().find("line 3, column 3: unknown key 'gee'"), std::string::npos) << err_.str();
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(invoke({}), kExitUsage);
    EXPECT_EQ(invoke({"flow", "--config", out("missing.yaml")}), kExitUsage);
    EXPECT_EQ(invoke({"verify", "--battery", "theorem-z", "--model", "u + 0.5*p1^2"}), kExitUsage);
    EXPECT_EQ(invoke({"--help"}), kExitOk);
}

TEST_F(CliTest, MissingInitialFileIsAConfigError) {
    const auto cfg2 = write("f.yaml", "model: {A: 1.0, g: {linear: 1.0}}\ninitial: {file: nowhere.grid}\n");
    EXPECT_EQ(invoke({"semigroup", "--config", cfg2, "--out", out("s")}), kExitUsage);
    EXPECT_NE(err_.str().find("nowhere.grid"), std::string::npos);
}

TEST_F(CliTest, ManifestRecordsConfigSeedAndHashes) {
    const auto cfg = write("e1.yaml", kE1);
    ASSERT_EQ(invoke({"verify", "--battery", "theorem-a", "--config", cfg, "--seed", "7", "--out", out("v")}),
              kExitOk);
    const YAML::Node m = YAML::LoadFile((dir_ / "v" / "manifest.yaml").string());
    EXPECT_EQ(m["version"].as<std::string>(), kVersion);
    EXPECT_EQ(m["seed"].as<int>(), 7);
    EXPECT_EQ(m["config"]["battery"]["seed"].as<int>(), 7);
    EXPECT_EQ(m["config"]["grid"]["resolution"][0].as<int>(), 64);
    EXPECT_GE(m["wall_time_seconds"].as<double>(), 0.0);
    EXPECT_EQ(m["input_sha256"].as<std::string>().size(), 64u);
    bool found = false;
    for (const auto& o : m["outputs"]) {
        if (o["file"].as<std::string>() != "samples.csv") continue;
        found = true;
        EXPECT_EQ(o["sha256"].as<std::string>(), sha256_hex(read(dir_ / "v" / "samples.csv")));
    }
    EXPECT_TRUE(found);
}

TEST_F(CliTest, EchoedConfigReparsesToTheSameEcho) {
    const auto cfg = parse_config(kE1);
    const auto echo = echo_config(cfg);
    EXPECT_EQ(echo_config(parse_config(echo)), echo);
}

TEST_F(CliTest, CsvOutputsIndependentOfWorkers) {
    const auto cfg = write("e1.yaml", kE1);
    ASSERT_EQ(invoke({"verify", "--config", cfg, "--workers", "1", "--out", out("a")}), kExitOk);
    ASSERT_EQ(invoke({"verify", "--config", cfg, "--workers", "3", "--out", out("b")}), kExitOk);
    EXPECT_EQ(read(dir_ / "a" / "samples.csv"), read(dir_ / "b" / "samples.csv"));
    EXPECT_EQ(read(dir_ / "a" / "report.yaml"), read(dir_ / "b" / "report.yaml"));
}

TEST_F(CliTest, OtherSubcommandsRun) {
    const auto cfg = write("e1.yaml", std::string(kE1) + "action: {x0: 0, u0: 0, x: 0.5, t: 1}\n");
    ASSERT_EQ(invoke({"action", "--config", cfg, "--out", out("a")}), kExitOk) << err_.str();
    EXPECT_NE(read(dir_ / "a" / "sweep.csv").find("0.07274"), std::string::npos);
    EXPECT_EQ(invoke({"legendre", "--config", cfg, "--out", out("l")}), kExitOk);
    EXPECT_EQ(invoke({"semigroup", "--config", cfg, "--t", "0.1", "--out", out("s")}), kExitOk);
    const auto fin = read(dir_ / "s" / "final.grid");
    EXPECT_EQ(fin.rfind("torus d=1", 0), 0u);
    EXPECT_EQ(invoke({"diagnose", "--config", cfg, "--out", out("d")}), kExitOk);
    EXPECT_EQ(invoke({"diagnose", "--model", "u - 0.5*p1^2", "--out", out("d2")}), kExitCheckFailed);
}

}  // namespace
}  // namespace chj::cli
