#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "sane/report.hpp"

using namespace sane;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "sane");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("sane-cli-" + std::to_string(::getpid()) + "-" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string config(const std::string& name) const { return (fs::path(SANE_TEST_CONFIG_DIR) / name).string(); }

    /// Subset-sum config that cannot be satisfied within `limit` generations.
    std::string hopeless_config(int limit) const {
        Json doc = read_json_file(config("subset_sum.json"));
        doc["training"]["incomplete_fitness_threshold"] = 100;
        doc["training"]["complete_fitness_threshold"] = 100;
        doc["run"]["generation_limit"] = limit;
        const auto path = dir_ / "hopeless.json";
        write_text_file(path, doc.dump());
        return path.string();
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EvolveWritesOutputs) {
    const auto r = invoke({"evolve", "--config", config("subset_sum.json"), "--out", dir_.string()});
    EXPECT_EQ(r.code, cli::kExitSatisfied) << r.err;
    EXPECT_NE(r.out.find("satisfied"), std::string::npos) << r.out;
    for (const char* name : {"result.json", "history.csv", "checkpoint.json"}) {
        EXPECT_TRUE(fs::exists(dir_ / name)) << name;
    }
    const Json result = read_json_file(dir_ / "result.json");
    EXPECT_EQ(result.at("status"), "satisfied");
    EXPECT_EQ(result.at("best").at("fitness").at("incomplete"), 16.0);
    EXPECT_EQ(slurp(dir_ / "history.csv").rfind(std::string(kHistoryCsvHeader), 0), 0u);
}

TEST_F(CliTest, GenerationLimitExitCode) {
    const auto r = invoke({"evolve", "--config", hopeless_config(3), "--out", dir_.string()});
    EXPECT_EQ(r.code, cli::kExitGenerationLimit) << r.err;
    EXPECT_EQ(read_json_file(dir_ / "result.json").at("generations"), 3);
}

TEST_F(CliTest, SeedOverrideChangesRun) {
    const auto a = dir_ / "a";
    const auto b = dir_ / "b";
    const auto c = dir_ / "c";
    const auto cfg = hopeless_config(4);
    ASSERT_EQ(invoke({"evolve", "--config", cfg, "--seed", "5", "--out", a.string()}).code, 2);
    ASSERT_EQ(invoke({"evolve", "--config", cfg, "--seed", "5", "--out", b.string()}).code, 2);
    ASSERT_EQ(invoke({"evolve", "--config", cfg, "--seed", "6", "--out", c.string()}).code, 2);
    EXPECT_EQ(slurp(a / "history.csv"), slurp(b / "history.csv"));
    EXPECT_NE(slurp(a / "checkpoint.json"), slurp(c / "checkpoint.json"));
}

TEST_F(CliTest, FaultsExitOne) {
    EXPECT_EQ(invoke({"evolve", "--config", (dir_ / "absent.json").string()}).code, cli::kExitFault);
    EXPECT_EQ(invoke({"evolve"}).code, cli::kExitFault);
    EXPECT_EQ(invoke({"bogus"}).code, cli::kExitFault);
    EXPECT_EQ(invoke({}).code, cli::kExitFault);
    const auto r = invoke({"resume", "--checkpoint", (dir_ / "absent.json").string()});
    EXPECT_EQ(r.code, cli::kExitFault);
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(CliTest, ResumeContinuesToTheSameEnd) {
    const auto full = dir_ / "full";
    const auto cfg = hopeless_config(6);
    ASSERT_EQ(invoke({"evolve", "--config", cfg, "--out", full.string()}).code, 2);

    // Stop the same run after three generations and save it.
    const RunConfig run_config = load_config(cfg);
    auto evaluator = make_evaluator(run_config);
    Engine engine(run_config.space, run_config.engine, *evaluator);
    for (int i = 0; i < 3; ++i) {
        engine.step();
    }
    const auto part = dir_ / "part";
    fs::create_directories(part);
    write_text_file(part / "checkpoint.json", cli::run_checkpoint(engine, run_config).dump());

    const auto r = invoke({"resume", "--checkpoint", (part / "checkpoint.json").string()});
    EXPECT_EQ(r.code, cli::kExitGenerationLimit) << r.err;
    EXPECT_EQ(slurp(part / "history.csv"), slurp(full / "history.csv"));
    EXPECT_EQ(slurp(part / "result.json"), slurp(full / "result.json"));
}

TEST_F(CliTest, ResumeRejectsForeignConfig) {
    ASSERT_EQ(invoke({"evolve", "--config", hopeless_config(2), "--out", dir_.string()}).code, 2);
    Json checkpoint = read_json_file(dir_ / "checkpoint.json");
    checkpoint["run_config"]["evolution"]["individual_limit"] = 40;
    write_text_file(dir_ / "edited.json", checkpoint.dump());
    EXPECT_EQ(invoke({"resume", "--checkpoint", (dir_ / "edited.json").string()}).code, cli::kExitFault);
}

TEST_F(CliTest, InspectMinimalCnn) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    write_text_file(dir_ / "g.json", to_json(minimal_genotype(space, 1)).dump());
    const auto r = invoke({"inspect", "--genotype", (dir_ / "g.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("2 cells (1 conv, 1 linear), 6 layers, 115712 parameters\n", 0), 0u) << r.out;
    EXPECT_NE(r.out.find("input [3, 32, 32] -> output [32]"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("params 448"), std::string::npos);

    EXPECT_EQ(invoke({"inspect", "--genotype", (dir_ / "g.json").string(), "--space", "gan"}).code, cli::kExitFault);
    EXPECT_EQ(invoke({"inspect", "--genotype", (dir_ / "g.json").string(), "--space", "cnn", "--config",
                      config("cnn.json")})
                  .code,
              cli::kExitFault);
}

TEST_F(CliTest, InspectReadsResultDocument) {
    ASSERT_EQ(invoke({"evolve", "--config", config("subset_sum.json"), "--out", dir_.string()}).code, 0);
    const auto r = invoke({"inspect", "--genotype", (dir_ / "result.json").string(), "--config",
                           config("subset_sum.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("4 cells (4 unit), 4 layers, 64 parameters", 0), 0u) << r.out;
}

TEST_F(CliTest, ReportFormats) {
    ASSERT_EQ(invoke({"evolve", "--config", hopeless_config(2), "--out", dir_.string()}).code, 2);
    const auto csv = invoke({"report", "--history", (dir_ / "history.csv").string(), "--csv"});
    ASSERT_EQ(csv.code, 0) << csv.err;
    EXPECT_EQ(csv.out, slurp(dir_ / "history.csv"));
    const auto json = invoke({"report", "--history", (dir_ / "result.json").string(), "--json"});
    ASSERT_EQ(json.code, 0) << json.err;
    EXPECT_EQ(Json::parse(json.out).size(), 2u);
    EXPECT_EQ(invoke({"report", "--history", (dir_ / "history.csv").string()}).code, cli::kExitFault);
    EXPECT_EQ(invoke({"report", "--history", (dir_ / "history.csv").string(), "--csv", "--json"}).code,
              cli::kExitFault);
}
