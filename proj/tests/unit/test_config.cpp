#include <gtest/gtest.h>

#include <filesystem>

#include "sane/config.hpp"

using namespace sane;
namespace fs = std::filesystem;

namespace {

fs::path config_path(const std::string& name) { return fs::path(SANE_TEST_CONFIG_DIR) / name; }

Json cnn_document() { return read_json_file(config_path("cnn.json")); }

std::string error_path(const Json& doc) {
    try {
        parse_config(doc);
    } catch (const FormatError& e) {
        return e.path();
    }
    return "<parsed>";
}

}  // namespace

TEST(Config, TableValuesForCnn) {
    const auto c = load_config(config_path("cnn.json"));
    EXPECT_EQ(c.dnn_type, "cnn");
    EXPECT_EQ(c.space, builtin_space(BuiltinSpace::cnn));
    EXPECT_EQ(c.engine.individual_init, 20);
    EXPECT_EQ(c.engine.tau_q, 50);
    EXPECT_EQ(c.engine.adaptation.lambda_T, 1);
    EXPECT_EQ(c.engine.adaptation.xi_T, 1);
    EXPECT_EQ(c.engine.adaptation.lambda_N, 1);
    EXPECT_EQ(c.engine.adaptation.xi_N, 1);
    EXPECT_EQ(c.engine.adaptation.tau_N, 10);
    EXPECT_DOUBLE_EQ(c.engine.speciation.tau_d, 1.0);
    EXPECT_EQ(c.engine.speciation.species_limit, 10);
    EXPECT_DOUBLE_EQ(c.engine.estimation.train_rate, 0.5);
    EXPECT_EQ(c.engine.estimation.t_i, 10);
    EXPECT_EQ(c.engine.estimation.t_c, 250);
    EXPECT_EQ(c.engine.input_shape, (std::vector<int>{3, 32, 32}));
    EXPECT_EQ(c.engine.variation.organ_weights, (std::vector<double>{0.6, 0.4}));
    EXPECT_EQ(c.engine.variation.attr_weights.at("conv"), (std::vector<double>{0.4, 0.15, 0.15, 0.15, 0.15}));
    EXPECT_EQ(c.engine.variation.growth_factors.at("conv"), (std::vector<int>{8, 2, 2, 2}));
    EXPECT_EQ(c.engine.variation.growth_factors.at("linear"), (std::vector<int>{16}));
    EXPECT_EQ(c.evaluator.kind, EvaluatorSpec::Kind::target_match);
    EXPECT_EQ(c.training.optimizer, "adam");
    EXPECT_EQ(c.engine.seed, 7u);
    EXPECT_EQ(c.engine.tau_k, 200);
}

TEST(Config, ThreeWayOperatorSplit) {
    const auto c = parse_config(cnn_document());
    EXPECT_DOUBLE_EQ(c.engine.variation.p_add, 0.25);
    EXPECT_DOUBLE_EQ(c.engine.variation.p_modify, 0.5);
    EXPECT_DOUBLE_EQ(c.engine.variation.p_cross, 0.25);
}

TEST(Config, MissingSectionNamesIt) {
    Json doc = cnn_document();
    doc.erase("evolution");
    EXPECT_EQ(error_path(doc), "/evolution");
}

TEST(Config, UnknownKeysRejectedWithPath) {
    Json doc = cnn_document();
    doc["evolution"]["foo"] = 1;
    EXPECT_EQ(error_path(doc), "/evolution/foo");
    doc = cnn_document();
    doc["extra"] = {};
    EXPECT_EQ(error_path(doc), "/extra");
    doc = cnn_document();
    doc["training"]["evaluator"]["bogus"] = true;
    EXPECT_EQ(error_path(doc), "/training/evaluator/bogus");
}

TEST(Config, OutOfRangeValues) {
    Json doc = cnn_document();
    doc["evolution"]["add_cell_prob"] = 30;
    EXPECT_EQ(error_path(doc), "/evolution");
    doc = cnn_document();
    doc["training"]["train_rate"] = 150;
    EXPECT_EQ(error_path(doc), "/training/train_rate");
    doc = cnn_document();
    doc["evolution"]["organ_prob"] = {60};
    EXPECT_EQ(error_path(doc), "/evolution/organ_prob");
    doc = cnn_document();
    doc["evolution"]["individual_init"] = "many";
    EXPECT_EQ(error_path(doc), "/evolution/individual_init");
    doc = cnn_document();
    doc["training"].erase("complete_fitness_threshold");
    EXPECT_EQ(error_path(doc), "/training/complete_fitness_threshold");
    doc = cnn_document();
    doc["dnn"]["type"] = "transformer";
    EXPECT_EQ(error_path(doc), "/dnn/type");
    doc = cnn_document();
    doc["evolution"]["individual_init"] = 80;
    EXPECT_EQ(error_path(doc), "/");
}

TEST(Config, ShippedConfigsParseAndValidate) {
    for (const char* name : {"cnn.json", "gan.json", "lstm.json", "subset_sum.json"}) {
        const auto c = load_config(config_path(name));
        EXPECT_TRUE(validate_space(c.space).empty()) << name;
        EXPECT_TRUE(c.engine.validate(c.space).empty()) << name;
        EXPECT_NE(make_evaluator(c), nullptr) << name;
    }
}

TEST(Config, GanAndLstmSelectBuiltins) {
    EXPECT_EQ(load_config(config_path("gan.json")).space, builtin_space(BuiltinSpace::gan));
    const auto lstm = load_config(config_path("lstm.json"));
    EXPECT_EQ(lstm.space, builtin_space(BuiltinSpace::lstm));
    EXPECT_EQ(lstm.engine.variation.organ_weights.size(), 2u);
    EXPECT_DOUBLE_EQ(lstm.engine.variation.organ_weights[1], 0.0);
}

TEST(Config, SubsetSumIsSixteenBits) {
    const auto c = load_config(config_path("subset_sum.json"));
    EXPECT_EQ(c.dnn_type, "custom");
    EXPECT_EQ(c.space.ceiling("unit"), 4);
    EXPECT_EQ(c.evaluator.kind, EvaluatorSpec::Kind::subset_sum);
    EXPECT_DOUBLE_EQ(c.engine.estimation.tau_Fc, 15.5);
}

TEST(Config, EmitParseRoundTrip) {
    for (const char* name : {"cnn.json", "gan.json", "lstm.json", "subset_sum.json"}) {
        const auto c = load_config(config_path(name));
        const Json emitted = emit_config(c);
        EXPECT_EQ(parse_config(emitted), c) << name;
        EXPECT_EQ(parse_config(Json::parse(emitted.dump())), c) << name;
        EXPECT_EQ(emit_config(parse_config(emitted)), emitted) << name;
    }
}

TEST(Config, WorkerEvaluatorSettings) {
    Json doc = cnn_document();
    doc["training"]["evaluator"] = {{"kind", "worker"},
                                    {"command", "python3 worker.py"},
                                    {"timeout_seconds", 2.5},
                                    {"workers", 3},
                                    {"env", {{"DATA", "/tmp/data"}}}};
    const auto c = parse_config(doc);
    EXPECT_EQ(c.evaluator.kind, EvaluatorSpec::Kind::worker);
    EXPECT_EQ(c.evaluator.worker.command, "python3 worker.py");
    EXPECT_EQ(c.evaluator.worker.timeout, std::chrono::milliseconds(2500));
    EXPECT_EQ(c.evaluator.worker.pool_size, 3u);
    EXPECT_EQ(c.evaluator.worker.env.at("DATA"), "/tmp/data");
    EXPECT_EQ(parse_config(emit_config(c)), c);

    doc["training"]["evaluator"]["command"] = "";
    EXPECT_EQ(error_path(doc), "/training/evaluator/command");
}

TEST(Config, CustomSpaceErrorsArePrefixed) {
    Json doc = read_json_file(config_path("subset_sum.json"));
    doc["dnn"]["space"]["cells"][0]["kind"] = "attention";
    const auto path = error_path(doc);
    EXPECT_EQ(path.rfind("/dnn/space", 0), 0u) << path;
}

TEST(Config, MissingFileAndBadJson) {
    EXPECT_THROW(load_config(config_path("absent.json")), std::runtime_error);
    const auto tmp = fs::temp_directory_path() / "sane-config-bad.json";
    write_text_file(tmp, "{ not json");
    EXPECT_THROW(load_config(tmp), FormatError);
    fs::remove(tmp);
}
