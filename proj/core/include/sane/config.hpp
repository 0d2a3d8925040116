#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "sane/bridge.hpp"
#include "sane/engine.hpp"
#include "sane/fitness.hpp"
#include "sane/search_space.hpp"
#include "sane/serialization.hpp"

namespace sane {

struct EvaluatorSpec {
    enum class Kind { subset_sum, target_match, worker };

    Kind kind = Kind::subset_sum;
    /// subset_sum: target bit string; empty means all ones.
    std::string target_bits;
    /// target_match: reference architecture.
    TargetArchitecture target;
    /// worker: process command, timeout and pool size.
    WorkerConfig worker;

    friend bool operator==(const EvaluatorSpec&, const EvaluatorSpec&) = default;
};

std::string_view to_string(EvaluatorSpec::Kind kind);

/// Training settings consumed by external workers only.
struct TrainingExtras {
    std::optional<int> train_batches;
    std::optional<double> learning_rate;
    std::optional<std::string> loss_function;
    std::optional<std::string> optimizer;

    friend bool operator==(const TrainingExtras&, const TrainingExtras&) = default;
};

/// A parsed run document: sections dnn, evolution, training and run.
struct RunConfig {
    /// "cnn", "gan", "lstm" or "custom" (inline space).
    std::string dnn_type = "cnn";
    SearchSpace space;
    EngineConfig engine;
    EvaluatorSpec evaluator;
    TrainingExtras training;
    std::string output_dir = "out";

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws FormatError with a JSON-pointer path on unknown keys, missing
/// sections, wrong types or out-of-range values.
RunConfig parse_config(const Json& document);
/// Reads and parses a file; I/O failures throw std::runtime_error.
RunConfig load_config(const std::filesystem::path& path);
/// Inverse of parse_config.
Json emit_config(const RunConfig& config);

/// Builds the configured evaluator. Worker pools honour SANE_WORKERS.
std::unique_ptr<Evaluator> make_evaluator(const RunConfig& config);

/// Reads a whole file as JSON; throws std::runtime_error or FormatError.
Json read_json_file(const std::filesystem::path& path);
/// Writes through a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sane
