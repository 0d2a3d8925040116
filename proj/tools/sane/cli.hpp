#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sane/config.hpp"
#include "sane/engine.hpp"

namespace sane::cli {

/// Exit codes of `sane evolve` and `sane resume`.
inline constexpr int kExitSatisfied = 0;
inline constexpr int kExitFault = 1;
inline constexpr int kExitGenerationLimit = 2;

/// Engine checkpoint plus the run document needed to rebuild the evaluator.
Json run_checkpoint(const Engine& engine, const RunConfig& config);

/// Writes result.json, history.csv and checkpoint.json under `dir`.
void write_outputs(const Engine& engine, const RunConfig& config, const std::filesystem::path& dir);

/// One-paragraph summary of a decoded genotype.
std::string inspect_summary(const Genotype& genotype, const SearchSpace& space, const std::vector<int>& input_shape);

/// Entry point; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sane::cli
