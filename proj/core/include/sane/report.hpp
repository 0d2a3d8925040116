#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sane/engine.hpp"
#include "sane/serialization.hpp"

namespace sane {

inline constexpr std::string_view kHistoryCsvHeader =
    "generation,species_id,size,best_incomplete,best_complete,T,N,evaluations_this_gen";

/// One (generation, species) line of the run log.
struct HistoryRow {
    int generation = 0;
    int species_id = 0;
    int size = 0;
    std::optional<double> best_incomplete;
    std::optional<double> best_complete;
    int T = 1;
    int N = 1;
    int evaluations = 0;

    friend bool operator==(const HistoryRow&, const HistoryRow&) = default;
};

std::vector<HistoryRow> history_rows(std::span<const GenerationRecord> history);

/// Shortest text that reads back to the same double.
std::string format_number(double value);

std::string rows_to_csv(std::span<const HistoryRow> rows);
/// Throws FormatError naming the line.
std::vector<HistoryRow> rows_from_csv(std::string_view text);
/// Rows grouped per generation: [{generation, T, N, evaluations, species: [...]}].
Json rows_to_json(std::span<const HistoryRow> rows);

/// Reads history.csv, or any JSON document carrying a "history" array
/// (result.json, checkpoint.json).
std::vector<HistoryRow> load_history(const std::filesystem::path& path);

/// {status, best: {genotype, fitness}, generations, history: [...]}.
Json result_json(const RunResult& result);

}  // namespace sane
