#include "sane/report.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "sane/config.hpp"

namespace sane {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

template <typename T>
T parse_field(std::string_view text, const std::string& where) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError(where, "cannot parse '" + std::string(text) + "'");
    }
    return value;
}

std::optional<double> parse_optional(std::string_view text, const std::string& where) {
    if (text.empty()) {
        return std::nullopt;
    }
    return parse_field<double>(text, where);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::vector<HistoryRow> history_rows(std::span<const GenerationRecord> history) {
    std::vector<HistoryRow> rows;
    for (const auto& record : history) {
        for (const auto& s : record.species) {
            rows.push_back(HistoryRow{record.generation, s.species_id, s.size, s.best_incomplete, s.best_complete,
                                      record.T, record.N, record.evaluations});
        }
    }
    return rows;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string rows_to_csv(std::span<const HistoryRow> rows) {
    std::string out(kHistoryCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.generation) + ',' + std::to_string(r.species_id) + ',' + std::to_string(r.size) + ',';
        out += (r.best_incomplete ? format_number(*r.best_incomplete) : "") + ',';
        out += (r.best_complete ? format_number(*r.best_complete) : "") + ',';
        out += std::to_string(r.T) + ',' + std::to_string(r.N) + ',' + std::to_string(r.evaluations) + '\n';
    }
    return out;
}

std::vector<HistoryRow> rows_from_csv(std::string_view text) {
    std::vector<HistoryRow> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no);
        if (!header_seen) {
            if (line != kHistoryCsvHeader) {
                throw FormatError(where, "unexpected header");
            }
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 8) {
            throw FormatError(where, "expected 8 fields");
        }
        rows.push_back(HistoryRow{parse_field<int>(f[0], where), parse_field<int>(f[1], where),
                                  parse_field<int>(f[2], where), parse_optional(f[3], where),
                                  parse_optional(f[4], where), parse_field<int>(f[5], where),
                                  parse_field<int>(f[6], where), parse_field<int>(f[7], where)});
    }
    if (!header_seen) {
        throw FormatError("line 1", "missing header");
    }
    return rows;
}

Json rows_to_json(std::span<const HistoryRow> rows) {
    Json out = Json::array();
    for (const auto& r : rows) {
        if (out.empty() || out.back()["generation"] != r.generation) {
            out.push_back({{"generation", r.generation},
                           {"T", r.T},
                           {"N", r.N},
                           {"evaluations", r.evaluations},
                           {"species", Json::array()}});
        }
        out.back()["species"].push_back({{"species_id", r.species_id},
                                         {"size", r.size},
                                         {"best_incomplete", optional_number(r.best_incomplete)},
                                         {"best_complete", optional_number(r.best_complete)}});
    }
    return out;
}

std::vector<HistoryRow> load_history(const std::filesystem::path& path) {
    if (path.extension() == ".csv") {
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("cannot read " + path.string());
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        return rows_from_csv(buffer.str());
    }
    const Json doc = read_json_file(path);
    if (!doc.is_object() || !doc.contains("history") || !doc.at("history").is_array()) {
        throw FormatError("/history", "missing");
    }
    std::vector<GenerationRecord> records;
    for (const auto& r : doc.at("history")) {
        records.push_back(generation_record_from_json(r));
    }
    return history_rows(records);
}

Json result_json(const RunResult& result) {
    Json history = Json::array();
    for (const auto& r : result.history) {
        history.push_back(to_json(r));
    }
    Json fitness = result.best.fitness ? to_json(*result.best.fitness) : Json(nullptr);
    Json genotype = to_json(result.best);
    genotype.erase("fitness");
    return {{"status", std::string(to_string(result.status))},
            {"generations", result.generations},
            {"best", {{"genotype", std::move(genotype)}, {"fitness", std::move(fitness)}}},
            {"history", std::move(history)}};
}

}  // namespace sane
