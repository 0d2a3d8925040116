#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sane/fitness.hpp"
#include "sane/genome.hpp"
#include "sane/phenotype.hpp"
#include "sane/search_space.hpp"
#include "sane/speciation.hpp"

namespace sane {

using Json = nlohmann::json;

/// Malformed or schema-violating document; `path` is a JSON pointer.
class FormatError : public std::runtime_error {
public:
    FormatError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Genotype: {id, strands: {organ: [{key, type, in, out, attrs, affiliated}]},
//            birth_generation, next_key, fitness?}
Json to_json(const Genotype& genotype);
/// Strands are ordered by `space` when given, otherwise by organ name.
Genotype genotype_from_json(const Json& doc, const SearchSpace* space = nullptr);

Json to_json(const FitnessRecord& record);
FitnessRecord fitness_from_json(const Json& doc);

// Phenotype: {nodes: [{kind, attrs, cell, organ}], edges: [[i, j]], input_shape}
Json to_json(const Phenotype& phenotype);
/// Derived metrics are recomputed from the nodes.
Phenotype phenotype_from_json(const Json& doc);

Json to_json(const SearchSpace& space);
SearchSpace space_from_json(const Json& doc);

Json to_json(const SpeciesSet& species);
SpeciesSet species_from_json(const Json& doc, const SearchSpace* space = nullptr);

/// Worker wire format: one compact JSON object per line.
std::string encode_request_line(const EvaluationRequest& request);
EvaluationRequest decode_request_line(std::string_view line);
std::string encode_response_line(const EvaluationResponse& response);
EvaluationResponse decode_response_line(std::string_view line);

}  // namespace sane
