#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sane/genome.hpp"
#include "sane/search_space.hpp"

namespace sane {

/// One module of the decoded network.
///
/// `attrs` holds the resolved shape parameters, which is everything needed to
/// rebuild the module or count its parameters:
///   conv, convtranspose  [in_channels, out_channels, kernel, stride, padding]
///   linear               [in_features, out_features]
///   convlstm             [in_channels, hidden_channels, kernel]
///   batchnorm, groupnorm [channels]
///   maxpool              [kernel, stride]
///   relu, leakyrelu      []
struct ModuleNode {
    std::string kind;
    std::vector<int> attrs;
    int cell = kBoundaryKey;
    std::string organ;

    friend bool operator==(const ModuleNode&, const ModuleNode&) = default;
};

struct PhenotypeMetrics {
    std::map<std::string, int> cell_count;
    int layer_count = 0;
    std::int64_t parameter_count = 0;

    friend bool operator==(const PhenotypeMetrics&, const PhenotypeMetrics&) = default;
};

struct Phenotype {
    std::vector<ModuleNode> nodes;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> input_shape;
    std::vector<int> output_shape;
    PhenotypeMetrics derived;

    friend bool operator==(const Phenotype&, const Phenotype&) = default;
};

/// Raised when shapes collapse below one element along a spatial axis.
class DecodeError : public std::runtime_error {
public:
    DecodeError(std::string organ, int cell_key, const std::string& message);

    const std::string& organ() const { return organ_; }
    int cell_key() const { return cell_key_; }

private:
    std::string organ_;
    int cell_key_;
};

/// Decoder strand derived from its source: order reversed, conv cells become
/// the mirrored organ's transposed-conv type, other cells are copied.
Strand mirror_strand(const SearchSpace& space, const Organ& mirrored, const Strand& source);

Phenotype decode(const Genotype& genotype, const SearchSpace& space, std::span<const int> input_shape);

std::int64_t module_parameters(const ModuleNode& node);
std::int64_t parameter_count(const Phenotype& phenotype);

}  // namespace sane
