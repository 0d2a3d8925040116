#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sane/search_space.hpp"

namespace sane {

using GenotypeId = std::int64_t;

/// Key used for "no neighbour" at the head and tail of a strand.
inline constexpr int kBoundaryKey = 0;

struct CellGene {
    int key = 1;
    std::string cell_type;
    int in_key = kBoundaryKey;
    int out_key = kBoundaryKey;
    std::vector<int> core_attrs;
    std::vector<std::string> affiliated;

    friend bool operator==(const CellGene&, const CellGene&) = default;
};

/// Gene strand of one organ; cells are stored in data-flow order.
struct Strand {
    std::string organ;
    std::vector<CellGene> cells;

    friend bool operator==(const Strand&, const Strand&) = default;
};

struct FitnessRecord {
    std::optional<double> incomplete;
    std::optional<double> complete;
    int evaluated_generation = 0;
    /// Copied from a parent rather than measured on this genotype.
    bool inherited = false;

    friend bool operator==(const FitnessRecord&, const FitnessRecord&) = default;
};

struct Genotype {
    GenotypeId id = 0;
    std::vector<Strand> strands;
    int birth_generation = 0;
    std::optional<FitnessRecord> fitness;
    /// Next unused cell key; keys are never reused inside one genotype.
    int next_key = 1;

    const Strand* find_strand(std::string_view organ) const;
    Strand& strand(std::string_view organ);
    const Strand& strand(std::string_view organ) const;

    std::size_t cell_count() const;
    int count(std::string_view organ, std::string_view cell_type) const;
    int count_type(std::string_view cell_type) const;

    friend bool operator==(const Genotype&, const Genotype&) = default;
};

/// Same strands (keys, links, attributes); ids, fitness and birth ignored.
bool structurally_equal(const Genotype& a, const Genotype& b);

/// Rewrites in/out keys so the strand is a chain in storage order.
void relink(Strand& strand);

/// Renumbers every cell key from 1 in organ order and relinks.
void renumber_keys(Genotype& genotype);

/// One cell gene per evolvable organ, built from the first allowed cell
/// type's initial attributes. Mirrored organs get an empty strand.
Genotype minimal_genotype(const SearchSpace& space, GenotypeId id);

/// All genotype invariants checked against the space; empty means valid.
Violations validate(const Genotype& genotype, const SearchSpace& space);

/// Cell counts keyed by (organ, cell type), stored strands only.
std::map<std::pair<std::string, std::string>, int> cell_counts(const Genotype& genotype);

}  // namespace sane
