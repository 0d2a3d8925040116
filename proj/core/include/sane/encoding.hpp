#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sane/genome.hpp"
#include "sane/search_space.hpp"

namespace sane {

/// Bit layout of one cell type inside the fixed-length architecture string.
///
/// A cell's state index packs each core attribute's domain index from the
/// least significant end (attribute 0 lowest), followed by one presence bit
/// per allowed affiliated kind. The index is written most significant bit
/// first into its slot of `bits` characters.
struct CellSlotLayout {
    std::string cell_type;
    int capacity = 0;
    std::vector<int> attr_min;
    std::vector<int> attr_bits;
    std::vector<std::string> affiliated;

    int bits() const;
};

struct StateSchema {
    std::vector<CellSlotLayout> cells;

    /// One layout per cell type in catalog order; capacity = quantity ceiling.
    static StateSchema from_space(const SearchSpace& space);

    std::size_t total_bits() const;
    const CellSlotLayout* find(std::string_view cell_type) const;
};

class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bits needed to index a domain of `size` values (0 for a single value).
int index_bits(int size);

/// State index of one cell under its layout.
std::uint64_t cell_state_index(const CellGene& cell, const CellSlotLayout& layout);

/// Architecture as a '0'/'1' string of length total_bits(). Unoccupied slots are zero.
std::string encode_binary(const Genotype& genotype, const StateSchema& schema);

}  // namespace sane
