#include "sane/encoding.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace sane {

int index_bits(int size) {
    int bits = 0;
    while ((std::int64_t{1} << bits) < size) {
        ++bits;
    }
    return bits;
}

int CellSlotLayout::bits() const {
    return std::accumulate(attr_bits.begin(), attr_bits.end(), 0) + static_cast<int>(affiliated.size());
}

StateSchema StateSchema::from_space(const SearchSpace& space) {
    StateSchema schema;
    for (const auto& type : space.cells) {
        CellSlotLayout layout;
        layout.cell_type = type.name;
        layout.capacity = space.ceiling(type.name);
        for (const auto& attr : type.attrs) {
            layout.attr_min.push_back(attr.min);
            layout.attr_bits.push_back(index_bits(attr.max - attr.min + 1));
        }
        layout.affiliated = type.allowed_affiliated;
        if (layout.bits() < 1) {
            throw EncodingError("cell type '" + type.name + "' has a single state; it needs at least one bit");
        }
        if (layout.bits() > 64) {
            throw EncodingError("cell type '" + type.name + "' needs more than 64 state bits");
        }
        schema.cells.push_back(std::move(layout));
    }
    return schema;
}

std::size_t StateSchema::total_bits() const {
    std::size_t total = 0;
    for (const auto& c : cells) {
        total += static_cast<std::size_t>(c.capacity) * static_cast<std::size_t>(c.bits());
    }
    return total;
}

const CellSlotLayout* StateSchema::find(std::string_view cell_type) const {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const CellSlotLayout& c) { return c.cell_type == cell_type; });
    return it == cells.end() ? nullptr : &*it;
}

std::uint64_t cell_state_index(const CellGene& cell, const CellSlotLayout& layout) {
    if (cell.core_attrs.size() != layout.attr_bits.size()) {
        throw EncodingError("cell " + std::to_string(cell.key) + ": attribute count mismatch");
    }
    std::uint64_t index = 0;
    int offset = 0;
    for (std::size_t a = 0; a < cell.core_attrs.size(); ++a) {
        const int domain_index = cell.core_attrs[a] - layout.attr_min[a];
        if (domain_index < 0 || (layout.attr_bits[a] < 63 && domain_index >= (1 << layout.attr_bits[a]))) {
            throw EncodingError("cell " + std::to_string(cell.key) + ": attribute " + std::to_string(a) +
                                " outside domain");
        }
        index |= static_cast<std::uint64_t>(domain_index) << offset;
        offset += layout.attr_bits[a];
    }
    for (const auto& kind : layout.affiliated) {
        if (std::find(cell.affiliated.begin(), cell.affiliated.end(), kind) != cell.affiliated.end()) {
            index |= std::uint64_t{1} << offset;
        }
        ++offset;
    }
    for (const auto& kind : cell.affiliated) {
        if (std::find(layout.affiliated.begin(), layout.affiliated.end(), kind) == layout.affiliated.end()) {
            throw EncodingError("cell " + std::to_string(cell.key) + ": affiliated '" + kind + "' not encodable");
        }
    }
    return index;
}

std::string encode_binary(const Genotype& genotype, const StateSchema& schema) {
    std::map<std::string, std::vector<const CellGene*>> by_type;
    for (const auto& strand : genotype.strands) {
        for (const auto& cell : strand.cells) {
            by_type[cell.cell_type].push_back(&cell);
        }
    }
    for (const auto& [type, cells] : by_type) {
        if (schema.find(type) == nullptr) {
            throw EncodingError("cell type '" + type + "' missing from schema");
        }
    }

    std::string bits;
    bits.reserve(schema.total_bits());
    for (const auto& layout : schema.cells) {
        const auto& cells = by_type[layout.cell_type];
        if (static_cast<int>(cells.size()) > layout.capacity) {
            throw EncodingError("cell type '" + layout.cell_type + "' exceeds its slot capacity");
        }
        const int width = layout.bits();
        for (int slot = 0; slot < layout.capacity; ++slot) {
            const std::uint64_t index = slot < static_cast<int>(cells.size()) ? cell_state_index(*cells[slot], layout) : 0;
            for (int b = width - 1; b >= 0; --b) {
                bits.push_back(((index >> b) & 1U) != 0 ? '1' : '0');
            }
        }
    }
    return bits;
}

}  // namespace sane
