#include "sane/genome.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sane {

const Strand* Genotype::find_strand(std::string_view organ) const {
    auto it = std::find_if(strands.begin(), strands.end(), [&](const Strand& s) { return s.organ == organ; });
    return it == strands.end() ? nullptr : &*it;
}

Strand& Genotype::strand(std::string_view organ) {
    auto it = std::find_if(strands.begin(), strands.end(), [&](const Strand& s) { return s.organ == organ; });
    if (it == strands.end()) {
        throw std::out_of_range("genotype has no strand for organ '" + std::string(organ) + "'");
    }
    return *it;
}

const Strand& Genotype::strand(std::string_view organ) const {
    if (const auto* s = find_strand(organ)) {
        return *s;
    }
    throw std::out_of_range("genotype has no strand for organ '" + std::string(organ) + "'");
}

std::size_t Genotype::cell_count() const {
    std::size_t total = 0;
    for (const auto& s : strands) {
        total += s.cells.size();
    }
    return total;
}

int Genotype::count(std::string_view organ, std::string_view cell_type) const {
    const Strand* s = find_strand(organ);
    if (s == nullptr) {
        return 0;
    }
    return static_cast<int>(
        std::count_if(s->cells.begin(), s->cells.end(), [&](const CellGene& c) { return c.cell_type == cell_type; }));
}

int Genotype::count_type(std::string_view cell_type) const {
    int total = 0;
    for (const auto& s : strands) {
        total += count(s.organ, cell_type);
    }
    return total;
}

bool structurally_equal(const Genotype& a, const Genotype& b) { return a.strands == b.strands; }

void relink(Strand& strand) {
    auto& cells = strand.cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].in_key = i == 0 ? kBoundaryKey : cells[i - 1].key;
        cells[i].out_key = i + 1 == cells.size() ? kBoundaryKey : cells[i + 1].key;
    }
}

void renumber_keys(Genotype& genotype) {
    int key = 1;
    for (auto& s : genotype.strands) {
        for (auto& c : s.cells) {
            c.key = key++;
        }
        relink(s);
    }
    genotype.next_key = key;
}

Genotype minimal_genotype(const SearchSpace& space, GenotypeId id) {
    if (const auto violations = validate_space(space); !violations.empty()) {
        throw std::invalid_argument("minimal_genotype: invalid search space at " + violations.front().path + ": " +
                                    violations.front().message);
    }
    Genotype g;
    g.id = id;
    for (const auto& organ : space.organs) {
        Strand strand{organ.name, {}};
        if (!organ.mirrored()) {
            const CellType& type = space.cell(organ.allowed_cells.front());
            strand.cells.push_back(
                CellGene{g.next_key++, type.name, kBoundaryKey, kBoundaryKey, type.initial_core_attrs,
                         type.initial_affiliated});
        }
        g.strands.push_back(std::move(strand));
    }
    return g;
}

std::map<std::pair<std::string, std::string>, int> cell_counts(const Genotype& genotype) {
    std::map<std::pair<std::string, std::string>, int> out;
    for (const auto& s : genotype.strands) {
        for (const auto& c : s.cells) {
            ++out[{s.organ, c.cell_type}];
        }
    }
    return out;
}

namespace {

void validate_strand_links(const Strand& strand, const std::string& path, Violations& out) {
    const auto& cells = strand.cells;
    if (cells.empty()) {
        return;
    }
    std::map<int, std::size_t> by_key;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].key <= kBoundaryKey) {
            out.push_back({path + "[" + std::to_string(i) + "].key", "key must be positive"});
        }
        if (!by_key.emplace(cells[i].key, i).second) {
            out.push_back({path + "[" + std::to_string(i) + "].key", "duplicate key " + std::to_string(cells[i].key)});
        }
    }
    std::size_t heads = 0;
    std::size_t head_index = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const std::string cpath = path + "[" + std::to_string(i) + "]";
        if (c.in_key == kBoundaryKey) {
            ++heads;
            head_index = i;
        } else if (by_key.count(c.in_key) == 0) {
            out.push_back({cpath + ".in", "in-cell " + std::to_string(c.in_key) + " not in strand"});
        } else if (cells[by_key[c.in_key]].out_key != c.key) {
            out.push_back({cpath + ".in", "in-cell does not link back"});
        }
        if (c.out_key != kBoundaryKey && by_key.count(c.out_key) == 0) {
            out.push_back({cpath + ".out", "out-cell " + std::to_string(c.out_key) + " not in strand"});
        }
    }
    if (heads != 1) {
        out.push_back({path, heads == 0 ? "cycle: strand has no head cell" : "strand is not a single chain"});
        return;
    }
    std::set<int> visited;
    std::size_t at = head_index;
    std::size_t position = 0;
    while (true) {
        const auto& c = cells[at];
        if (!visited.insert(c.key).second) {
            out.push_back({path, "cycle through key " + std::to_string(c.key)});
            return;
        }
        if (at != position) {
            out.push_back({path, "cells not stored in data-flow order"});
            return;
        }
        ++position;
        if (c.out_key == kBoundaryKey) {
            break;
        }
        auto it = by_key.find(c.out_key);
        if (it == by_key.end()) {
            return;
        }
        at = it->second;
    }
    if (visited.size() != cells.size()) {
        out.push_back({path, "strand is not a single chain"});
    }
}

}  // namespace

Violations validate(const Genotype& genotype, const SearchSpace& space) {
    Violations out;
    if (genotype.strands.size() != space.organs.size()) {
        out.push_back({"strands", "expected one strand per organ"});
    }
    for (const auto& organ : space.organs) {
        if (genotype.find_strand(organ.name) == nullptr) {
            out.push_back({"strands." + organ.name, "missing strand"});
        }
    }
    int max_key = 0;
    std::set<int> all_keys;
    for (std::size_t si = 0; si < genotype.strands.size(); ++si) {
        const Strand& strand = genotype.strands[si];
        const std::string path = "strands." + strand.organ;
        const Organ* organ = space.find_organ(strand.organ);
        if (organ == nullptr) {
            out.push_back({path, "organ not in space"});
            continue;
        }
        if (si < space.organs.size() && space.organs[si].name != strand.organ) {
            out.push_back({path, "strands not in organ order"});
        }
        if (organ->mirrored()) {
            if (!strand.cells.empty()) {
                out.push_back({path, "mirrored organ strand must be empty"});
            }
            continue;
        }
        if (strand.cells.empty()) {
            out.push_back({path, "strand is empty"});
            continue;
        }
        for (std::size_t i = 0; i < strand.cells.size(); ++i) {
            const CellGene& c = strand.cells[i];
            const std::string cpath = path + "[" + std::to_string(i) + "]";
            max_key = std::max(max_key, c.key);
            if (!all_keys.insert(c.key).second) {
                out.push_back({cpath + ".key", "key reused across strands"});
            }
            const CellType* type = space.find_cell(c.cell_type);
            if (type == nullptr || !organ->allows(c.cell_type)) {
                out.push_back({cpath + ".type", "cell type '" + c.cell_type + "' not allowed in organ"});
                continue;
            }
            if (c.core_attrs.size() != type->attrs.size()) {
                out.push_back({cpath + ".attrs", "attribute count mismatch"});
            } else {
                for (std::size_t a = 0; a < c.core_attrs.size(); ++a) {
                    if (!type->attrs[a].contains(c.core_attrs[a])) {
                        out.push_back({cpath + ".attrs[" + std::to_string(a) + "]", "outside domain"});
                    }
                }
            }
            std::set<std::string> seen;
            for (const auto& kind : c.affiliated) {
                if (!type->allows_affiliated(kind)) {
                    out.push_back({cpath + ".affiliated", "'" + kind + "' not allowed"});
                }
                if (!seen.insert(kind).second) {
                    out.push_back({cpath + ".affiliated", "duplicate '" + kind + "'"});
                }
            }
            if (i > 0 && !space.rule.allows(strand.cells[i - 1].cell_type, c.cell_type)) {
                out.push_back({cpath, "relation (" + strand.cells[i - 1].cell_type + ", " + c.cell_type +
                                          ") not permitted"});
            }
        }
        validate_strand_links(strand, path, out);
    }
    for (const auto& type : space.cells) {
        if (genotype.count_type(type.name) > space.ceiling(type.name)) {
            out.push_back({"cells." + type.name, "ceiling exceeded: " + std::to_string(genotype.count_type(type.name)) +
                                                     " > " + std::to_string(space.ceiling(type.name))});
        }
    }
    if (genotype.next_key <= max_key) {
        out.push_back({"next_key", "next key must exceed every used key"});
    }
    return out;
}

}  // namespace sane
