#include "sane/search_space.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sane {

std::string_view to_string(CoreKind kind) {
    switch (kind) {
        case CoreKind::conv: return "conv";
        case CoreKind::linear: return "linear";
        case CoreKind::convtranspose: return "convtranspose";
        case CoreKind::convlstm: return "convlstm";
    }
    return "conv";
}

std::optional<CoreKind> parse_core_kind(std::string_view text) {
    if (text == "conv") return CoreKind::conv;
    if (text == "linear") return CoreKind::linear;
    if (text == "convtranspose") return CoreKind::convtranspose;
    if (text == "convlstm") return CoreKind::convlstm;
    return std::nullopt;
}

const std::vector<std::string>& core_attr_names(CoreKind kind) {
    static const std::vector<std::string> conv{"out_channels", "kernel", "stride", "padding"};
    static const std::vector<std::string> linear{"width"};
    static const std::vector<std::string> convlstm{"kernel"};
    switch (kind) {
        case CoreKind::conv:
        case CoreKind::convtranspose: return conv;
        case CoreKind::linear: return linear;
        case CoreKind::convlstm: return convlstm;
    }
    return conv;
}

const std::vector<std::string>& known_affiliated_kinds() {
    static const std::vector<std::string> kinds{"batchnorm", "groupnorm", "relu", "leakyrelu", "maxpool"};
    return kinds;
}

bool CellType::allows_affiliated(std::string_view kind) const {
    return std::find(allowed_affiliated.begin(), allowed_affiliated.end(), kind) != allowed_affiliated.end();
}

bool Organ::allows(std::string_view cell_type) const {
    return std::find(allowed_cells.begin(), allowed_cells.end(), cell_type) != allowed_cells.end();
}

bool ConnectionRule::allows(std::string_view from, std::string_view to) const {
    return std::any_of(relations.begin(), relations.end(),
                       [&](const auto& r) { return r.first == from && r.second == to; });
}

const CellType* SearchSpace::find_cell(std::string_view name) const {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const CellType& c) { return c.name == name; });
    return it == cells.end() ? nullptr : &*it;
}

const CellType& SearchSpace::cell(std::string_view name) const {
    if (const auto* c = find_cell(name)) {
        return *c;
    }
    throw std::out_of_range("unknown cell type '" + std::string(name) + "'");
}

const Organ* SearchSpace::find_organ(std::string_view name) const {
    auto it = std::find_if(organs.begin(), organs.end(), [&](const Organ& o) { return o.name == name; });
    return it == organs.end() ? nullptr : &*it;
}

std::size_t SearchSpace::organ_index(std::string_view name) const {
    for (std::size_t i = 0; i < organs.size(); ++i) {
        if (organs[i].name == name) {
            return i;
        }
    }
    throw std::out_of_range("unknown organ '" + std::string(name) + "'");
}

int SearchSpace::ceiling(std::string_view cell_type) const {
    auto it = cell_quantity_ceilings.find(std::string(cell_type));
    return it == cell_quantity_ceilings.end() ? kDefaultCellCeiling : it->second;
}

std::string mirrored_cell_type(const SearchSpace& space, const Organ& mirrored, std::string_view source_type) {
    const CellType* source = space.find_cell(source_type);
    if (source == nullptr) {
        return {};
    }
    if (source->core_kind == CoreKind::conv) {
        for (const auto& name : mirrored.allowed_cells) {
            const CellType* c = space.find_cell(name);
            if (c != nullptr && c->core_kind == CoreKind::convtranspose) {
                return name;
            }
        }
        return {};
    }
    return mirrored.allows(source_type) ? std::string(source_type) : std::string{};
}

Violations validate_space(const SearchSpace& space) {
    Violations out;
    auto add = [&](std::string path, std::string message) { out.push_back({std::move(path), std::move(message)}); };

    if (space.cells.empty()) {
        add("cells", "cell catalog is empty");
    }
    std::set<std::string> cell_names;
    for (std::size_t i = 0; i < space.cells.size(); ++i) {
        const CellType& c = space.cells[i];
        const std::string path = "cells[" + std::to_string(i) + "]";
        if (c.name.empty()) {
            add(path + ".name", "empty name");
        }
        if (!cell_names.insert(c.name).second) {
            add(path + ".name", "duplicate cell type '" + c.name + "'");
        }
        const auto& expected = core_attr_names(c.core_kind);
        if (c.attrs.empty()) {
            add(path + ".attrs", "core attribute schema is empty");
        } else if (c.attrs.size() != expected.size()) {
            add(path + ".attrs", "core kind '" + std::string(to_string(c.core_kind)) + "' expects " +
                                     std::to_string(expected.size()) + " attributes");
        }
        for (std::size_t a = 0; a < c.attrs.size(); ++a) {
            const auto& d = c.attrs[a];
            const std::string apath = path + ".attrs[" + std::to_string(a) + "]";
            const int floor = d.name == "padding" ? 0 : 1;
            if (d.min < floor) {
                add(apath + ".min", "domain minimum below " + std::to_string(floor));
            }
            if (d.max < d.min) {
                add(apath + ".max", "empty domain");
            }
            if (d.growth < 1) {
                add(apath + ".growth", "growth factor must be >= 1");
            }
        }
        if (c.initial_core_attrs.size() != c.attrs.size()) {
            add(path + ".initial_core_attrs", "length differs from attribute schema");
        } else {
            for (std::size_t a = 0; a < c.attrs.size(); ++a) {
                if (!c.attrs[a].contains(c.initial_core_attrs[a])) {
                    add(path + ".initial_core_attrs[" + std::to_string(a) + "]", "outside domain");
                }
            }
        }
        const auto& known = known_affiliated_kinds();
        for (std::size_t a = 0; a < c.allowed_affiliated.size(); ++a) {
            if (std::find(known.begin(), known.end(), c.allowed_affiliated[a]) == known.end()) {
                add(path + ".allowed_affiliated[" + std::to_string(a) + "]",
                    "unknown affiliated module '" + c.allowed_affiliated[a] + "'");
            }
        }
        std::set<std::string> seen;
        for (std::size_t a = 0; a < c.initial_affiliated.size(); ++a) {
            const auto& kind = c.initial_affiliated[a];
            if (!c.allows_affiliated(kind)) {
                add(path + ".initial_affiliated[" + std::to_string(a) + "]", "'" + kind + "' not allowed");
            }
            if (!seen.insert(kind).second) {
                add(path + ".initial_affiliated[" + std::to_string(a) + "]", "duplicate '" + kind + "'");
            }
        }
    }

    if (space.organs.empty()) {
        add("organs", "organ list is empty");
    }
    std::set<std::string> organ_names;
    for (std::size_t i = 0; i < space.organs.size(); ++i) {
        const Organ& o = space.organs[i];
        const std::string path = "organs[" + std::to_string(i) + "]";
        if (!organ_names.insert(o.name).second || o.name.empty()) {
            add(path + ".name", "empty or duplicate organ name");
        }
        if (cell_names.count(o.name) != 0) {
            add(path + ".name", "organ name collides with a cell type");
        }
        if (o.allowed_cells.empty()) {
            add(path + ".allowed_cells", "no allowed cell types");
        }
        for (const auto& name : o.allowed_cells) {
            if (cell_names.count(name) == 0) {
                add(path + ".allowed_cells", "undeclared cell type '" + name + "'");
            }
        }
        if (o.mutation_weight < 0.0) {
            add(path + ".mutation_weight", "negative weight");
        }
        if (o.mirror_of) {
            const Organ* source = space.find_organ(*o.mirror_of);
            if (source == nullptr || source->mirrored() || source == &o) {
                add(path + ".mirror_of", "must name a non-mirrored organ");
            } else {
                for (const auto& name : source->allowed_cells) {
                    if (cell_names.count(name) != 0 && mirrored_cell_type(space, o, name).empty()) {
                        add(path + ".allowed_cells", "no mirror image for cell type '" + name + "'");
                    }
                }
            }
        }
    }
    const bool any_evolvable = std::any_of(space.organs.begin(), space.organs.end(),
                                           [](const Organ& o) { return !o.mirrored() && o.mutation_weight > 0.0; });
    if (!space.organs.empty() && !any_evolvable) {
        add("organs", "no evolvable organ with positive weight");
    }

    if (space.rule.degree < 1) {
        add("rule.degree", "connection degree must be >= 1");
    }
    for (std::size_t i = 0; i < space.rule.relations.size(); ++i) {
        const auto& [from, to] = space.rule.relations[i];
        const bool organ_pair = organ_names.count(from) != 0 && organ_names.count(to) != 0;
        const bool cell_pair = cell_names.count(from) != 0 && cell_names.count(to) != 0;
        if (!organ_pair && !cell_pair) {
            add("rule.relations[" + std::to_string(i) + "]",
                "(" + from + ", " + to + ") is neither an organ pair nor a cell-type pair");
        }
    }

    std::map<std::string, int> initial_counts;
    for (const auto& o : space.organs) {
        if (!o.mirrored() && !o.allowed_cells.empty()) {
            ++initial_counts[o.allowed_cells.front()];
        }
    }
    for (const auto& [name, ceiling] : space.cell_quantity_ceilings) {
        if (cell_names.count(name) == 0) {
            add("cell_quantity_ceilings." + name, "undeclared cell type");
        }
    }
    for (const auto& [name, count] : initial_counts) {
        if (space.ceiling(name) < count) {
            add("cell_quantity_ceilings." + name, "ceiling below the minimal genotype's count");
        }
    }
    return out;
}

std::optional<BuiltinSpace> parse_builtin_space(std::string_view name) {
    if (name == "cnn") return BuiltinSpace::cnn;
    if (name == "gan") return BuiltinSpace::gan;
    if (name == "lstm") return BuiltinSpace::lstm;
    return std::nullopt;
}

std::string_view to_string(BuiltinSpace kind) {
    switch (kind) {
        case BuiltinSpace::cnn: return "cnn";
        case BuiltinSpace::gan: return "gan";
        case BuiltinSpace::lstm: return "lstm";
    }
    return "cnn";
}

namespace {

std::vector<AttrDescriptor> conv_attrs(int channel_step, int kernel_step, int stride_step, int padding_step) {
    return {{"out_channels", 8, 1024, channel_step},
            {"kernel", 1, 11, kernel_step},
            {"stride", 1, 4, stride_step},
            {"padding", 0, 5, padding_step}};
}

CellType conv_cell(std::string name, CoreKind kind, std::vector<AttrDescriptor> attrs, std::vector<std::string> allowed,
                   std::vector<int> initial, std::vector<std::string> initial_affiliated) {
    return CellType{std::move(name), kind, std::move(attrs), std::move(allowed), std::move(initial),
                    std::move(initial_affiliated)};
}

std::map<std::string, int> default_ceilings(const std::vector<CellType>& cells) {
    std::map<std::string, int> out;
    for (const auto& c : cells) {
        out[c.name] = kDefaultCellCeiling;
    }
    return out;
}

}  // namespace

SearchSpace builtin_space(BuiltinSpace kind) {
    SearchSpace space;
    switch (kind) {
        case BuiltinSpace::cnn:
            space.cells = {
                conv_cell("conv", CoreKind::conv, conv_attrs(8, 2, 2, 2), {"batchnorm", "relu", "maxpool"},
                          {16, 3, 1, 0}, {"batchnorm", "relu", "maxpool"}),
                conv_cell("linear", CoreKind::linear, {{"width", 16, 4096, 16}}, {"relu"}, {32}, {"relu"}),
            };
            space.organs = {{"feature", {"conv"}, 0.6, std::nullopt}, {"classifier", {"linear"}, 0.4, std::nullopt}};
            space.rule = {1, {{"feature", "classifier"}, {"conv", "conv"}, {"linear", "linear"}}};
            break;
        case BuiltinSpace::gan:
            space.cells = {
                conv_cell("convtranspose", CoreKind::convtranspose, conv_attrs(8, 2, 1, 1), {"batchnorm", "relu"},
                          {32, 2, 1, 0}, {"batchnorm", "relu"}),
                conv_cell("conv", CoreKind::conv, conv_attrs(8, 2, 1, 1), {"batchnorm", "leakyrelu"}, {32, 2, 1, 0},
                          {"batchnorm", "leakyrelu"}),
            };
            space.organs = {{"generator", {"convtranspose"}, 0.5, std::nullopt},
                            {"discriminator", {"conv"}, 0.5, std::nullopt}};
            space.rule = {1, {{"generator", "discriminator"}, {"convtranspose", "convtranspose"}, {"conv", "conv"}}};
            break;
        case BuiltinSpace::lstm:
            space.cells = {
                conv_cell("conv", CoreKind::conv, conv_attrs(16, 2, 1, 1), {"batchnorm", "leakyrelu"}, {16, 3, 1, 0},
                          {"leakyrelu"}),
                conv_cell("convtranspose", CoreKind::convtranspose, conv_attrs(16, 2, 1, 1), {"batchnorm", "leakyrelu"},
                          {16, 3, 1, 0}, {"leakyrelu"}),
                conv_cell("convlstm", CoreKind::convlstm, {{"kernel", 1, 11, 2}}, {"groupnorm"}, {3}, {"groupnorm"}),
            };
            space.organs = {{"encoder", {"conv", "convlstm"}, 1.0, std::nullopt},
                            {"decoder", {"convtranspose", "convlstm"}, 0.0, std::string("encoder")}};
            space.rule = {1,
                          {{"encoder", "decoder"},
                           {"conv", "conv"},
                           {"convtranspose", "convtranspose"},
                           {"convlstm", "convlstm"},
                           {"conv", "convlstm"},
                           {"convlstm", "conv"},
                           {"convlstm", "convtranspose"},
                           {"convtranspose", "convlstm"}}};
            break;
    }
    space.cell_quantity_ceilings = default_ceilings(space.cells);
    return space;
}

std::vector<int> default_input_shape(BuiltinSpace kind) {
    switch (kind) {
        case BuiltinSpace::cnn: return {3, 32, 32};
        case BuiltinSpace::gan: return {100, 1, 1};
        case BuiltinSpace::lstm: return {1, 64, 64, 10};
    }
    return {};
}

std::optional<BuiltinSpace> identify_builtin(const SearchSpace& space) {
    for (auto kind : {BuiltinSpace::cnn, BuiltinSpace::gan, BuiltinSpace::lstm}) {
        const SearchSpace reference = builtin_space(kind);
        if (reference.organs.size() != space.organs.size()) {
            continue;
        }
        bool same = true;
        for (std::size_t i = 0; i < space.organs.size(); ++i) {
            same = same && reference.organs[i].name == space.organs[i].name;
        }
        if (same) {
            return kind;
        }
    }
    return std::nullopt;
}

}  // namespace sane
