#include "sane/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sane {

namespace {

constexpr double kProbabilityTolerance = 1e-9;

void mark_inherited(Genotype& g) {
    if (g.fitness) {
        g.fitness->inherited = true;
    }
}

bool sums_to_one(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    return std::abs(total - 1.0) <= 1e-6;
}

}  // namespace

VariationConfig VariationConfig::defaults_for(const SearchSpace& space) {
    VariationConfig config;
    for (const auto& organ : space.organs) {
        config.organ_weights.push_back(organ.mirrored() ? 0.0 : organ.mutation_weight);
    }
    return config;
}

std::vector<double> VariationConfig::resolved_attr_weights(const CellType& type) const {
    const std::size_t n = type.attrs.size();
    if (auto it = attr_weights.find(type.name); it != attr_weights.end()) {
        std::vector<double> w = it->second;
        if (w.size() == n) {
            w.push_back(0.0);
        }
        return w;
    }
    const bool has_affiliated = !type.allowed_affiliated.empty();
    const double share = 1.0 / static_cast<double>(n + (has_affiliated ? 1 : 0));
    std::vector<double> w(n, share);
    w.push_back(has_affiliated ? share : 0.0);
    return w;
}

int VariationConfig::growth(const CellType& type, std::size_t attr) const {
    if (auto it = growth_factors.find(type.name); it != growth_factors.end() && attr < it->second.size()) {
        return it->second[attr];
    }
    return type.attrs.at(attr).growth;
}

Violations VariationConfig::validate(const SearchSpace& space) const {
    Violations out;
    if (p_add < 0 || p_modify < 0 || p_cross < 0) {
        out.push_back({"variation", "operator probabilities must be non-negative"});
    }
    if (std::abs(p_add + p_modify + p_cross - 1.0) > kProbabilityTolerance) {
        out.push_back({"variation", "add, modify and crossover probabilities must sum to 1"});
    }
    if (organ_weights.size() != space.organs.size()) {
        out.push_back({"variation.organ_weights", "one weight per organ required"});
    } else {
        bool any_positive = false;
        for (std::size_t i = 0; i < organ_weights.size(); ++i) {
            if (organ_weights[i] < 0) {
                out.push_back({"variation.organ_weights[" + std::to_string(i) + "]", "negative weight"});
            }
            if (space.organs[i].mirrored() && organ_weights[i] != 0.0) {
                out.push_back({"variation.organ_weights[" + std::to_string(i) + "]", "mirrored organ must have weight 0"});
            }
            any_positive = any_positive || organ_weights[i] > 0;
        }
        if (!any_positive) {
            out.push_back({"variation.organ_weights", "no organ can be varied"});
        }
    }
    for (const auto& [name, weights] : attr_weights) {
        const CellType* type = space.find_cell(name);
        const std::string path = "variation.attr_weights." + name;
        if (type == nullptr) {
            out.push_back({path, "unknown cell type"});
            continue;
        }
        if (weights.size() != type->attrs.size() && weights.size() != type->attrs.size() + 1) {
            out.push_back({path, "expected one weight per attribute, plus optionally one for affiliated modules"});
        }
        if (std::any_of(weights.begin(), weights.end(), [](double w) { return w < 0; })) {
            out.push_back({path, "negative weight"});
        }
        if (!sums_to_one(weights)) {
            out.push_back({path, "weights must sum to 1"});
        }
    }
    for (const auto& [name, steps] : growth_factors) {
        const CellType* type = space.find_cell(name);
        const std::string path = "variation.growth_factors." + name;
        if (type == nullptr) {
            out.push_back({path, "unknown cell type"});
            continue;
        }
        if (steps.size() != type->attrs.size()) {
            out.push_back({path, "expected one growth factor per attribute"});
        }
        if (std::any_of(steps.begin(), steps.end(), [](int s) { return s < 1; })) {
            out.push_back({path, "growth factors must be >= 1"});
        }
    }
    return out;
}

std::vector<InsertionOption> insertion_options(const Genotype& genotype, const SearchSpace& space,
                                               const Organ& organ) {
    std::vector<InsertionOption> out;
    if (organ.mirrored()) {
        return out;
    }
    const Strand& strand = genotype.strand(organ.name);
    std::vector<std::string> below_ceiling;
    for (const auto& type : organ.allowed_cells) {
        if (genotype.count_type(type) < space.ceiling(type)) {
            below_ceiling.push_back(type);
        }
    }
    const auto& cells = strand.cells;
    for (std::size_t pos = 0; pos <= cells.size(); ++pos) {
        InsertionOption option{pos, {}};
        for (const auto& type : below_ceiling) {
            const bool pred_ok = pos == 0 || space.rule.allows(cells[pos - 1].cell_type, type);
            const bool succ_ok = pos == cells.size() || space.rule.allows(type, cells[pos].cell_type);
            if (pred_ok && succ_ok) {
                option.cell_types.push_back(type);
            }
        }
        if (!option.cell_types.empty()) {
            out.push_back(std::move(option));
        }
    }
    return out;
}

MutationOutcome mutate_add_cell(Genotype& genotype, const SearchSpace& space, Rng& rng, const VariationConfig& config) {
    std::vector<double> weights(space.organs.size(), 0.0);
    std::vector<std::vector<InsertionOption>> options(space.organs.size());
    for (std::size_t i = 0; i < space.organs.size(); ++i) {
        options[i] = insertion_options(genotype, space, space.organs[i]);
        if (!options[i].empty()) {
            weights[i] = config.organ_weights.at(i);
        }
    }
    if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0; })) {
        return MutationOutcome::saturated;
    }
    const std::size_t organ_index = rng.weighted(weights);
    const auto& organ_options = options[organ_index];
    const InsertionOption& where = organ_options[rng.index(organ_options.size())];
    const std::string& type_name = where.cell_types[rng.index(where.cell_types.size())];
    const CellType& type = space.cell(type_name);

    Strand& strand = genotype.strand(space.organs[organ_index].name);
    CellGene cell{genotype.next_key++, type.name, kBoundaryKey, kBoundaryKey, type.initial_core_attrs,
                  type.initial_affiliated};
    strand.cells.insert(strand.cells.begin() + static_cast<std::ptrdiff_t>(where.position), std::move(cell));
    relink(strand);
    mark_inherited(genotype);
    return MutationOutcome::applied;
}

bool step_attribute(CellGene& cell, const CellType& type, std::size_t attr, int sign, int growth) {
    const auto& domain = type.attrs.at(attr);
    const int current = cell.core_attrs.at(attr);
    const int next = std::clamp(current + sign * growth, domain.min, domain.max);
    cell.core_attrs[attr] = next;
    return next != current;
}

std::vector<AffiliatedEdit> affiliated_edits(const CellGene& cell, const CellType& type) {
    std::vector<std::string> missing;
    for (const auto& kind : type.allowed_affiliated) {
        if (std::find(cell.affiliated.begin(), cell.affiliated.end(), kind) == cell.affiliated.end()) {
            missing.push_back(kind);
        }
    }
    std::vector<AffiliatedEdit> edits;
    for (const auto& m : missing) {
        edits.push_back({AffiliatedEditKind::add, {}, m});
    }
    for (const auto& p : cell.affiliated) {
        edits.push_back({AffiliatedEditKind::remove, p, {}});
    }
    for (const auto& p : cell.affiliated) {
        for (const auto& m : missing) {
            edits.push_back({AffiliatedEditKind::swap, p, m});
        }
    }
    return edits;
}

void apply_affiliated_edit(CellGene& cell, const AffiliatedEdit& edit) {
    auto& mods = cell.affiliated;
    switch (edit.kind) {
        case AffiliatedEditKind::add:
            mods.push_back(edit.missing);
            break;
        case AffiliatedEditKind::remove:
            mods.erase(std::remove(mods.begin(), mods.end(), edit.present), mods.end());
            break;
        case AffiliatedEditKind::swap:
            std::replace(mods.begin(), mods.end(), edit.present, edit.missing);
            break;
    }
}

MutationOutcome mutate_modify_cell(Genotype& genotype, const SearchSpace& space, Rng& rng,
                                   const VariationConfig& config) {
    std::vector<double> weights(space.organs.size(), 0.0);
    for (std::size_t i = 0; i < space.organs.size(); ++i) {
        const Strand* s = genotype.find_strand(space.organs[i].name);
        if (!space.organs[i].mirrored() && s != nullptr && !s->cells.empty()) {
            weights[i] = config.organ_weights.at(i);
        }
    }
    if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0; })) {
        return MutationOutcome::unchanged;
    }
    Strand& strand = genotype.strand(space.organs[rng.weighted(weights)].name);
    CellGene& cell = strand.cells[rng.index(strand.cells.size())];
    const CellType& type = space.cell(cell.cell_type);

    const std::vector<double> attr_weights = config.resolved_attr_weights(type);
    const std::size_t choice = rng.weighted(attr_weights);
    bool changed = false;
    if (choice < type.attrs.size()) {
        const int sign = rng.bernoulli(0.5) ? 1 : -1;
        changed = step_attribute(cell, type, choice, sign, config.growth(type, choice));
    } else {
        const auto edits = affiliated_edits(cell, type);
        if (!edits.empty()) {
            apply_affiliated_edit(cell, edits[rng.index(edits.size())]);
            changed = true;
        }
    }
    if (!changed) {
        return MutationOutcome::unchanged;
    }
    mark_inherited(genotype);
    return MutationOutcome::applied;
}

std::pair<Genotype, Genotype> crossover_organ(const Genotype& parent_a, const Genotype& parent_b,
                                              const SearchSpace& space, std::string_view organ, IdAllocator& ids) {
    Genotype c = parent_a;
    Genotype d = parent_b;
    std::swap(c.strand(organ).cells, d.strand(organ).cells);
    const bool within_ceilings = std::all_of(space.cells.begin(), space.cells.end(), [&](const CellType& t) {
        return c.count_type(t.name) <= space.ceiling(t.name) && d.count_type(t.name) <= space.ceiling(t.name);
    });
    if (!within_ceilings) {
        // A cell type shared between organs would overflow; keep the parents' strands.
        std::swap(c.strand(organ).cells, d.strand(organ).cells);
    }
    c.id = ids.allocate();
    d.id = ids.allocate();
    renumber_keys(c);
    renumber_keys(d);
    mark_inherited(c);
    mark_inherited(d);
    return {std::move(c), std::move(d)};
}

std::pair<Genotype, Genotype> crossover(const Genotype& parent_a, const Genotype& parent_b, const SearchSpace& space,
                                        const VariationConfig& config, Rng& rng, IdAllocator& ids) {
    std::vector<double> weights(space.organs.size(), 0.0);
    for (std::size_t i = 0; i < space.organs.size(); ++i) {
        weights[i] = space.organs[i].mirrored() ? 0.0 : config.organ_weights.at(i);
    }
    const std::size_t organ = rng.weighted(weights);
    return crossover_organ(parent_a, parent_b, space, space.organs[organ].name, ids);
}

VariationKind draw_variation_kind(const VariationConfig& config, Rng& rng) {
    const double weights[] = {config.p_add, config.p_modify, config.p_cross};
    switch (rng.weighted(weights)) {
        case 0: return VariationKind::add;
        case 1: return VariationKind::modify;
        default: return VariationKind::crossover;
    }
}

VariationRoundStats vary_round(std::vector<Genotype>& pool, const SearchSpace& space, const VariationConfig& config,
                               Rng& rng, IdAllocator& ids) {
    VariationRoundStats stats;
    if (pool.empty()) {
        return stats;
    }
    std::vector<VariationKind> kinds;
    kinds.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        kinds.push_back(draw_variation_kind(config, rng));
    }

    std::vector<std::size_t> crossing;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (kinds[i] == VariationKind::crossover) {
            crossing.push_back(i);
        }
    }
    Rng pairing = rng.split("pairing");
    pairing.shuffle(crossing);
    if (crossing.size() % 2 == 1) {
        kinds[crossing.back()] = VariationKind::modify;
        crossing.pop_back();
        ++stats.fallback_modifies;
    }

    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (kinds[i] == VariationKind::add) {
            if (mutate_add_cell(pool[i], space, rng, config) == MutationOutcome::saturated) {
                ++stats.saturated;
            } else {
                ++stats.added;
            }
        } else if (kinds[i] == VariationKind::modify) {
            mutate_modify_cell(pool[i], space, rng, config);
            ++stats.modified;
        }
    }
    for (std::size_t p = 0; p + 1 < crossing.size(); p += 2) {
        const std::size_t a = crossing[p];
        const std::size_t b = crossing[p + 1];
        auto [c, d] = crossover(pool[a], pool[b], space, config, rng, ids);
        pool[a] = std::move(c);
        pool[b] = std::move(d);
        ++stats.crossovers;
    }
    return stats;
}

}  // namespace sane
