#include "sane/speciation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

namespace sane {

double SpeciationConfig::coefficient(const std::string& organ, const std::string& cell_type) const {
    auto it = coefficients.find({organ, cell_type});
    return it == coefficients.end() ? default_coefficient : it->second;
}

Violations SpeciationConfig::validate() const {
    Violations out;
    if (!(tau_d > 0.0)) {
        out.push_back({"speciation.tau_d", "threshold must be positive"});
    }
    if (species_limit < 1) {
        out.push_back({"speciation.species_limit", "must be >= 1"});
    }
    if (default_coefficient < 0.0) {
        out.push_back({"speciation.default_coefficient", "must be non-negative"});
    }
    for (const auto& [key, c] : coefficients) {
        if (c < 0.0) {
            out.push_back({"speciation.coefficients." + key.first + "/" + key.second, "must be non-negative"});
        }
    }
    return out;
}

const Species* SpeciesSet::find(int id) const {
    auto it = std::find_if(species.begin(), species.end(), [&](const Species& s) { return s.id == id; });
    return it == species.end() ? nullptr : &*it;
}

Species* SpeciesSet::find(int id) {
    auto it = std::find_if(species.begin(), species.end(), [&](const Species& s) { return s.id == id; });
    return it == species.end() ? nullptr : &*it;
}

std::size_t SpeciesSet::member_count() const {
    std::size_t total = 0;
    for (const auto& s : species) {
        total += s.members.size();
    }
    return total;
}

double distance(const Genotype& a, const Genotype& b, const SpeciationConfig& config) {
    const auto counts_a = cell_counts(a);
    const auto counts_b = cell_counts(b);
    double total = 0.0;
    auto ia = counts_a.begin();
    auto ib = counts_b.begin();
    // Merge walk over the two sorted count maps.
    while (ia != counts_a.end() || ib != counts_b.end()) {
        if (ib == counts_b.end() || (ia != counts_a.end() && ia->first < ib->first)) {
            total += config.coefficient(ia->first.first, ia->first.second) * ia->second;
            ++ia;
        } else if (ia == counts_a.end() || ib->first < ia->first) {
            total += config.coefficient(ib->first.first, ib->first.second) * ib->second;
            ++ib;
        } else {
            total += config.coefficient(ia->first.first, ia->first.second) * std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return total;
}

SpeciesSet speciate(std::span<const Genotype> genotypes, const SpeciesSet& previous, const SpeciationConfig& config,
                    std::vector<Assignment>* log) {
    SpeciesSet out;
    out.next_id = previous.next_id;
    std::vector<bool> claimed(genotypes.size(), false);

    for (const auto& old : previous.species) {
        double best_distance = config.tau_d;
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < genotypes.size(); ++i) {
            if (claimed[i]) {
                continue;
            }
            const double d = distance(genotypes[i], old.representative, config);
            if (d < best_distance) {
                best_distance = d;
                best = i;
            }
        }
        if (!best) {
            continue;
        }
        claimed[*best] = true;
        out.species.push_back(Species{old.id, genotypes[*best], {genotypes[*best].id}, old.age + 1});
        if (log != nullptr) {
            log->push_back({genotypes[*best].id, old.id, best_distance, AssignmentKind::representative});
        }
    }

    for (std::size_t i = 0; i < genotypes.size(); ++i) {
        if (claimed[i]) {
            continue;
        }
        const Genotype& g = genotypes[i];
        Species* target = nullptr;
        double target_distance = config.tau_d;
        Species* nearest = nullptr;
        double nearest_distance = std::numeric_limits<double>::infinity();
        for (auto& s : out.species) {
            const double d = distance(g, s.representative, config);
            if (d < target_distance) {
                target_distance = d;
                target = &s;
            }
            if (d < nearest_distance) {
                nearest_distance = d;
                nearest = &s;
            }
        }
        if (target != nullptr) {
            target->members.push_back(g.id);
            if (log != nullptr) {
                log->push_back({g.id, target->id, target_distance, AssignmentKind::joined});
            }
        } else if (static_cast<int>(out.species.size()) < config.species_limit) {
            const int id = out.next_id++;
            out.species.push_back(Species{id, g, {g.id}, 0});
            if (log != nullptr) {
                log->push_back({g.id, id, 0.0, AssignmentKind::founder});
            }
        } else {
            nearest->members.push_back(g.id);
            if (log != nullptr) {
                log->push_back({g.id, nearest->id, nearest_distance, AssignmentKind::overflow});
            }
        }
    }

    std::sort(out.species.begin(), out.species.end(), [](const Species& a, const Species& b) { return a.id < b.id; });
    return out;
}

}  // namespace sane
