#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sane/genome.hpp"

namespace sane {

struct SpeciationConfig {
    /// Coefficient per (organ, cell type); pairs not listed use default_coefficient.
    std::map<std::pair<std::string, std::string>, double> coefficients;
    double default_coefficient = 1.0;
    double tau_d = 1.0;
    int species_limit = 10;

    double coefficient(const std::string& organ, const std::string& cell_type) const;
    Violations validate() const;

    friend bool operator==(const SpeciationConfig&, const SpeciationConfig&) = default;
};

struct Species {
    int id = 0;
    Genotype representative;
    std::vector<GenotypeId> members;
    int age = 0;

    friend bool operator==(const Species&, const Species&) = default;
};

struct SpeciesSet {
    /// Sorted by ascending id.
    std::vector<Species> species;
    int next_id = 1;

    const Species* find(int id) const;
    Species* find(int id);
    std::size_t member_count() const;

    friend bool operator==(const SpeciesSet&, const SpeciesSet&) = default;
};

/// Weighted sum over (organ, cell type) of the absolute cell-count gap.
double distance(const Genotype& a, const Genotype& b, const SpeciationConfig& config);

enum class AssignmentKind { representative, joined, founder, overflow };

/// How one genotype ended up in its species; `distance` is to the
/// representative at the time of assignment.
struct Assignment {
    GenotypeId genotype = 0;
    int species = 0;
    double distance = 0.0;
    AssignmentKind kind = AssignmentKind::joined;
};

/// Refreshes representatives from the incoming genotypes, then assigns every
/// remaining genotype to its nearest species within tau_d, founding new
/// species up to species_limit; overflow joins the nearest species.
/// Species that find no representative are dropped.
SpeciesSet speciate(std::span<const Genotype> genotypes, const SpeciesSet& previous, const SpeciationConfig& config,
                    std::vector<Assignment>* log = nullptr);

}  // namespace sane
