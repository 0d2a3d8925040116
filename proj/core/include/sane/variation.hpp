#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sane/genome.hpp"
#include "sane/rng.hpp"
#include "sane/search_space.hpp"

namespace sane {

enum class VariationKind { add, modify, crossover };

struct VariationConfig {
    /// Per organ, in space order. Mirrored organs must carry weight 0.
    std::vector<double> organ_weights;
    double p_add = 0.25;
    double p_modify = 0.5;
    double p_cross = 0.25;
    /// Per cell type: one weight per core attribute, optionally followed by
    /// one weight for the affiliated-module edit. Missing types are uniform.
    std::map<std::string, std::vector<double>> attr_weights;
    /// Per cell type: mutation step per core attribute. Missing types use the
    /// space's attribute growth factors.
    std::map<std::string, std::vector<int>> growth_factors;

    /// Organ weights from the space, uniform attribute weights, space growth factors.
    static VariationConfig defaults_for(const SearchSpace& space);

    Violations validate(const SearchSpace& space) const;

    /// Resolved attribute weights of a type (core attributes then affiliated).
    std::vector<double> resolved_attr_weights(const CellType& type) const;
    int growth(const CellType& type, std::size_t attr) const;

    friend bool operator==(const VariationConfig&, const VariationConfig&) = default;
};

/// Hands out genotype ids in increasing order.
class IdAllocator {
public:
    explicit IdAllocator(GenotypeId next = 1) : next_(next) {}
    GenotypeId allocate() { return next_++; }
    GenotypeId peek() const { return next_; }

private:
    GenotypeId next_;
};

enum class MutationOutcome { applied, saturated, unchanged };

/// A legal place to add a cell: insert before index `position` (== size means tail).
struct InsertionOption {
    std::size_t position;
    std::vector<std::string> cell_types;
};

/// Positions (head to tail) where at least one allowed, below-ceiling cell
/// type can be inserted without breaking the connection relations.
std::vector<InsertionOption> insertion_options(const Genotype& genotype, const SearchSpace& space,
                                               const Organ& organ);

MutationOutcome mutate_add_cell(Genotype& genotype, const SearchSpace& space, Rng& rng, const VariationConfig& config);

MutationOutcome mutate_modify_cell(Genotype& genotype, const SearchSpace& space, Rng& rng,
                                   const VariationConfig& config);

/// Steps one core attribute by `sign * growth`, clamped to its domain.
bool step_attribute(CellGene& cell, const CellType& type, std::size_t attr, int sign, int growth);

enum class AffiliatedEditKind { add, remove, swap };
struct AffiliatedEdit {
    AffiliatedEditKind kind;
    std::string present;  // removed or swapped-out module
    std::string missing;  // added or swapped-in module
};

std::vector<AffiliatedEdit> affiliated_edits(const CellGene& cell, const CellType& type);
void apply_affiliated_edit(CellGene& cell, const AffiliatedEdit& edit);

/// Swaps the strand of one organ (drawn by organ weight) between the parents.
/// Children get fresh ids and renumbered cell keys.
std::pair<Genotype, Genotype> crossover(const Genotype& parent_a, const Genotype& parent_b, const SearchSpace& space,
                                        const VariationConfig& config, Rng& rng, IdAllocator& ids);

/// Crossover of a named organ; used by crossover() once the organ is drawn.
/// When the swap would push a shared cell type over its ceiling the children
/// keep their parents' strands.
std::pair<Genotype, Genotype> crossover_organ(const Genotype& parent_a, const Genotype& parent_b,
                                              const SearchSpace& space, std::string_view organ, IdAllocator& ids);

VariationKind draw_variation_kind(const VariationConfig& config, Rng& rng);

struct VariationRoundStats {
    int added = 0;
    int saturated = 0;
    int modified = 0;
    int crossovers = 0;
    int fallback_modifies = 0;
};

/// One variation round over an offspring pool: each member draws add, modify
/// or crossover; crossover members are paired at random without replacement,
/// an unpaired one is modified instead. Children replace their parents in place.
VariationRoundStats vary_round(std::vector<Genotype>& pool, const SearchSpace& space, const VariationConfig& config,
                               Rng& rng, IdAllocator& ids);

}  // namespace sane
