#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "sane/engine.hpp"
#include "sane/fitness.hpp"
#include "sane/search_space.hpp"
#include "sane/variation.hpp"

namespace sane::fixtures {

/// One organ holding `ceiling` binary-attribute cells; Z = 4 * ceiling bits.
inline SearchSpace subset_sum_space(int ceiling) {
    SearchSpace space;
    space.cells.push_back(CellType{"unit",
                                   CoreKind::conv,
                                   {{"out_channels", 1, 2, 1}, {"kernel", 1, 2, 1}, {"stride", 1, 2, 1}, {"padding", 0, 1, 1}},
                                   {},
                                   {1, 1, 1, 0},
                                   {}});
    space.organs.push_back(Organ{"body", {"unit"}, 1.0, std::nullopt});
    space.rule = {1, {{"unit", "unit"}}};
    space.cell_quantity_ceilings["unit"] = ceiling;
    return space;
}

/// Defaults for population, NpI/TpG, operators and species; thresholds just under Z.
inline EngineConfig subset_sum_config(const SearchSpace& space, int z, std::uint64_t seed, int tau_k = 5000) {
    EngineConfig config = EngineConfig::defaults_for(space);
    config.seed = seed;
    config.tau_k = tau_k;
    config.estimation.tau_F = z - 0.5;
    config.estimation.tau_Fc = z - 0.5;
    return config;
}

/// Evaluator backed by a plain function; counts calls.
class FunctionEvaluator final : public Evaluator {
public:
    using Fn = std::function<double(const Genotype&, const EvaluationRequest&)>;

    explicit FunctionEvaluator(Fn fn, bool phenotype = false) : fn_(std::move(fn)), phenotype_(phenotype) {}

    EvaluationResponse evaluate(const Genotype& genotype, const EvaluationRequest& request) override {
        ++calls;
        return EvaluationResponse::ok(request.genotype_id, fn_(genotype, request));
    }
    bool needs_phenotype() const override { return phenotype_; }

    int calls = 0;

private:
    Fn fn_;
    bool phenotype_;
};

/// Deterministic pseudo-random score in [0, 1) from a genotype's structure.
inline double structure_score(const Genotype& g) {
    std::string text;
    for (const auto& s : g.strands) {
        text += s.organ + ":";
        for (const auto& c : s.cells) {
            text += c.cell_type;
            for (int a : c.core_attrs) {
                text += "," + std::to_string(a);
            }
            for (const auto& m : c.affiliated) {
                text += "+" + m;
            }
            text += ";";
        }
    }
    return static_cast<double>(fnv1a64(text) >> 11) * 0x1.0p-53;
}

/// Applies `steps` random variations (add, modify, or crossover with a
/// second random walker) to a minimal genotype.
inline Genotype random_genotype(const SearchSpace& space, Rng& rng, int steps, IdAllocator& ids) {
    const VariationConfig config = VariationConfig::defaults_for(space);
    Genotype g = minimal_genotype(space, ids.allocate());
    for (int i = 0; i < steps; ++i) {
        if (rng.bernoulli(0.5)) {
            mutate_add_cell(g, space, rng, config);
        } else {
            mutate_modify_cell(g, space, rng, config);
        }
    }
    return g;
}

}  // namespace sane::fixtures
