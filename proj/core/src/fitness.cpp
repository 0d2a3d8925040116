#include "sane/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace sane {

std::string_view to_string(EvaluationPhase phase) {
    return phase == EvaluationPhase::incomplete ? "incomplete" : "complete";
}

EvaluationResponse EvaluationResponse::ok(GenotypeId id, double fitness) {
    EvaluationResponse r;
    r.genotype_id = id;
    r.fitness = fitness;
    r.status = EvaluationStatus::ok;
    return r;
}

EvaluationResponse EvaluationResponse::error(GenotypeId id, std::string message) {
    EvaluationResponse r;
    r.genotype_id = id;
    r.fitness = kWorstFitness;
    r.status = EvaluationStatus::error;
    r.message = std::move(message);
    return r;
}

SubsetSumProblem SubsetSumProblem::all_ones(StateSchema schema) {
    SubsetSumProblem problem{std::move(schema), {}};
    problem.target.assign(problem.schema.total_bits(), '1');
    return problem;
}

double subset_sum_fitness(const Genotype& genotype, const SubsetSumProblem& problem) {
    const std::string bits = encode_binary(genotype, problem.schema);
    if (bits.size() != problem.target.size()) {
        throw EncodingError("target length differs from the schema's bit count");
    }
    std::size_t hamming = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        hamming += bits[i] != problem.target[i] ? 1 : 0;
    }
    return static_cast<double>(bits.size() - hamming);
}

EvaluationResponse SubsetSumEvaluator::evaluate(const Genotype& genotype, const EvaluationRequest& request) {
    try {
        auto response = EvaluationResponse::ok(request.genotype_id, subset_sum_fitness(genotype, problem_));
        response.metrics["hamming_distance"] = static_cast<double>(problem_.target.size()) - response.fitness;
        return response;
    } catch (const EncodingError& e) {
        return EvaluationResponse::error(request.genotype_id, e.what());
    }
}

double target_match_fitness(const Genotype& genotype, const TargetArchitecture& target, const SearchSpace& space) {
    const auto counts = cell_counts(genotype);
    double gap = 0.0;
    // Count gaps over the union of keys.
    for (const auto& [key, wanted] : target.counts) {
        auto it = counts.find(key);
        gap += std::abs((it == counts.end() ? 0 : it->second) - wanted);
    }
    for (const auto& [key, have] : counts) {
        if (target.counts.count(key) == 0) {
            gap += have;
        }
    }
    for (const auto& [key, wanted] : target.attrs) {
        const Strand* strand = genotype.find_strand(key.first);
        const CellType* type = space.find_cell(key.second);
        if (strand == nullptr || type == nullptr) {
            continue;
        }
        for (const auto& cell : strand->cells) {
            if (cell.cell_type != key.second) {
                continue;
            }
            double cell_gap = 0.0;
            const std::size_t n = std::min(wanted.size(), cell.core_attrs.size());
            for (std::size_t a = 0; a < n; ++a) {
                const int width = type->attrs[a].max - type->attrs[a].min;
                if (width > 0) {
                    cell_gap += std::abs(cell.core_attrs[a] - wanted[a]) / static_cast<double>(width);
                }
            }
            gap += n == 0 ? 0.0 : cell_gap / static_cast<double>(n);
        }
    }
    return 1.0 / (1.0 + gap);
}

EvaluationResponse TargetMatchEvaluator::evaluate(const Genotype& genotype, const EvaluationRequest& request) {
    return EvaluationResponse::ok(request.genotype_id, target_match_fitness(genotype, target_, space_));
}

}  // namespace sane
