#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sane/encoding.hpp"
#include "sane/genome.hpp"
#include "sane/phenotype.hpp"
#include "sane/search_space.hpp"

namespace sane {

/// Fitness given to genotypes whose evaluation failed; below every real score.
inline constexpr double kWorstFitness = std::numeric_limits<double>::lowest();

enum class EvaluationPhase { incomplete, complete };
std::string_view to_string(EvaluationPhase phase);

struct EvaluationRequest {
    GenotypeId genotype_id = 0;
    /// Present only for evaluators that consume the decoded network.
    std::optional<Phenotype> phenotype;
    EvaluationPhase phase = EvaluationPhase::incomplete;
    int budget = 1;
    std::uint64_t seed = 0;
};

enum class EvaluationStatus { ok, error };

struct EvaluationResponse {
    GenotypeId genotype_id = 0;
    /// Larger is better.
    double fitness = kWorstFitness;
    std::map<std::string, double> metrics;
    EvaluationStatus status = EvaluationStatus::ok;
    std::string message;

    static EvaluationResponse ok(GenotypeId id, double fitness);
    static EvaluationResponse error(GenotypeId id, std::string message);
};

/// Scores genotypes for the engine. Implementations must be safe to call
/// concurrently when max_concurrency() > 1.
class Evaluator {
public:
    virtual ~Evaluator() = default;

    virtual EvaluationResponse evaluate(const Genotype& genotype, const EvaluationRequest& request) = 0;
    virtual bool needs_phenotype() const { return false; }
    virtual std::size_t max_concurrency() const { return 1; }
};

/// Architecture-as-bit-string problem: fitness is Z minus the Hamming
/// distance to the target string (all ones unless given).
struct SubsetSumProblem {
    StateSchema schema;
    std::string target;

    static SubsetSumProblem all_ones(StateSchema schema);
};

double subset_sum_fitness(const Genotype& genotype, const SubsetSumProblem& problem);

class SubsetSumEvaluator final : public Evaluator {
public:
    explicit SubsetSumEvaluator(SubsetSumProblem problem) : problem_(std::move(problem)) {}

    EvaluationResponse evaluate(const Genotype& genotype, const EvaluationRequest& request) override;
    const SubsetSumProblem& problem() const { return problem_; }

private:
    SubsetSumProblem problem_;
};

using OrganCellKey = std::pair<std::string, std::string>;

/// A reference architecture described by per-organ cell counts and, optionally,
/// the core attributes every cell of a given (organ, type) should carry.
struct TargetArchitecture {
    std::map<OrganCellKey, int> counts;
    std::map<OrganCellKey, std::vector<int>> attrs;

    friend bool operator==(const TargetArchitecture&, const TargetArchitecture&) = default;
};

/// 1 / (1 + total count gap + normalised attribute gap); 1 iff the genotype matches.
double target_match_fitness(const Genotype& genotype, const TargetArchitecture& target, const SearchSpace& space);

class TargetMatchEvaluator final : public Evaluator {
public:
    TargetMatchEvaluator(TargetArchitecture target, SearchSpace space)
        : target_(std::move(target)), space_(std::move(space)) {}

    EvaluationResponse evaluate(const Genotype& genotype, const EvaluationRequest& request) override;

private:
    TargetArchitecture target_;
    SearchSpace space_;
};

}  // namespace sane
