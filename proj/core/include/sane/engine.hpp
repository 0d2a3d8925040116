#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sane/adaptation.hpp"
#include "sane/fitness.hpp"
#include "sane/genome.hpp"
#include "sane/rng.hpp"
#include "sane/search_space.hpp"
#include "sane/serialization.hpp"
#include "sane/speciation.hpp"
#include "sane/variation.hpp"

namespace sane {

/// Early-stop estimation: short budget t_i for sampled members, long budget
/// t_c for members whose short score passes tau_F.
struct EstimationConfig {
    int t_i = 10;
    int t_c = 250;
    double tau_F = 0.0;
    double tau_Fc = 0.0;
    /// Fraction of each species sampled per generation, in (0, 1].
    double train_rate = 0.5;

    Violations validate() const;
    friend bool operator==(const EstimationConfig&, const EstimationConfig&) = default;
};

struct EngineConfig {
    int individual_init = 20;
    /// Population ceiling.
    int tau_q = 50;
    /// Generation limit.
    int tau_k = 100;
    VariationConfig variation;
    SpeciationConfig speciation;
    AdaptationConfig adaptation;
    EstimationConfig estimation;
    std::uint64_t seed = 0;
    /// Network input shape handed to decode.
    std::vector<int> input_shape;

    /// Defaults for every knob, with organ weights and growth factors from the space.
    static EngineConfig defaults_for(const SearchSpace& space);
    Violations validate(const SearchSpace& space) const;

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

Json to_json(const EngineConfig& config);
EngineConfig engine_config_from_json(const Json& doc);

/// Throws std::invalid_argument listing every violation.
void require_valid(const SearchSpace& space, const EngineConfig& config);

enum class RunStatus { satisfied, generation_limit };
std::string_view to_string(RunStatus status);

struct SpeciesRow {
    int species_id = 0;
    int size = 0;
    std::optional<double> best_incomplete;
    std::optional<double> best_complete;

    friend bool operator==(const SpeciesRow&, const SpeciesRow&) = default;
};

struct GenerationRecord {
    int generation = 0;
    /// Species after speciation, with the best fitness after estimation.
    std::vector<SpeciesRow> species;
    /// Best incomplete fitness over the population.
    double best_incomplete = kWorstFitness;
    /// The controls used in this generation.
    int T = 1;
    int N = 1;
    int evaluations = 0;
    int offspring = 0;
    int population_after_select = 0;
    /// Sampled members whose record was copied from a parent and kept.
    int inherited = 0;

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

struct EvaluationLogEntry {
    int generation = 0;
    GenotypeId genotype = 0;
    EvaluationPhase phase = EvaluationPhase::incomplete;
    int budget = 0;
    double fitness = kWorstFitness;
    EvaluationStatus status = EvaluationStatus::ok;
    std::string message;
};

struct RunResult {
    RunStatus status = RunStatus::generation_limit;
    Genotype best;
    std::vector<GenerationRecord> history;
    int generations = 0;
};

/// Ranking key used by selection: complete fitness when present, otherwise
/// incomplete, otherwise the sentinel.
double selection_fitness(const Genotype& genotype);

/// Per-species selection counts. Sizes pass through while their sum fits
/// under tau_q; otherwise proportional shares are floored, every species gets
/// at least one, and the remainder goes by descending fractional part (ties
/// to the lower index). The total never exceeds tau_q.
std::vector<int> quota(std::span<const int> sizes, int tau_q);

/// Best `count` members by selection_fitness (ties to the lower id).
std::vector<GenotypeId> select_members(std::span<const Genotype* const> members, int count);

/// Members to sample for estimation: ceil(train_rate * size), members without
/// their own record first, uniform without replacement. Returned in id order.
std::vector<GenotypeId> sample_members(std::span<const Genotype* const> members, double train_rate, Rng& rng);

class RestoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

class Engine {
public:
    /// Validates; throws std::invalid_argument before any generation runs.
    Engine(SearchSpace space, EngineConfig config, Evaluator& evaluator);

    /// Rebuilds an engine from checkpoint(); throws RestoreError.
    static Engine restore(const Json& document, Evaluator& evaluator);

    /// Runs one generation. Returns the terminal status once the run ends.
    std::optional<RunStatus> step();
    /// Steps until termination; `on_generation` runs after every generation.
    RunResult run(const std::function<void(const Engine&)>& on_generation = {});

    Json checkpoint() const;

    bool finished() const { return status_.has_value(); }
    std::optional<RunStatus> status() const { return status_; }
    int generation() const { return generation_; }
    const std::vector<Genotype>& population() const { return population_; }
    const SpeciesSet& species() const { return species_; }
    const AdaptationState& adaptation() const { return adaptation_; }
    const std::vector<GenerationRecord>& history() const { return history_; }
    const std::vector<EvaluationLogEntry>& evaluation_log() const { return log_; }
    const SearchSpace& space() const { return space_; }
    const EngineConfig& config() const { return config_; }
    /// Satisfying genotype, or the best of the current population.
    Genotype best() const;
    RunResult result() const;

private:
    struct Pending {
        Genotype* genotype;
        EvaluationRequest request;
    };

    void evaluate_all(std::vector<Pending>& pending, int generation);
    int estimate(std::vector<Genotype>& all, const SpeciesSet& species, int generation);

    SearchSpace space_;
    EngineConfig config_;
    Evaluator* evaluator_;
    std::vector<Genotype> population_;
    SpeciesSet species_;
    AdaptationState adaptation_;
    IdAllocator ids_;
    int generation_ = 0;
    std::optional<RunStatus> status_;
    std::optional<Genotype> satisfied_;
    std::vector<GenerationRecord> history_;
    std::vector<EvaluationLogEntry> log_;
};

RunResult run(const SearchSpace& space, const EngineConfig& config, Evaluator& evaluator);

/// Digest of the config and space stored in checkpoints.
std::uint64_t config_digest(const SearchSpace& space, const EngineConfig& config);

Json to_json(const GenerationRecord& record);
GenerationRecord generation_record_from_json(const Json& doc);

}  // namespace sane
