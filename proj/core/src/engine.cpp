#include "sane/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include "sane/phenotype.hpp"

namespace sane {

namespace {

bool has_own_record(const Genotype& g) { return g.fitness.has_value() && !g.fitness->inherited; }

double incomplete_of(const Genotype& g) {
    return g.fitness && g.fitness->incomplete ? *g.fitness->incomplete : kWorstFitness;
}

/// Strict ranking: higher fitness first, then lower id.
bool ranks_before(const Genotype& a, const Genotype& b) {
    const double fa = selection_fitness(a);
    const double fb = selection_fitness(b);
    if (fa != fb) {
        return fa > fb;
    }
    return a.id < b.id;
}

std::uint64_t evaluation_seed(std::uint64_t root, int generation, GenotypeId id, EvaluationPhase phase) {
    const std::uint64_t counter = (static_cast<std::uint64_t>(generation) << 40) ^ static_cast<std::uint64_t>(id);
    return Rng::derive(root, phase == EvaluationPhase::incomplete ? "evaluation/incomplete" : "evaluation/complete",
                       counter)
        .next();
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_from(const Json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return std::nullopt;
    }
    return doc.at(key).get<double>();
}

}  // namespace

Violations EstimationConfig::validate() const {
    Violations out;
    if (t_i < 1) {
        out.push_back({"estimation.t_i", "must be >= 1"});
    }
    if (t_c <= t_i) {
        out.push_back({"estimation.t_c", "must exceed t_i"});
    }
    if (!(train_rate > 0.0 && train_rate <= 1.0)) {
        out.push_back({"estimation.train_rate", "must lie in (0, 1]"});
    }
    if (!std::isfinite(tau_F)) {
        out.push_back({"estimation.tau_F", "must be finite"});
    }
    if (!std::isfinite(tau_Fc)) {
        out.push_back({"estimation.tau_Fc", "must be finite"});
    }
    return out;
}

EngineConfig EngineConfig::defaults_for(const SearchSpace& space) {
    EngineConfig config;
    config.variation = VariationConfig::defaults_for(space);
    if (const auto builtin = identify_builtin(space)) {
        config.input_shape = default_input_shape(*builtin);
    }
    return config;
}

Violations EngineConfig::validate(const SearchSpace& space) const {
    Violations out = validate_space(space);
    if (individual_init < 1) {
        out.push_back({"individual_init", "must be >= 1"});
    }
    if (tau_q < individual_init) {
        out.push_back({"tau_q", "must be >= individual_init"});
    }
    if (tau_k < 1) {
        out.push_back({"tau_k", "must be >= 1"});
    }
    if (speciation.species_limit > tau_q) {
        out.push_back({"speciation.species_limit", "must not exceed tau_q"});
    }
    for (const auto& v : variation.validate(space)) {
        out.push_back(v);
    }
    for (const auto& v : speciation.validate()) {
        out.push_back(v);
    }
    for (const auto& v : adaptation.validate()) {
        out.push_back(v);
    }
    for (const auto& v : estimation.validate()) {
        out.push_back(v);
    }
    for (std::size_t i = 0; i < input_shape.size(); ++i) {
        if (input_shape[i] < 1) {
            out.push_back({"input_shape[" + std::to_string(i) + "]", "must be >= 1"});
        }
    }
    return out;
}

void require_valid(const SearchSpace& space, const EngineConfig& config) {
    const auto violations = config.validate(space);
    if (violations.empty()) {
        return;
    }
    std::string message = "invalid configuration:";
    for (const auto& v : violations) {
        message += "\n  " + v.path + ": " + v.message;
    }
    throw std::invalid_argument(message);
}

Json to_json(const EngineConfig& config) {
    const auto& v = config.variation;
    const auto& s = config.speciation;
    Json coefficients = Json::array();
    for (const auto& [key, c] : s.coefficients) {
        coefficients.push_back({key.first, key.second, c});
    }
    return {{"individual_init", config.individual_init},
            {"tau_q", config.tau_q},
            {"tau_k", config.tau_k},
            {"seed", config.seed},
            {"input_shape", config.input_shape},
            {"variation",
             {{"organ_weights", v.organ_weights},
              {"p_add", v.p_add},
              {"p_modify", v.p_modify},
              {"p_cross", v.p_cross},
              {"attr_weights", v.attr_weights},
              {"growth_factors", v.growth_factors}}},
            {"speciation",
             {{"coefficients", std::move(coefficients)},
              {"default_coefficient", s.default_coefficient},
              {"tau_d", s.tau_d},
              {"species_limit", s.species_limit}}},
            {"adaptation",
             {{"lambda_T", config.adaptation.lambda_T},
              {"xi_T", config.adaptation.xi_T},
              {"lambda_N", config.adaptation.lambda_N},
              {"xi_N", config.adaptation.xi_N},
              {"tau_N", config.adaptation.tau_N}}},
            {"estimation",
             {{"t_i", config.estimation.t_i},
              {"t_c", config.estimation.t_c},
              {"tau_F", config.estimation.tau_F},
              {"tau_Fc", config.estimation.tau_Fc},
              {"train_rate", config.estimation.train_rate}}}};
}

EngineConfig engine_config_from_json(const Json& doc) {
    try {
        EngineConfig c;
        c.individual_init = doc.at("individual_init").get<int>();
        c.tau_q = doc.at("tau_q").get<int>();
        c.tau_k = doc.at("tau_k").get<int>();
        c.seed = doc.at("seed").get<std::uint64_t>();
        c.input_shape = doc.at("input_shape").get<std::vector<int>>();
        const Json& v = doc.at("variation");
        c.variation.organ_weights = v.at("organ_weights").get<std::vector<double>>();
        c.variation.p_add = v.at("p_add").get<double>();
        c.variation.p_modify = v.at("p_modify").get<double>();
        c.variation.p_cross = v.at("p_cross").get<double>();
        c.variation.attr_weights = v.at("attr_weights").get<std::map<std::string, std::vector<double>>>();
        c.variation.growth_factors = v.at("growth_factors").get<std::map<std::string, std::vector<int>>>();
        const Json& s = doc.at("speciation");
        for (const auto& entry : s.at("coefficients")) {
            c.speciation.coefficients[{entry.at(0).get<std::string>(), entry.at(1).get<std::string>()}] =
                entry.at(2).get<double>();
        }
        c.speciation.default_coefficient = s.at("default_coefficient").get<double>();
        c.speciation.tau_d = s.at("tau_d").get<double>();
        c.speciation.species_limit = s.at("species_limit").get<int>();
        const Json& a = doc.at("adaptation");
        c.adaptation = {a.at("lambda_T").get<int>(), a.at("xi_T").get<int>(), a.at("lambda_N").get<int>(),
                        a.at("xi_N").get<int>(), a.at("tau_N").get<int>()};
        const Json& e = doc.at("estimation");
        c.estimation = {e.at("t_i").get<int>(), e.at("t_c").get<int>(), e.at("tau_F").get<double>(),
                        e.at("tau_Fc").get<double>(), e.at("train_rate").get<double>()};
        return c;
    } catch (const Json::exception& e) {
        throw FormatError("/config", e.what());
    }
}

std::string_view to_string(RunStatus status) {
    return status == RunStatus::satisfied ? "satisfied" : "generation_limit";
}

double selection_fitness(const Genotype& genotype) {
    if (!genotype.fitness) {
        return kWorstFitness;
    }
    if (genotype.fitness->complete) {
        return *genotype.fitness->complete;
    }
    return genotype.fitness->incomplete.value_or(kWorstFitness);
}

std::vector<int> quota(std::span<const int> sizes, int tau_q) {
    if (tau_q < 1) {
        throw std::invalid_argument("quota: tau_q must be >= 1");
    }
    std::int64_t total = 0;
    for (int q : sizes) {
        if (q < 1) {
            throw std::invalid_argument("quota: species sizes must be >= 1");
        }
        total += q;
    }
    std::vector<int> counts(sizes.begin(), sizes.end());
    if (total <= tau_q) {
        return counts;
    }
    const std::size_t n = sizes.size();
    if (n >= static_cast<std::size_t>(tau_q)) {
        // More species than places: one each for the largest species.
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < tau_q; ++i) {
            counts[order[i]] = 1;
        }
        return counts;
    }

    // Exact integer arithmetic: share_i = floor_i + rem_i / total.
    std::vector<std::int64_t> remainder(n);
    std::vector<bool> bumped(n, false);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t scaled = static_cast<std::int64_t>(sizes[i]) * tau_q;
        counts[i] = static_cast<int>(scaled / total);
        remainder[i] = scaled % total;
        if (counts[i] == 0) {
            counts[i] = 1;
            bumped[i] = true;
        }
        assigned += counts[i];
    }
    if (assigned < tau_q) {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < n; ++i) {
            if (!bumped[i]) {
                order.push_back(i);
            }
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        for (std::size_t j = 0; assigned < tau_q && j < order.size(); ++j) {
            ++counts[order[j]];
            ++assigned;
        }
    }
    while (assigned > tau_q) {
        std::size_t largest = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] > 1 && (largest == n || counts[i] >= counts[largest])) {
                largest = i;
            }
        }
        if (largest == n) {
            break;
        }
        --counts[largest];
        --assigned;
    }
    return counts;
}

std::vector<GenotypeId> select_members(std::span<const Genotype* const> members, int count) {
    std::vector<const Genotype*> ranked(members.begin(), members.end());
    std::sort(ranked.begin(), ranked.end(), [](const Genotype* a, const Genotype* b) { return ranks_before(*a, *b); });
    const std::size_t keep = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(std::max(count, 0)));
    std::vector<GenotypeId> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.push_back(ranked[i]->id);
    }
    return out;
}

std::vector<GenotypeId> sample_members(std::span<const Genotype* const> members, double train_rate, Rng& rng) {
    if (members.empty()) {
        return {};
    }
    // The epsilon keeps products such as 0.3 * 10 from rounding up to 4.
    auto wanted = static_cast<std::size_t>(std::ceil(train_rate * static_cast<double>(members.size()) - 1e-9));
    wanted = std::clamp<std::size_t>(wanted, 1, members.size());

    std::vector<GenotypeId> fresh;
    std::vector<GenotypeId> known;
    std::vector<const Genotype*> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end(), [](const Genotype* a, const Genotype* b) { return a->id < b->id; });
    for (const Genotype* g : sorted) {
        (has_own_record(*g) ? known : fresh).push_back(g->id);
    }
    rng.shuffle(fresh);
    rng.shuffle(known);
    std::vector<GenotypeId> out;
    for (std::size_t i = 0; i < fresh.size() && out.size() < wanted; ++i) {
        out.push_back(fresh[i]);
    }
    for (std::size_t i = 0; i < known.size() && out.size() < wanted; ++i) {
        out.push_back(known[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Engine::Engine(SearchSpace space, EngineConfig config, Evaluator& evaluator)
    : space_(std::move(space)), config_(std::move(config)), evaluator_(&evaluator) {
    require_valid(space_, config_);
    for (int i = 0; i < config_.individual_init; ++i) {
        population_.push_back(minimal_genotype(space_, ids_.allocate()));
    }
    adaptation_ = AdaptationState::initial(config_.adaptation);
}

void Engine::evaluate_all(std::vector<Pending>& pending, int generation) {
    std::vector<EvaluationResponse> responses(pending.size());
    std::vector<bool> ready(pending.size(), false);
    if (evaluator_->needs_phenotype()) {
        for (std::size_t i = 0; i < pending.size(); ++i) {
            try {
                pending[i].request.phenotype = decode(*pending[i].genotype, space_, config_.input_shape);
            } catch (const std::exception& e) {
                // Never sent to the evaluator.
                responses[i] = EvaluationResponse::error(pending[i].request.genotype_id, std::string("decode: ") + e.what());
                ready[i] = true;
            }
        }
    }

    auto work = [&](std::size_t i) {
        try {
            responses[i] = evaluator_->evaluate(*pending[i].genotype, pending[i].request);
        } catch (const std::exception& e) {
            responses[i] = EvaluationResponse::error(pending[i].request.genotype_id, e.what());
        }
    };
    const std::size_t threads = std::min(evaluator_->max_concurrency(), pending.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (!ready[i]) {
                work(i);
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < pending.size(); i = next++) {
                    if (!ready[i]) {
                        work(i);
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    // Merge in request order, which is ascending genotype id.
    for (std::size_t i = 0; i < pending.size(); ++i) {
        auto& r = responses[i];
        if (r.status == EvaluationStatus::ok && (!std::isfinite(r.fitness) || r.genotype_id != pending[i].request.genotype_id)) {
            r = EvaluationResponse::error(pending[i].request.genotype_id, "protocol");
        }
        const double value = r.status == EvaluationStatus::ok ? r.fitness : kWorstFitness;
        Genotype& g = *pending[i].genotype;
        if (pending[i].request.phase == EvaluationPhase::incomplete) {
            g.fitness = FitnessRecord{value, std::nullopt, generation, false};
        } else {
            g.fitness->complete = value;
        }
        log_.push_back({generation, g.id, pending[i].request.phase, pending[i].request.budget, value, r.status, r.message});
    }
}

int Engine::estimate(std::vector<Genotype>& all, const SpeciesSet& species, int generation) {
    std::map<GenotypeId, Genotype*> by_id;
    for (auto& g : all) {
        by_id[g.id] = &g;
    }
    Rng sampling = Rng::derive(config_.seed, "sampling", static_cast<std::uint64_t>(generation));
    std::set<GenotypeId> sampled;
    for (const auto& s : species.species) {
        std::vector<const Genotype*> members;
        for (GenotypeId id : s.members) {
            members.push_back(by_id.at(id));
        }
        for (GenotypeId id : sample_members(members, config_.estimation.train_rate, sampling)) {
            sampled.insert(id);
        }
    }

    std::vector<Pending> pending;
    for (GenotypeId id : sampled) {
        Genotype* g = by_id.at(id);
        if (has_own_record(*g)) {
            continue;
        }
        EvaluationRequest request;
        request.genotype_id = id;
        request.phase = EvaluationPhase::incomplete;
        request.budget = config_.estimation.t_i;
        request.seed = evaluation_seed(config_.seed, generation, id, request.phase);
        pending.push_back({g, std::move(request)});
    }
    int evaluations = static_cast<int>(pending.size());
    evaluate_all(pending, generation);

    std::vector<Pending> promoted;
    for (auto& [id, g] : by_id) {
        const auto& f = g->fitness;
        if (f && !f->inherited && f->evaluated_generation == generation && !f->complete && f->incomplete &&
            *f->incomplete > config_.estimation.tau_F) {
            EvaluationRequest request;
            request.genotype_id = id;
            request.phase = EvaluationPhase::complete;
            request.budget = config_.estimation.t_c;
            request.seed = evaluation_seed(config_.seed, generation, id, request.phase);
            promoted.push_back({g, std::move(request)});
        }
    }
    evaluations += static_cast<int>(promoted.size());
    evaluate_all(promoted, generation);
    return evaluations;
}

std::optional<RunStatus> Engine::step() {
    if (status_) {
        return status_;
    }
    const int k = generation_ + 1;
    GenerationRecord record;
    record.generation = k;
    record.T = adaptation_.T;
    record.N = adaptation_.N;

    // (1) duplication: N copies of every individual, in id order.
    std::vector<Genotype> pool;
    pool.reserve(population_.size() * static_cast<std::size_t>(record.N));
    for (int n = 0; n < record.N; ++n) {
        for (const auto& parent : population_) {
            Genotype child = parent;
            child.id = ids_.allocate();
            if (child.fitness) {
                child.fitness->inherited = true;
            }
            pool.push_back(std::move(child));
        }
    }
    record.offspring = static_cast<int>(pool.size());

    // (2) T variation rounds.
    Rng variation = Rng::derive(config_.seed, "variation", static_cast<std::uint64_t>(k));
    for (int t = 0; t < record.T; ++t) {
        vary_round(pool, space_, config_.variation, variation, ids_);
    }
    for (auto& g : pool) {
        g.birth_generation = k;
    }

    // (3) speciation of parents and offspring.
    std::vector<Genotype> all = population_;
    all.insert(all.end(), std::make_move_iterator(pool.begin()), std::make_move_iterator(pool.end()));
    std::sort(all.begin(), all.end(), [](const Genotype& a, const Genotype& b) { return a.id < b.id; });
    species_ = speciate(all, species_, config_.speciation);

    // (4) estimation.
    record.evaluations = estimate(all, species_, k);

    std::map<GenotypeId, const Genotype*> by_id;
    for (const auto& g : all) {
        by_id[g.id] = &g;
        if (g.fitness && g.fitness->incomplete) {
            record.best_incomplete = std::max(record.best_incomplete, *g.fitness->incomplete);
        }
        if (g.fitness && g.fitness->inherited) {
            ++record.inherited;
        }
    }
    for (const auto& s : species_.species) {
        SpeciesRow row{s.id, static_cast<int>(s.members.size()), std::nullopt, std::nullopt};
        for (GenotypeId id : s.members) {
            const auto& f = by_id.at(id)->fitness;
            if (f && f->incomplete) {
                row.best_incomplete = std::max(row.best_incomplete.value_or(kWorstFitness), *f->incomplete);
            }
            if (f && f->complete) {
                row.best_complete = std::max(row.best_complete.value_or(kWorstFitness), *f->complete);
            }
        }
        record.species.push_back(row);
    }

    // (5) exit on a complete fitness above the threshold.
    const Genotype* winner = nullptr;
    for (const auto& g : all) {
        const auto& f = g.fitness;
        if (f && !f->inherited && f->evaluated_generation == k && f->complete &&
            *f->complete > config_.estimation.tau_Fc && (winner == nullptr || *f->complete > *winner->fitness->complete)) {
            winner = &g;
        }
    }
    if (winner != nullptr) {
        satisfied_ = *winner;
        population_ = std::move(all);
        record.population_after_select = static_cast<int>(population_.size());
        history_.push_back(std::move(record));
        generation_ = k;
        status_ = RunStatus::satisfied;
        return status_;
    }

    // (6) adaptation from the generation's best incomplete fitness.
    adaptation_ = sane::step(adaptation_, record.best_incomplete, config_.adaptation);

    // (7) quota selection per species.
    std::vector<int> sizes;
    for (const auto& s : species_.species) {
        sizes.push_back(static_cast<int>(s.members.size()));
    }
    const auto counts = quota(sizes, config_.tau_q);
    std::set<GenotypeId> keep;
    std::map<GenotypeId, int> species_of;
    for (std::size_t i = 0; i < species_.species.size(); ++i) {
        auto& s = species_.species[i];
        std::vector<const Genotype*> members;
        for (GenotypeId id : s.members) {
            members.push_back(by_id.at(id));
            species_of[id] = s.id;
        }
        auto chosen = select_members(members, counts[i]);
        if (!chosen.empty()) {
            s.representative = *by_id.at(chosen.front());
        }
        keep.insert(chosen.begin(), chosen.end());
        s.members = std::move(chosen);
    }

    // Elitism for the running best incomplete fitness: swap it in for the
    // weakest survivor so the population size is unchanged.
    const Genotype* top_incomplete = nullptr;
    for (const auto& g : all) {
        if (g.fitness && g.fitness->incomplete &&
            (top_incomplete == nullptr || incomplete_of(g) > incomplete_of(*top_incomplete))) {
            top_incomplete = &g;
        }
    }
    if (top_incomplete != nullptr && keep.count(top_incomplete->id) == 0 && keep.size() > 1) {
        const Genotype* top_overall = nullptr;
        const Genotype* weakest = nullptr;
        for (GenotypeId id : keep) {
            const Genotype* g = by_id.at(id);
            if (top_overall == nullptr || ranks_before(*g, *top_overall)) {
                top_overall = g;
            }
            if (weakest == nullptr || ranks_before(*weakest, *g)) {
                weakest = g;
            }
        }
        if (weakest != top_overall) {
            keep.erase(weakest->id);
            keep.insert(top_incomplete->id);
            auto& from = species_.find(species_of.at(weakest->id))->members;
            from.erase(std::find(from.begin(), from.end(), weakest->id));
            species_.find(species_of.at(top_incomplete->id))->members.push_back(top_incomplete->id);
        }
    }

    std::vector<Genotype> next;
    next.reserve(keep.size());
    for (auto& g : all) {
        if (keep.count(g.id) != 0) {
            next.push_back(std::move(g));
        }
    }
    population_ = std::move(next);
    record.population_after_select = static_cast<int>(population_.size());
    history_.push_back(std::move(record));
    generation_ = k;
    if (generation_ >= config_.tau_k) {
        status_ = RunStatus::generation_limit;
    }
    return status_;
}

RunResult Engine::run(const std::function<void(const Engine&)>& on_generation) {
    while (!finished()) {
        step();
        if (on_generation) {
            on_generation(*this);
        }
    }
    return result();
}

Genotype Engine::best() const {
    if (satisfied_) {
        return *satisfied_;
    }
    const Genotype* best = nullptr;
    for (const auto& g : population_) {
        if (best == nullptr || ranks_before(g, *best)) {
            best = &g;
        }
    }
    return best == nullptr ? Genotype{} : *best;
}

RunResult Engine::result() const {
    return RunResult{status_.value_or(RunStatus::generation_limit), best(), history_, generation_};
}

std::uint64_t config_digest(const SearchSpace& space, const EngineConfig& config) {
    return fnv1a64(to_json(config).dump() + "\n" + to_json(space).dump());
}

Json to_json(const GenerationRecord& record) {
    Json species = Json::array();
    for (const auto& row : record.species) {
        species.push_back({{"species_id", row.species_id},
                           {"size", row.size},
                           {"best_incomplete", optional_number(row.best_incomplete)},
                           {"best_complete", optional_number(row.best_complete)}});
    }
    return {{"generation", record.generation},
            {"species", std::move(species)},
            {"best_incomplete", record.best_incomplete},
            {"T", record.T},
            {"N", record.N},
            {"evaluations", record.evaluations},
            {"offspring", record.offspring},
            {"population_after_select", record.population_after_select},
            {"inherited", record.inherited}};
}

GenerationRecord generation_record_from_json(const Json& doc) {
    try {
        GenerationRecord r;
        r.generation = doc.at("generation").get<int>();
        for (const auto& row : doc.at("species")) {
            r.species.push_back(SpeciesRow{row.at("species_id").get<int>(), row.at("size").get<int>(),
                                           optional_from(row, "best_incomplete"), optional_from(row, "best_complete")});
        }
        r.best_incomplete = doc.at("best_incomplete").get<double>();
        r.T = doc.at("T").get<int>();
        r.N = doc.at("N").get<int>();
        r.evaluations = doc.at("evaluations").get<int>();
        r.offspring = doc.value("offspring", 0);
        r.population_after_select = doc.value("population_after_select", 0);
        r.inherited = doc.value("inherited", 0);
        return r;
    } catch (const Json::exception& e) {
        throw FormatError("/history", e.what());
    }
}

Json Engine::checkpoint() const {
    Json population = Json::array();
    for (const auto& g : population_) {
        population.push_back(to_json(g));
    }
    Json history = Json::array();
    for (const auto& r : history_) {
        history.push_back(to_json(r));
    }
    Json adaptation{{"T", adaptation_.T},
                    {"N", adaptation_.N},
                    {"generation", adaptation_.generation},
                    {"best_fitness_prev", optional_number(adaptation_.best_fitness_prev)}};
    return {{"version", kCheckpointVersion},
            {"generation", generation_},
            {"status", status_ ? Json(std::string(to_string(*status_))) : Json(nullptr)},
            {"rng_state", {{"seed", config_.seed}, {"generation", generation_}}},
            {"next_id", ids_.peek()},
            {"population", std::move(population)},
            {"species", to_json(species_)},
            {"adaptation", std::move(adaptation)},
            {"satisfied", satisfied_ ? to_json(*satisfied_) : Json(nullptr)},
            {"config", to_json(config_)},
            {"space", to_json(space_)},
            {"config_digest", hex64(config_digest(space_, config_))},
            {"history", std::move(history)}};
}

Engine Engine::restore(const Json& document, Evaluator& evaluator) {
    try {
        if (!document.is_object() || !document.contains("version")) {
            throw RestoreError("not a checkpoint document");
        }
        if (document.at("version").get<int>() != kCheckpointVersion) {
            throw RestoreError("unsupported checkpoint version " + document.at("version").dump());
        }
        SearchSpace space = space_from_json(document.at("space"));
        EngineConfig config = engine_config_from_json(document.at("config"));
        if (document.at("config_digest").get<std::string>() != hex64(config_digest(space, config))) {
            throw RestoreError("config digest mismatch");
        }
        Engine engine(std::move(space), std::move(config), evaluator);
        engine.generation_ = document.at("generation").get<int>();
        if (document.at("rng_state").at("seed").get<std::uint64_t>() != engine.config_.seed ||
            document.at("rng_state").at("generation").get<int>() != engine.generation_) {
            throw RestoreError("rng state does not match the checkpoint generation");
        }
        engine.ids_ = IdAllocator(document.at("next_id").get<GenotypeId>());
        engine.population_.clear();
        for (const auto& g : document.at("population")) {
            engine.population_.push_back(genotype_from_json(g, &engine.space_));
        }
        engine.species_ = species_from_json(document.at("species"), &engine.space_);
        const Json& a = document.at("adaptation");
        engine.adaptation_.T = a.at("T").get<int>();
        engine.adaptation_.N = a.at("N").get<int>();
        engine.adaptation_.generation = a.at("generation").get<int>();
        engine.adaptation_.best_fitness_prev = optional_from(a, "best_fitness_prev");
        if (!document.at("satisfied").is_null()) {
            engine.satisfied_ = genotype_from_json(document.at("satisfied"), &engine.space_);
        }
        const Json& status = document.at("status");
        if (!status.is_null()) {
            const auto text = status.get<std::string>();
            if (text != "satisfied" && text != "generation_limit") {
                throw RestoreError("unknown status '" + text + "'");
            }
            engine.status_ = text == "satisfied" ? RunStatus::satisfied : RunStatus::generation_limit;
        }
        for (const auto& r : document.at("history")) {
            engine.history_.push_back(generation_record_from_json(r));
        }
        for (const auto& g : engine.population_) {
            const auto violations = validate(g, engine.space_);
            if (!violations.empty()) {
                throw RestoreError("population genotype " + std::to_string(g.id) + ": " + violations.front().path +
                                   ": " + violations.front().message);
            }
        }
        return engine;
    } catch (const RestoreError&) {
        throw;
    } catch (const std::exception& e) {
        throw RestoreError(std::string("corrupt checkpoint: ") + e.what());
    }
}

RunResult run(const SearchSpace& space, const EngineConfig& config, Evaluator& evaluator) {
    Engine engine(space, config, evaluator);
    return engine.run();
}

}  // namespace sane
