#include "sane/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sane/encoding.hpp"

namespace sane {

namespace {

/// Object reader that remembers which keys were consumed so leftovers can be
/// reported as unknown.
class Section {
public:
    Section(const Json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) {
            throw FormatError(path_.empty() ? "/" : path_, "expected an object");
        }
    }

    const std::string& path() const { return path_; }
    std::string at(const std::string& key) const { return path_ + "/" + key; }

    bool has(const std::string& key) {
        used_.insert(key);
        return doc_.contains(key);
    }

    const Json& child(const std::string& key) {
        used_.insert(key);
        auto it = doc_.find(key);
        if (it == doc_.end()) {
            throw FormatError(at(key), "missing");
        }
        return *it;
    }

    template <typename T>
    T get(const std::string& key) {
        const Json& value = child(key);
        try {
            return value.get<T>();
        } catch (const Json::exception&) {
            throw FormatError(at(key), "wrong type");
        }
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        return has(key) ? get<T>(key) : fallback;
    }

    int positive_int(const std::string& key, int fallback) {
        const int value = get_or<int>(key, fallback);
        if (value < 1) {
            throw FormatError(at(key), "must be >= 1");
        }
        return value;
    }

    double percent(const std::string& key, double fallback) {
        const double value = get_or<double>(key, fallback);
        if (!(value >= 0.0 && value <= 100.0)) {
            throw FormatError(at(key), "must be a percentage in [0, 100]");
        }
        return value / 100.0;
    }

    /// Number or list of numbers.
    template <typename T>
    std::vector<T> list(const std::string& key) {
        const Json& value = child(key);
        try {
            if (value.is_array()) {
                return value.get<std::vector<T>>();
            }
            return {value.get<T>()};
        } catch (const Json::exception&) {
            throw FormatError(at(key), "wrong type");
        }
    }

    void finish() const {
        for (const auto& [key, value] : doc_.items()) {
            if (used_.count(key) == 0) {
                throw FormatError(at(key), "unknown key");
            }
        }
    }

private:
    const Json& doc_;
    std::string path_;
    std::set<std::string> used_;
};

double emit_percent(double fraction) {
    const double raw = fraction * 100.0;
    const double rounded = std::round(raw * 1e6) / 1e6;
    return rounded / 100.0 == fraction ? rounded : raw;
}

OrganCellKey split_key(const std::string& text, const std::string& path) {
    const auto slash = text.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == text.size()) {
        throw FormatError(path, "expected an \"organ/cell\" key");
    }
    return {text.substr(0, slash), text.substr(slash + 1)};
}

std::string join_key(const OrganCellKey& key) { return key.first + "/" + key.second; }

std::vector<const Organ*> evolvable_organs(const SearchSpace& space) {
    std::vector<const Organ*> out;
    for (const auto& o : space.organs) {
        if (!o.mirrored()) {
            out.push_back(&o);
        }
    }
    return out;
}

void parse_cell_init(CellType& type, const Json& value, const std::string& path) {
    // [[attrs...], [affiliated...]]; a single attribute may be given bare.
    if (!value.is_array() || value.size() != 2 || !value[1].is_array()) {
        throw FormatError(path, "expected [[attributes], [affiliated modules]]");
    }
    try {
        type.initial_core_attrs =
            value[0].is_array() ? value[0].get<std::vector<int>>() : std::vector<int>{value[0].get<int>()};
        type.initial_affiliated = value[1].get<std::vector<std::string>>();
    } catch (const Json::exception&) {
        throw FormatError(path, "wrong type");
    }
}

void parse_dnn(Section dnn, RunConfig& out) {
    out.dnn_type = dnn.get<std::string>("type");
    const auto builtin = parse_builtin_space(out.dnn_type);
    if (builtin) {
        if (dnn.has("space")) {
            throw FormatError(dnn.at("space"), "inline spaces need type \"custom\"");
        }
        out.space = builtin_space(*builtin);
    } else if (out.dnn_type == "custom") {
        try {
            out.space = space_from_json(dnn.child("space"));
        } catch (const FormatError& e) {
            throw FormatError(dnn.at("space") + e.path(), e.what());
        }
    } else {
        throw FormatError(dnn.at("type"), "expected cnn, gan, lstm or custom");
    }

    if (dnn.has("organ_types")) {
        const auto names = dnn.get<std::vector<std::string>>("organ_types");
        std::vector<std::string> expected;
        for (const Organ* o : evolvable_organs(out.space)) {
            expected.push_back(o->name);
        }
        if (names != expected) {
            throw FormatError(dnn.at("organ_types"), "does not match the space's evolvable organs");
        }
    }
    if (dnn.has("cell_types")) {
        Section cells(dnn.child("cell_types"), dnn.at("cell_types"));
        for (auto& type : out.space.cells) {
            if (cells.has(type.name)) {
                parse_cell_init(type, cells.child(type.name), cells.at(type.name));
            }
        }
        cells.finish();
    }
    if (dnn.has("cell_quantity_ceilings")) {
        Section ceilings(dnn.child("cell_quantity_ceilings"), dnn.at("cell_quantity_ceilings"));
        for (const auto& type : out.space.cells) {
            if (ceilings.has(type.name)) {
                out.space.cell_quantity_ceilings[type.name] = ceilings.positive_int(type.name, 1);
            }
        }
        ceilings.finish();
    }
    out.engine.input_shape =
        dnn.get_or<std::vector<int>>("input_shape", builtin ? default_input_shape(*builtin) : std::vector<int>{});
    dnn.finish();

    const auto violations = validate_space(out.space);
    if (!violations.empty()) {
        throw FormatError(dnn.path(), "invalid space: " + violations.front().path + ": " + violations.front().message);
    }
}

void parse_evolution(Section evo, RunConfig& out) {
    EngineConfig& e = out.engine;
    const SearchSpace& space = out.space;
    e.individual_init = evo.positive_int("individual_init", 20);
    e.tau_q = evo.positive_int("individual_limit", 50);
    e.adaptation.lambda_N = evo.positive_int("npi_init", 1);
    e.adaptation.xi_N = evo.positive_int("npi_step", 1);
    e.adaptation.tau_N = evo.positive_int("npi_limit", 10);
    e.adaptation.lambda_T = evo.positive_int("tpg_init", 1);
    e.adaptation.xi_T = evo.positive_int("tpg_step", 1);

    e.variation = VariationConfig::defaults_for(space);
    if (evo.has("organ_prob")) {
        const auto probs = evo.list<double>("organ_prob");
        const auto organs = evolvable_organs(space);
        if (probs.size() != organs.size()) {
            throw FormatError(evo.at("organ_prob"), "expected one entry per evolvable organ");
        }
        double total = 0.0;
        std::size_t next = 0;
        for (std::size_t i = 0; i < space.organs.size(); ++i) {
            if (space.organs[i].mirrored()) {
                e.variation.organ_weights[i] = 0.0;
                continue;
            }
            if (!(probs[next] >= 0.0 && probs[next] <= 100.0)) {
                throw FormatError(evo.at("organ_prob") + "/" + std::to_string(next), "must be a percentage in [0, 100]");
            }
            total += probs[next];
            e.variation.organ_weights[i] = probs[next++] / 100.0;
        }
        if (std::abs(total - 100.0) > 1e-6) {
            throw FormatError(evo.at("organ_prob"), "must sum to 100");
        }
    }
    e.variation.p_add = evo.percent("add_cell_prob", 25);
    e.variation.p_modify = evo.percent("modify_cell_prob", 50);
    e.variation.p_cross = evo.percent("crossover_prob", 25);
    if (std::abs(e.variation.p_add + e.variation.p_modify + e.variation.p_cross - 1.0) > 1e-9) {
        throw FormatError(evo.path(), "add_cell_prob + modify_cell_prob + crossover_prob must sum to 100");
    }
    for (const auto& type : space.cells) {
        const std::string prob_key = type.name + "_attr_prob";
        if (evo.has(prob_key)) {
            const auto probs = evo.list<double>(prob_key);
            if (probs.size() != type.attrs.size() && probs.size() != type.attrs.size() + 1) {
                throw FormatError(evo.at(prob_key), "expected one entry per attribute, optionally plus one for affiliated modules");
            }
            std::vector<double> weights;
            for (std::size_t i = 0; i < probs.size(); ++i) {
                if (!(probs[i] >= 0.0 && probs[i] <= 100.0)) {
                    throw FormatError(evo.at(prob_key) + "/" + std::to_string(i), "must be a percentage in [0, 100]");
                }
                weights.push_back(probs[i] / 100.0);
            }
            e.variation.attr_weights[type.name] = std::move(weights);
        }
        const std::string growth_key = type.name + "_attr_growth_factor";
        if (evo.has(growth_key)) {
            const auto growth = evo.list<int>(growth_key);
            if (growth.size() != type.attrs.size()) {
                throw FormatError(evo.at(growth_key), "expected one entry per attribute");
            }
            for (std::size_t i = 0; i < growth.size(); ++i) {
                if (growth[i] < 1) {
                    throw FormatError(evo.at(growth_key) + "/" + std::to_string(i), "must be >= 1");
                }
            }
            e.variation.growth_factors[type.name] = growth;
        }
    }
    e.speciation.species_limit = evo.positive_int("species_num_limit", 10);
    e.speciation.tau_d = evo.get_or<double>("species_distance_threshold", 1.0);
    if (!(e.speciation.tau_d > 0.0)) {
        throw FormatError(evo.at("species_distance_threshold"), "must be positive");
    }
    if (evo.has("species_coefficients")) {
        const Json& coeffs = evo.child("species_coefficients");
        if (!coeffs.is_object()) {
            throw FormatError(evo.at("species_coefficients"), "expected an object");
        }
        for (const auto& [key, value] : coeffs.items()) {
            const std::string path = evo.at("species_coefficients") + "/" + key;
            if (!value.is_number() || value.get<double>() < 0.0) {
                throw FormatError(path, "must be a non-negative number");
            }
            e.speciation.coefficients[split_key(key, path)] = value.get<double>();
        }
    }
    evo.finish();
}

void parse_evaluator(Section ev, RunConfig& out) {
    const auto kind = ev.get<std::string>("kind");
    EvaluatorSpec& spec = out.evaluator;
    if (kind == "subset_sum") {
        spec.kind = EvaluatorSpec::Kind::subset_sum;
        spec.target_bits = ev.get_or<std::string>("target", "");
        const auto bits = StateSchema::from_space(out.space).total_bits();
        if (!spec.target_bits.empty()) {
            if (spec.target_bits.size() != bits ||
                spec.target_bits.find_first_not_of("01") != std::string::npos) {
                throw FormatError(ev.at("target"), "expected a bit string of length " + std::to_string(bits));
            }
        }
    } else if (kind == "target_match") {
        spec.kind = EvaluatorSpec::Kind::target_match;
        const Json& counts = ev.child("counts");
        if (!counts.is_object()) {
            throw FormatError(ev.at("counts"), "expected an object");
        }
        for (const auto& [key, value] : counts.items()) {
            const std::string path = ev.at("counts") + "/" + key;
            if (!value.is_number_integer() || value.get<int>() < 0) {
                throw FormatError(path, "must be a non-negative integer");
            }
            spec.target.counts[split_key(key, path)] = value.get<int>();
        }
        if (ev.has("attrs")) {
            const Json& attrs = ev.child("attrs");
            if (!attrs.is_object()) {
                throw FormatError(ev.at("attrs"), "expected an object");
            }
            for (const auto& [key, value] : attrs.items()) {
                const std::string path = ev.at("attrs") + "/" + key;
                try {
                    spec.target.attrs[split_key(key, path)] = value.get<std::vector<int>>();
                } catch (const Json::exception&) {
                    throw FormatError(path, "expected a list of integers");
                }
            }
        }
    } else if (kind == "worker") {
        spec.kind = EvaluatorSpec::Kind::worker;
        spec.worker.command = ev.get<std::string>("command");
        if (spec.worker.command.empty()) {
            throw FormatError(ev.at("command"), "must not be empty");
        }
        const double seconds = ev.get_or<double>("timeout_seconds", 60.0);
        if (!(seconds > 0.0)) {
            throw FormatError(ev.at("timeout_seconds"), "must be positive");
        }
        spec.worker.timeout = std::chrono::milliseconds(std::llround(seconds * 1000.0));
        spec.worker.pool_size = static_cast<std::size_t>(ev.positive_int("workers", 1));
        if (ev.has("env")) {
            spec.worker.env = ev.get<std::map<std::string, std::string>>("env");
        }
    } else {
        throw FormatError(ev.at("kind"), "expected subset_sum, target_match or worker");
    }
    ev.finish();
}

void parse_training(Section tr, RunConfig& out) {
    EstimationConfig& est = out.engine.estimation;
    est.train_rate = tr.percent("train_rate", 50);
    if (!(est.train_rate > 0.0)) {
        throw FormatError(tr.at("train_rate"), "must be positive");
    }
    est.t_i = tr.positive_int("incomplete_train_epochs", 10);
    est.t_c = tr.positive_int("complete_train_epochs", 250);
    if (est.t_c <= est.t_i) {
        throw FormatError(tr.at("complete_train_epochs"), "must exceed incomplete_train_epochs");
    }
    est.tau_F = tr.get<double>("incomplete_fitness_threshold");
    est.tau_Fc = tr.get<double>("complete_fitness_threshold");
    if (tr.has("train_batches")) {
        out.training.train_batches = tr.positive_int("train_batches", 1);
    }
    if (tr.has("learning_rate")) {
        out.training.learning_rate = tr.get<double>("learning_rate");
    }
    if (tr.has("loss_function")) {
        out.training.loss_function = tr.get<std::string>("loss_function");
    }
    if (tr.has("optimizer")) {
        out.training.optimizer = tr.get<std::string>("optimizer");
    }
    parse_evaluator(Section(tr.child("evaluator"), tr.at("evaluator")), out);
    tr.finish();
}

void parse_run(Section run, RunConfig& out) {
    const Json& seed = run.has("seed") ? run.child("seed") : Json(0);
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
        throw FormatError(run.at("seed"), "must be a non-negative integer");
    }
    out.engine.seed = seed.get<std::uint64_t>();
    out.engine.tau_k = run.positive_int("generation_limit", 100);
    out.output_dir = run.get_or<std::string>("output_dir", "out");
    run.finish();
}

}  // namespace

std::string_view to_string(EvaluatorSpec::Kind kind) {
    switch (kind) {
        case EvaluatorSpec::Kind::subset_sum:
            return "subset_sum";
        case EvaluatorSpec::Kind::target_match:
            return "target_match";
        case EvaluatorSpec::Kind::worker:
            return "worker";
    }
    return "unknown";
}

RunConfig parse_config(const Json& document) {
    Section top(document, "");
    RunConfig out;
    parse_dnn(Section(top.child("dnn"), "/dnn"), out);
    parse_evolution(Section(top.child("evolution"), "/evolution"), out);
    parse_training(Section(top.child("training"), "/training"), out);
    if (top.has("run")) {
        parse_run(Section(top.child("run"), "/run"), out);
    }
    top.finish();

    const auto violations = out.engine.validate(out.space);
    if (!violations.empty()) {
        throw FormatError("/", violations.front().path + ": " + violations.front().message);
    }
    return out;
}

Json emit_config(const RunConfig& config) {
    const SearchSpace& space = config.space;
    const EngineConfig& e = config.engine;

    Json dnn{{"type", config.dnn_type}, {"input_shape", e.input_shape}};
    if (config.dnn_type == "custom") {
        dnn["space"] = to_json(space);
    } else {
        Json cells = Json::object();
        for (const auto& c : space.cells) {
            cells[c.name] = Json::array({c.initial_core_attrs, c.initial_affiliated});
        }
        std::vector<std::string> organs;
        for (const Organ* o : evolvable_organs(space)) {
            organs.push_back(o->name);
        }
        dnn["organ_types"] = organs;
        dnn["cell_types"] = std::move(cells);
        dnn["cell_quantity_ceilings"] = space.cell_quantity_ceilings;
    }

    Json evo{{"individual_init", e.individual_init},
             {"individual_limit", e.tau_q},
             {"npi_init", e.adaptation.lambda_N},
             {"npi_step", e.adaptation.xi_N},
             {"npi_limit", e.adaptation.tau_N},
             {"tpg_init", e.adaptation.lambda_T},
             {"tpg_step", e.adaptation.xi_T},
             {"add_cell_prob", emit_percent(e.variation.p_add)},
             {"modify_cell_prob", emit_percent(e.variation.p_modify)},
             {"crossover_prob", emit_percent(e.variation.p_cross)},
             {"species_num_limit", e.speciation.species_limit},
             {"species_distance_threshold", e.speciation.tau_d}};
    Json organ_prob = Json::array();
    for (std::size_t i = 0; i < space.organs.size(); ++i) {
        if (!space.organs[i].mirrored()) {
            organ_prob.push_back(emit_percent(e.variation.organ_weights.at(i)));
        }
    }
    evo["organ_prob"] = std::move(organ_prob);
    for (const auto& [type, weights] : e.variation.attr_weights) {
        Json probs = Json::array();
        for (double w : weights) {
            probs.push_back(emit_percent(w));
        }
        evo[type + "_attr_prob"] = std::move(probs);
    }
    for (const auto& [type, growth] : e.variation.growth_factors) {
        evo[type + "_attr_growth_factor"] = growth;
    }
    if (!e.speciation.coefficients.empty()) {
        Json coeffs = Json::object();
        for (const auto& [key, c] : e.speciation.coefficients) {
            coeffs[join_key(key)] = c;
        }
        evo["species_coefficients"] = std::move(coeffs);
    }

    Json evaluator{{"kind", std::string(to_string(config.evaluator.kind))}};
    switch (config.evaluator.kind) {
        case EvaluatorSpec::Kind::subset_sum:
            if (!config.evaluator.target_bits.empty()) {
                evaluator["target"] = config.evaluator.target_bits;
            }
            break;
        case EvaluatorSpec::Kind::target_match: {
            Json counts = Json::object();
            for (const auto& [key, n] : config.evaluator.target.counts) {
                counts[join_key(key)] = n;
            }
            evaluator["counts"] = std::move(counts);
            if (!config.evaluator.target.attrs.empty()) {
                Json attrs = Json::object();
                for (const auto& [key, values] : config.evaluator.target.attrs) {
                    attrs[join_key(key)] = values;
                }
                evaluator["attrs"] = std::move(attrs);
            }
            break;
        }
        case EvaluatorSpec::Kind::worker:
            evaluator["command"] = config.evaluator.worker.command;
            evaluator["timeout_seconds"] = static_cast<double>(config.evaluator.worker.timeout.count()) / 1000.0;
            evaluator["workers"] = config.evaluator.worker.pool_size;
            if (!config.evaluator.worker.env.empty()) {
                evaluator["env"] = config.evaluator.worker.env;
            }
            break;
    }

    Json training{{"train_rate", emit_percent(e.estimation.train_rate)},
                  {"incomplete_train_epochs", e.estimation.t_i},
                  {"complete_train_epochs", e.estimation.t_c},
                  {"incomplete_fitness_threshold", e.estimation.tau_F},
                  {"complete_fitness_threshold", e.estimation.tau_Fc},
                  {"evaluator", std::move(evaluator)}};
    if (config.training.train_batches) {
        training["train_batches"] = *config.training.train_batches;
    }
    if (config.training.learning_rate) {
        training["learning_rate"] = *config.training.learning_rate;
    }
    if (config.training.loss_function) {
        training["loss_function"] = *config.training.loss_function;
    }
    if (config.training.optimizer) {
        training["optimizer"] = *config.training.optimizer;
    }

    Json run{{"seed", e.seed}, {"generation_limit", e.tau_k}, {"output_dir", config.output_dir}};
    return {{"dnn", std::move(dnn)}, {"evolution", std::move(evo)}, {"training", std::move(training)}, {"run", std::move(run)}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return Json::parse(buffer.str());
    } catch (const Json::parse_error& e) {
        throw FormatError("", path.string() + ": invalid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << text;
        if (!out.flush()) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_json_file(path)); }

std::unique_ptr<Evaluator> make_evaluator(const RunConfig& config) {
    const EvaluatorSpec& spec = config.evaluator;
    switch (spec.kind) {
        case EvaluatorSpec::Kind::subset_sum: {
            auto schema = StateSchema::from_space(config.space);
            SubsetSumProblem problem = spec.target_bits.empty() ? SubsetSumProblem::all_ones(std::move(schema))
                                                                : SubsetSumProblem{std::move(schema), spec.target_bits};
            return std::make_unique<SubsetSumEvaluator>(std::move(problem));
        }
        case EvaluatorSpec::Kind::target_match:
            return std::make_unique<TargetMatchEvaluator>(spec.target, config.space);
        case EvaluatorSpec::Kind::worker: {
            WorkerConfig worker = spec.worker;
            worker.pool_size = worker_pool_size_from_env(worker.pool_size);
            worker.env.emplace("SANE_DNN_TYPE", config.dnn_type);
            if (config.training.train_batches) {
                worker.env.emplace("SANE_TRAIN_BATCHES", std::to_string(*config.training.train_batches));
            }
            if (config.training.learning_rate) {
                worker.env.emplace("SANE_LEARNING_RATE", Json(*config.training.learning_rate).dump());
            }
            if (config.training.loss_function) {
                worker.env.emplace("SANE_LOSS_FUNCTION", *config.training.loss_function);
            }
            if (config.training.optimizer) {
                worker.env.emplace("SANE_OPTIMIZER", *config.training.optimizer);
            }
            return std::make_unique<BridgeEvaluator>(std::move(worker));
        }
    }
    throw std::invalid_argument("unknown evaluator kind");
}

}  // namespace sane
