#include "sane/serialization.hpp"

#include <algorithm>
#include <cmath>

namespace sane {

namespace {

const Json& member(const Json& doc, const std::string& key, const std::string& path) {
    if (!doc.is_object()) {
        throw FormatError(path, "expected an object");
    }
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw FormatError(path + "/" + key, "missing");
    }
    return *it;
}

template <typename T>
T get_as(const Json& doc, const std::string& path) {
    try {
        return doc.get<T>();
    } catch (const Json::exception& e) {
        throw FormatError(path, e.what());
    }
}

template <typename T>
T field(const Json& doc, const std::string& key, const std::string& path) {
    return get_as<T>(member(doc, key, path), path + "/" + key);
}

template <typename T>
T field_or(const Json& doc, const std::string& key, const std::string& path, T fallback) {
    if (!doc.is_object() || !doc.contains(key)) {
        return fallback;
    }
    return get_as<T>(doc.at(key), path + "/" + key);
}

Json strand_to_json(const Strand& strand) {
    Json cells = Json::array();
    for (const auto& c : strand.cells) {
        cells.push_back({{"key", c.key},
                         {"type", c.cell_type},
                         {"in", c.in_key},
                         {"out", c.out_key},
                         {"attrs", c.core_attrs},
                         {"affiliated", c.affiliated}});
    }
    return cells;
}

Strand strand_from_json(const std::string& organ, const Json& doc, const std::string& path) {
    if (!doc.is_array()) {
        throw FormatError(path, "expected an array of cell genes");
    }
    Strand strand{organ, {}};
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string cpath = path + "/" + std::to_string(i);
        const Json& c = doc[i];
        strand.cells.push_back(CellGene{field<int>(c, "key", cpath), field<std::string>(c, "type", cpath),
                                        field<int>(c, "in", cpath), field<int>(c, "out", cpath),
                                        field<std::vector<int>>(c, "attrs", cpath),
                                        field<std::vector<std::string>>(c, "affiliated", cpath)});
    }
    return strand;
}

Json optional_number(const std::optional<double>& value) { return value ? Json(*value) : Json(nullptr); }

std::optional<double> number_or_null(const Json& doc, const std::string& key, const std::string& path) {
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return std::nullopt;
    }
    return get_as<double>(doc.at(key), path + "/" + key);
}

}  // namespace

Json to_json(const FitnessRecord& record) {
    return {{"incomplete", optional_number(record.incomplete)},
            {"complete", optional_number(record.complete)},
            {"evaluated_generation", record.evaluated_generation},
            {"inherited", record.inherited}};
}

FitnessRecord fitness_from_json(const Json& doc) {
    const std::string path = "/fitness";
    if (!doc.is_object()) {
        throw FormatError(path, "expected an object");
    }
    FitnessRecord r;
    r.incomplete = number_or_null(doc, "incomplete", path);
    r.complete = number_or_null(doc, "complete", path);
    r.evaluated_generation = field_or<int>(doc, "evaluated_generation", path, 0);
    r.inherited = field_or<bool>(doc, "inherited", path, false);
    return r;
}

Json to_json(const Genotype& genotype) {
    Json strands = Json::object();
    for (const auto& s : genotype.strands) {
        strands[s.organ] = strand_to_json(s);
    }
    Json doc{{"id", genotype.id},
             {"strands", std::move(strands)},
             {"birth_generation", genotype.birth_generation},
             {"next_key", genotype.next_key}};
    if (genotype.fitness) {
        doc["fitness"] = to_json(*genotype.fitness);
    }
    return doc;
}

Genotype genotype_from_json(const Json& doc, const SearchSpace* space) {
    Genotype g;
    g.id = field<GenotypeId>(doc, "id", "");
    const Json& strands = member(doc, "strands", "");
    if (!strands.is_object()) {
        throw FormatError("/strands", "expected an object keyed by organ");
    }
    if (space != nullptr) {
        for (const auto& organ : space->organs) {
            auto it = strands.find(organ.name);
            if (it == strands.end()) {
                throw FormatError("/strands/" + organ.name, "missing");
            }
            g.strands.push_back(strand_from_json(organ.name, *it, "/strands/" + organ.name));
        }
        for (const auto& [name, value] : strands.items()) {
            if (space->find_organ(name) == nullptr) {
                throw FormatError("/strands/" + name, "organ not in space");
            }
        }
    } else {
        for (const auto& [name, value] : strands.items()) {
            g.strands.push_back(strand_from_json(name, value, "/strands/" + name));
        }
    }
    g.birth_generation = field_or<int>(doc, "birth_generation", "", 0);
    int max_key = 0;
    for (const auto& s : g.strands) {
        for (const auto& c : s.cells) {
            max_key = std::max(max_key, c.key);
        }
    }
    g.next_key = field_or<int>(doc, "next_key", "", max_key + 1);
    if (doc.contains("fitness") && !doc.at("fitness").is_null()) {
        g.fitness = fitness_from_json(doc.at("fitness"));
    }
    return g;
}

Json to_json(const Phenotype& phenotype) {
    Json nodes = Json::array();
    for (const auto& n : phenotype.nodes) {
        nodes.push_back({{"kind", n.kind}, {"attrs", n.attrs}, {"cell", n.cell}, {"organ", n.organ}});
    }
    Json edges = Json::array();
    for (const auto& [from, to] : phenotype.edges) {
        edges.push_back({from, to});
    }
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"input_shape", phenotype.input_shape}};
}

Phenotype phenotype_from_json(const Json& doc) {
    Phenotype p;
    const Json& nodes = member(doc, "nodes", "");
    if (!nodes.is_array()) {
        throw FormatError("/nodes", "expected an array");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "/nodes/" + std::to_string(i);
        p.nodes.push_back(ModuleNode{field<std::string>(nodes[i], "kind", path),
                                     field<std::vector<int>>(nodes[i], "attrs", path), field<int>(nodes[i], "cell", path),
                                     field<std::string>(nodes[i], "organ", path)});
    }
    const Json& edges = member(doc, "edges", "");
    if (!edges.is_array()) {
        throw FormatError("/edges", "expected an array");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto pair = get_as<std::vector<int>>(edges[i], "/edges/" + std::to_string(i));
        if (pair.size() != 2) {
            throw FormatError("/edges/" + std::to_string(i), "expected [from, to]");
        }
        p.edges.emplace_back(pair[0], pair[1]);
    }
    p.input_shape = field<std::vector<int>>(doc, "input_shape", "");
    for (const auto& n : p.nodes) {
        if (n.kind == "conv" || n.kind == "linear" || n.kind == "convtranspose" || n.kind == "convlstm") {
            ++p.derived.cell_count[n.kind];
        }
    }
    p.derived.layer_count = static_cast<int>(p.nodes.size());
    p.derived.parameter_count = parameter_count(p);
    return p;
}

Json to_json(const SearchSpace& space) {
    Json cells = Json::array();
    for (const auto& c : space.cells) {
        Json attrs = Json::array();
        for (const auto& a : c.attrs) {
            attrs.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"growth", a.growth}});
        }
        cells.push_back({{"name", c.name},
                         {"kind", std::string(to_string(c.core_kind))},
                         {"attrs", std::move(attrs)},
                         {"affiliated", c.allowed_affiliated},
                         {"init", {c.initial_core_attrs, c.initial_affiliated}}});
    }
    Json organs = Json::array();
    for (const auto& o : space.organs) {
        Json organ{{"name", o.name}, {"cells", o.allowed_cells}, {"weight", o.mutation_weight}};
        if (o.mirror_of) {
            organ["mirror_of"] = *o.mirror_of;
        }
        organs.push_back(std::move(organ));
    }
    Json relations = Json::array();
    for (const auto& [from, to] : space.rule.relations) {
        relations.push_back({from, to});
    }
    return {{"cells", std::move(cells)},
            {"organs", std::move(organs)},
            {"rule", {{"degree", space.rule.degree}, {"relations", std::move(relations)}}},
            {"ceilings", space.cell_quantity_ceilings}};
}

SearchSpace space_from_json(const Json& doc) {
    SearchSpace space;
    const Json& cells = member(doc, "cells", "");
    if (!cells.is_array()) {
        throw FormatError("/cells", "expected an array");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string path = "/cells/" + std::to_string(i);
        const Json& c = cells[i];
        CellType type;
        type.name = field<std::string>(c, "name", path);
        const auto kind = parse_core_kind(field<std::string>(c, "kind", path));
        if (!kind) {
            throw FormatError(path + "/kind", "unknown core kind");
        }
        type.core_kind = *kind;
        const Json& attrs = member(c, "attrs", path);
        if (!attrs.is_array()) {
            throw FormatError(path + "/attrs", "expected an array");
        }
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            const std::string apath = path + "/attrs/" + std::to_string(a);
            type.attrs.push_back(AttrDescriptor{field<std::string>(attrs[a], "name", apath),
                                                field<int>(attrs[a], "min", apath), field<int>(attrs[a], "max", apath),
                                                field_or<int>(attrs[a], "growth", apath, 1)});
        }
        type.allowed_affiliated = field_or<std::vector<std::string>>(c, "affiliated", path, {});
        const Json& init = member(c, "init", path);
        if (!init.is_array() || init.size() != 2) {
            throw FormatError(path + "/init", "expected [[attrs], [affiliated]]");
        }
        type.initial_core_attrs = get_as<std::vector<int>>(init[0], path + "/init/0");
        type.initial_affiliated = get_as<std::vector<std::string>>(init[1], path + "/init/1");
        space.cells.push_back(std::move(type));
    }
    const Json& organs = member(doc, "organs", "");
    if (!organs.is_array()) {
        throw FormatError("/organs", "expected an array");
    }
    for (std::size_t i = 0; i < organs.size(); ++i) {
        const std::string path = "/organs/" + std::to_string(i);
        Organ organ;
        organ.name = field<std::string>(organs[i], "name", path);
        organ.allowed_cells = field<std::vector<std::string>>(organs[i], "cells", path);
        organ.mutation_weight = field_or<double>(organs[i], "weight", path, 1.0);
        if (organs[i].contains("mirror_of")) {
            organ.mirror_of = field<std::string>(organs[i], "mirror_of", path);
        }
        space.organs.push_back(std::move(organ));
    }
    const Json& rule = member(doc, "rule", "");
    space.rule.degree = field_or<int>(rule, "degree", "/rule", 1);
    const auto relations =
        field_or<std::vector<std::vector<std::string>>>(rule, "relations", "/rule", std::vector<std::vector<std::string>>{});
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].size() != 2) {
            throw FormatError("/rule/relations/" + std::to_string(i), "expected a pair");
        }
        space.rule.relations.emplace_back(relations[i][0], relations[i][1]);
    }
    for (const auto& c : space.cells) {
        space.cell_quantity_ceilings[c.name] = kDefaultCellCeiling;
    }
    if (doc.contains("ceilings")) {
        for (const auto& [name, value] : get_as<std::map<std::string, int>>(doc.at("ceilings"), "/ceilings")) {
            space.cell_quantity_ceilings[name] = value;
        }
    }
    return space;
}

Json to_json(const SpeciesSet& set) {
    Json species = Json::array();
    for (const auto& s : set.species) {
        species.push_back({{"id", s.id}, {"representative", to_json(s.representative)}, {"members", s.members}, {"age", s.age}});
    }
    return {{"next_id", set.next_id}, {"species", std::move(species)}};
}

SpeciesSet species_from_json(const Json& doc, const SearchSpace* space) {
    SpeciesSet set;
    set.next_id = field<int>(doc, "next_id", "");
    const Json& species = member(doc, "species", "");
    if (!species.is_array()) {
        throw FormatError("/species", "expected an array");
    }
    for (std::size_t i = 0; i < species.size(); ++i) {
        const std::string path = "/species/" + std::to_string(i);
        Species s;
        s.id = field<int>(species[i], "id", path);
        s.representative = genotype_from_json(member(species[i], "representative", path), space);
        s.members = field<std::vector<GenotypeId>>(species[i], "members", path);
        s.age = field_or<int>(species[i], "age", path, 0);
        set.species.push_back(std::move(s));
    }
    return set;
}

std::string encode_request_line(const EvaluationRequest& request) {
    Json doc{{"id", request.genotype_id},
             {"phase", std::string(to_string(request.phase))},
             {"budget", request.budget},
             {"seed", request.seed},
             {"phenotype", request.phenotype ? to_json(*request.phenotype) : Json::object()}};
    return doc.dump();
}

EvaluationRequest decode_request_line(std::string_view line) {
    Json doc;
    try {
        doc = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw FormatError("", std::string("invalid JSON: ") + e.what());
    }
    EvaluationRequest r;
    r.genotype_id = field<GenotypeId>(doc, "id", "");
    const auto phase = field<std::string>(doc, "phase", "");
    if (phase != "incomplete" && phase != "complete") {
        throw FormatError("/phase", "expected incomplete or complete");
    }
    r.phase = phase == "incomplete" ? EvaluationPhase::incomplete : EvaluationPhase::complete;
    r.budget = field<int>(doc, "budget", "");
    r.seed = field<std::uint64_t>(doc, "seed", "");
    const Json& pheno = member(doc, "phenotype", "");
    if (pheno.is_object() && pheno.contains("nodes")) {
        r.phenotype = phenotype_from_json(pheno);
    }
    return r;
}

std::string encode_response_line(const EvaluationResponse& response) {
    Json doc{{"id", response.genotype_id},
             {"status", response.status == EvaluationStatus::ok ? "ok" : "error"},
             {"metrics", response.metrics}};
    if (response.status == EvaluationStatus::ok) {
        doc["fitness"] = response.fitness;
    }
    if (!response.message.empty()) {
        doc["message"] = response.message;
    }
    return doc.dump();
}

EvaluationResponse decode_response_line(std::string_view line) {
    Json doc;
    try {
        doc = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw FormatError("", std::string("invalid JSON: ") + e.what());
    }
    EvaluationResponse r;
    r.genotype_id = field<GenotypeId>(doc, "id", "");
    const auto status = field<std::string>(doc, "status", "");
    if (status != "ok" && status != "error") {
        throw FormatError("/status", "expected ok or error");
    }
    r.status = status == "ok" ? EvaluationStatus::ok : EvaluationStatus::error;
    if (doc.contains("metrics") && !doc.at("metrics").is_null()) {
        r.metrics = get_as<std::map<std::string, double>>(doc.at("metrics"), "/metrics");
    }
    r.message = field_or<std::string>(doc, "message", "", "");
    if (r.status == EvaluationStatus::ok) {
        if (!doc.contains("fitness") || !doc.at("fitness").is_number()) {
            throw FormatError("/fitness", "ok response needs a numeric fitness");
        }
        r.fitness = doc.at("fitness").get<double>();
        if (!std::isfinite(r.fitness)) {
            throw FormatError("/fitness", "fitness must be finite");
        }
    } else {
        r.fitness = kWorstFitness;
    }
    return r;
}

}  // namespace sane
