#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sane/phenotype.hpp"
#include "sane/report.hpp"

namespace sane::cli {

namespace fs = std::filesystem;

namespace {

int exit_code(RunStatus status) { return status == RunStatus::satisfied ? kExitSatisfied : kExitGenerationLimit; }

int drive(Engine& engine, const RunConfig& config, const fs::path& dir, std::ostream& out) {
    fs::create_directories(dir);
    engine.run([&](const Engine& e) {
        write_text_file(dir / "checkpoint.json", run_checkpoint(e, config).dump());
        write_text_file(dir / "history.csv", rows_to_csv(history_rows(e.history())));
    });
    write_outputs(engine, config, dir);
    const RunResult result = engine.result();
    out << to_string(result.status) << " after " << result.generations << " generations; best fitness "
        << format_number(selection_fitness(result.best)) << "\n";
    return exit_code(result.status);
}

int cmd_evolve(const std::string& config_path, const std::optional<std::uint64_t>& seed,
               const std::optional<std::string>& out_dir, std::ostream& out) {
    RunConfig config = load_config(config_path);
    if (seed) {
        config.engine.seed = *seed;
    }
    if (out_dir) {
        config.output_dir = *out_dir;
    }
    auto evaluator = make_evaluator(config);
    Engine engine(config.space, config.engine, *evaluator);
    return drive(engine, config, config.output_dir, out);
}

int cmd_resume(const std::string& checkpoint_path, const std::optional<std::string>& out_dir, std::ostream& out) {
    const Json doc = read_json_file(checkpoint_path);
    if (!doc.is_object() || !doc.contains("run_config")) {
        throw RestoreError("checkpoint lacks the run configuration");
    }
    RunConfig config = parse_config(doc.at("run_config"));
    auto evaluator = make_evaluator(config);
    Engine engine = Engine::restore(doc, *evaluator);
    if (engine.config() != config.engine || engine.space() != config.space) {
        throw RestoreError("run configuration does not match the engine state");
    }
    const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(checkpoint_path).parent_path();
    return drive(engine, config, dir.empty() ? fs::path(".") : dir, out);
}

Genotype load_genotype(const Json& doc, const SearchSpace* space) {
    if (doc.is_object() && doc.contains("best") && doc.at("best").contains("genotype")) {
        return genotype_from_json(doc.at("best").at("genotype"), space);
    }
    return genotype_from_json(doc, space);
}

int cmd_inspect(const std::string& genotype_path, const std::optional<std::string>& space_name,
                const std::optional<std::string>& config_path, std::ostream& out) {
    const Json doc = read_json_file(genotype_path);
    SearchSpace space;
    std::vector<int> input_shape;
    if (config_path) {
        const RunConfig config = load_config(*config_path);
        space = config.space;
        input_shape = config.engine.input_shape;
    } else {
        std::optional<BuiltinSpace> builtin;
        if (space_name) {
            builtin = parse_builtin_space(*space_name);
            if (!builtin) {
                throw std::invalid_argument("unknown space '" + *space_name + "'");
            }
        } else {
            // Infer from organ names.
            const Genotype probe = load_genotype(doc, nullptr);
            SearchSpace named;
            for (const auto& s : probe.strands) {
                named.organs.push_back(Organ{s.organ, {}, 1.0, std::nullopt});
            }
            for (auto kind : {BuiltinSpace::cnn, BuiltinSpace::gan, BuiltinSpace::lstm}) {
                SearchSpace candidate = builtin_space(kind);
                bool same = candidate.organs.size() == named.organs.size();
                for (const auto& o : named.organs) {
                    same = same && candidate.find_organ(o.name) != nullptr;
                }
                if (same) {
                    builtin = kind;
                }
            }
            if (!builtin) {
                throw std::invalid_argument("cannot infer the search space; pass --space or --config");
            }
        }
        space = builtin_space(*builtin);
        input_shape = default_input_shape(*builtin);
    }
    const Genotype genotype = load_genotype(doc, &space);
    const auto violations = validate(genotype, space);
    if (!violations.empty()) {
        throw std::invalid_argument("invalid genotype: " + violations.front().path + ": " + violations.front().message);
    }
    out << inspect_summary(genotype, space, input_shape);
    return 0;
}

int cmd_report(const std::string& history_path, bool json, std::ostream& out) {
    const auto rows = load_history(history_path);
    if (json) {
        out << rows_to_json(rows).dump(2) << "\n";
    } else {
        out << rows_to_csv(rows);
    }
    return 0;
}

std::string shape_text(const std::vector<int>& shape) {
    std::string text = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        text += (i ? ", " : "") + std::to_string(shape[i]);
    }
    return text + "]";
}

}  // namespace

Json run_checkpoint(const Engine& engine, const RunConfig& config) {
    Json doc = engine.checkpoint();
    doc["run_config"] = emit_config(config);
    return doc;
}

void write_outputs(const Engine& engine, const RunConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    write_text_file(dir / "result.json", result_json(engine.result()).dump(2) + "\n");
    write_text_file(dir / "history.csv", rows_to_csv(history_rows(engine.history())));
    write_text_file(dir / "checkpoint.json", run_checkpoint(engine, config).dump());
}

std::string inspect_summary(const Genotype& genotype, const SearchSpace& space, const std::vector<int>& input_shape) {
    const Phenotype p = decode(genotype, space, input_shape);
    std::ostringstream out;
    int cells = 0;
    std::string breakdown;
    for (const auto& [kind, n] : p.derived.cell_count) {
        cells += n;
        breakdown += (breakdown.empty() ? "" : ", ") + std::to_string(n) + " " + kind;
    }
    out << cells << " cells (" << breakdown << "), " << p.derived.layer_count << " layers, "
        << p.derived.parameter_count << " parameters\n";
    out << "input " << shape_text(p.input_shape) << " -> output " << shape_text(p.output_shape) << "\n";
    for (const auto& s : genotype.strands) {
        out << s.organ << ":";
        for (const auto& c : s.cells) {
            out << " " << c.cell_type << shape_text(c.core_attrs);
        }
        out << "\n";
    }
    for (const auto& node : p.nodes) {
        out << "  " << node.organ << "/" << node.cell << " " << node.kind << shape_text(node.attrs);
        const auto params = module_parameters(node);
        if (params > 0) {
            out << " params " << params;
        }
        out << "\n";
    }
    return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-adaptive neuroevolution engine", args.empty() ? "sane" : fs::path(args[0]).filename().string()};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    auto* evolve = app.add_subcommand("evolve", "Run an evolution from a config document");
    evolve->add_option("--config", config_path, "Run config (JSON)")->required();
    evolve->add_option("--seed", seed, "Override run.seed");
    evolve->add_option("--out", out_dir, "Output directory (overrides run.output_dir)");

    std::string checkpoint_path;
    auto* resume = app.add_subcommand("resume", "Continue a run from checkpoint.json");
    resume->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
    resume->add_option("--out", out_dir, "Output directory (default: the checkpoint's directory)");

    std::string genotype_path;
    std::optional<std::string> space_name;
    std::optional<std::string> inspect_config;
    auto* inspect = app.add_subcommand("inspect", "Summarise a genotype's decoded network");
    inspect->add_option("--genotype", genotype_path, "Genotype JSON or result.json")->required();
    auto* space_opt = inspect->add_option("--space", space_name, "Built-in space: cnn, gan or lstm");
    inspect->add_option("--config", inspect_config, "Run config supplying space and input shape")->excludes(space_opt);

    std::string history_path;
    bool as_csv = false;
    bool as_json = false;
    auto* report = app.add_subcommand("report", "Per-generation, per-species fitness table");
    report->add_option("--history", history_path, "history.csv, result.json or checkpoint.json")->required();
    auto* csv_flag = report->add_flag("--csv", as_csv, "CSV output");
    report->add_flag("--json", as_json, "JSON output")->excludes(csv_flag);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back();
    }
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : kExitFault;
    }

    try {
        if (*evolve) {
            return cmd_evolve(config_path, seed, out_dir, out);
        }
        if (*resume) {
            return cmd_resume(checkpoint_path, out_dir, out);
        }
        if (*inspect) {
            return cmd_inspect(genotype_path, space_name, inspect_config, out);
        }
        if (*report) {
            if (as_csv == as_json) {
                err << "report: pass exactly one of --csv or --json\n";
                return kExitFault;
            }
            return cmd_report(history_path, as_json, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFault;
    }
    return kExitFault;
}

}  // namespace sane::cli
