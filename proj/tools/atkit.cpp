#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "atkit/core.hpp"
#include "atkit/galileo.hpp"
#include "atkit/lint.hpp"
#include "atkit/metrics.hpp"
#include "atkit/scenario.hpp"
#include "atkit/semantics.hpp"
#include "atkit/synth.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResourceLimit = 3;

int exit_code_for(const atkit::AtError& error) {
    switch (error.code()) {
    case atkit::errc::too_large:
    case atkit::errc::resource_limit:
        return kExitResourceLimit;
    case atkit::errc::missing_value:
    case atkit::errc::validation_failed:
        return kExitDiagnostics;
    default:
        return kExitUsage;
    }
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

struct Model {
    atkit::AttackTree tree;
    atkit::AttrMap attrs;
    atkit::AnnotationMap annotations;
};

Model load_model(const std::string& path, std::string format) {
    if (format.empty())
        format = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0
                     ? "json"
                     : "galileo";
    std::string text = read_input(path);
    if (format == "json") {
        auto doc = atkit::parse_json(text);
        return {std::move(doc.tree), std::move(doc.attrs), std::move(doc.annotations)};
    }
    auto result = atkit::parse_galileo(text);
    return {std::move(result.tree), std::move(result.attrs), {}};
}

std::size_t suite_cap_from_env() {
    if (const char* value = std::getenv("ATKIT_SUITE_CAP")) {
        char* end = nullptr;
        unsigned long long parsed = std::strtoull(value, &end, 10);
        if (end != value && *end == '\0' && parsed > 0)
            return static_cast<std::size_t>(parsed);
    }
    return atkit::kDefaultSuiteCap;
}

atkit::ValueMap values_for(const Model& model, const atkit::AttributeDomain& domain,
                           const std::string& overrides) {
    atkit::ValueMap values;
    for (const auto& [id, attrs] : model.attrs)
        if (auto it = attrs.find(domain.attribute_key); it != attrs.end())
            values[id] = it->second;
    std::stringstream stream(overrides);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw atkit::AtError(atkit::errc::syntax_error,
                                 "override '" + item + "' is not bas=value");
        values[item.substr(0, eq)] = std::strtod(item.c_str() + eq + 1, nullptr);
    }
    return values;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot write '" + out_path + "'");
    file << content;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"attack-tree analysis toolkit"};
    app.require_subcommand(1);

    std::string path, path_b, format, domain_name, overrides, out_path, map_path, root_id;
    bool as_json = false, min_only = false, brute = false;
    std::size_t limit = 0;
    bool export_dot = false, export_galileo = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("path", path, "input model, '-' for stdin")->required();
        cmd->add_option("--format", format, "galileo|json (default: by extension)");
        cmd->add_flag("--json", as_json, "machine-readable output");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse and structurally validate");
    add_common(validate);

    CLI::App* attacks = app.add_subcommand("attacks", "list minimal attacks");
    add_common(attacks);
    attacks->add_flag("--min-only", min_only, "restrict to minimal attacks (default)");
    attacks->add_flag("--brute", brute, "force brute-force enumeration");
    attacks->add_option("--limit", limit, "print at most N attacks");

    CLI::App* metric = app.add_subcommand("metric", "compute a security metric");
    add_common(metric);
    metric->add_option("--domain", domain_name, "attribute domain")->required();
    metric->add_option("--values", overrides, "overrides bas=value,...");

    CLI::App* synth = app.add_subcommand("synth", "derive an attack tree from a scenario");
    synth->add_option("path", path, "scenario JSON, '-' for stdin")->required();
    synth->add_option("--root", root_id, "root event type id")->required();
    synth->add_option("--out", out_path, "output path (default stdout)");
    synth->add_flag("--json", as_json, "machine-readable diagnostics");

    CLI::App* lint_cmd = app.add_subcommand("lint", "ontological diagnostics");
    add_common(lint_cmd);

    CLI::App* diff_cmd = app.add_subcommand("diff", "identity comparison of two models");
    diff_cmd->add_option("path_a", path, "first model")->required();
    diff_cmd->add_option("path_b", path_b, "second model")->required();
    diff_cmd->add_option("--map", map_path, "JSON file mapping BAS of A to BAS of B");
    diff_cmd->add_flag("--json", as_json, "machine-readable output");

    CLI::App* export_cmd = app.add_subcommand("export", "convert between carriers");
    export_cmd->add_option("path", path, "input model, '-' for stdin")->required();
    export_cmd->add_option("--format", format, "input format galileo|json");
    export_cmd->add_flag("--dot", export_dot, "emit DOT");
    export_cmd->add_flag("--galileo", export_galileo, "emit Galileo");
    export_cmd->add_flag("--json", as_json, "emit JSON carrier");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::size_t suite_cap = suite_cap_from_env();

    try {
        if (validate->parsed()) {
            Model model = load_model(path, format);
            bool tree_shaped = atkit::is_tree_shaped(model.tree);
            if (as_json) {
                json out;
                out["nodes"] = model.tree.node_count();
                out["edges"] = model.tree.edge_count();
                out["shape"] = tree_shaped ? "tree" : "dag";
                std::cout << out.dump() << "\n";
            } else {
                std::cout << model.tree.node_count() << " nodes, " << model.tree.edge_count()
                          << " edges, " << (tree_shaped ? "tree-shaped" : "dag") << "\n";
            }
            return kExitOk;
        }

        if (attacks->parsed()) {
            Model model = load_model(path, format);
            atkit::AttackSuite suite = brute ? atkit::minimal_attacks_bruteforce(model.tree)
                                             : atkit::minimal_attacks_dnf(model.tree, suite_cap);
            std::size_t count = suite.attacks.size();
            if (limit > 0)
                count = std::min(count, limit);
            if (as_json) {
                json out = json::array();
                for (std::size_t i = 0; i < count; ++i)
                    out.push_back(std::vector<std::string>(suite.attacks[i].begin(),
                                                           suite.attacks[i].end()));
                std::cout << out.dump() << "\n";
            } else {
                for (std::size_t i = 0; i < count; ++i)
                    std::cout << atkit::to_string(suite.attacks[i]) << "\n";
            }
            return kExitOk;
        }

        if (metric->parsed()) {
            Model model = load_model(path, format);
            atkit::AttributeDomain domain = atkit::builtin_domain(domain_name);
            atkit::ValueMap values = values_for(model, domain, overrides);
            atkit::MetricResult result = atkit::metric(model.tree, domain, values, suite_cap);
            if (as_json) {
                json out;
                out["domain"] = domain.name;
                out["value"] = result.value;
                if (result.witness)
                    out["witness"] = std::vector<std::string>(result.witness->begin(),
                                                              result.witness->end());
                else
                    out["witness"] = nullptr;
                out["method"] = result.method;
                std::cout << out.dump() << "\n";
            } else {
                std::cout << atkit::format_decimal(result.value);
                if (result.witness)
                    std::cout << " via " << atkit::to_string(*result.witness);
                std::cout << " (" << result.method << ")\n";
            }
            return kExitOk;
        }

        if (synth->parsed()) {
            atkit::ScenarioGraph graph = atkit::load_scenario(read_input(path));
            auto diagnostics = atkit::validate_scenario(graph);
            if (!diagnostics.empty()) {
                for (const auto& diagnostic : diagnostics)
                    std::cerr << diagnostic.rule << " " << diagnostic.subject << ": "
                              << diagnostic.message << "\n";
                return kExitDiagnostics;
            }
            atkit::SynthesisResult result = atkit::synthesize_at(graph, root_id);
            atkit::AttrMap attrs = atkit::attach_metrics(graph, result.tree, result.provenance);
            atkit::AnnotationMap annotations =
                atkit::synthesis_annotations(result.tree, result.provenance);
            write_output(out_path, atkit::emit_json(result.tree, attrs, annotations));
            return kExitOk;
        }

        if (lint_cmd->parsed()) {
            Model model = load_model(path, format);
            auto diagnostics =
                atkit::lint(model.tree, model.attrs,
                            model.annotations.empty() ? nullptr : &model.annotations);
            if (as_json) {
                std::cout << atkit::diagnostics_to_json_lines(diagnostics);
            } else {
                for (const auto& diagnostic : diagnostics)
                    std::cout << diagnostic.rule << " "
                              << atkit::severity_name(diagnostic.severity) << " "
                              << diagnostic.node.value_or("-") << ": " << diagnostic.message
                              << "\n";
            }
            bool has_errors = std::any_of(diagnostics.begin(), diagnostics.end(),
                                          [](const atkit::LintDiagnostic& d) {
                                              return d.severity == atkit::Severity::error;
                                          });
            return has_errors ? kExitDiagnostics : kExitOk;
        }

        if (diff_cmd->parsed()) {
            Model model_a = load_model(path, "");
            Model model_b = load_model(path_b, "");
            atkit::BasMap bas_map;
            bool have_map = false;
            if (!map_path.empty()) {
                json doc = json::parse(read_input(map_path));
                for (const auto& [from, to] : doc.items())
                    bas_map.emplace(from, to.get<std::string>());
                have_map = true;
            }
            atkit::DiffReport report =
                atkit::diff(model_a.tree, model_a.attrs, model_b.tree, model_b.attrs,
                            have_map ? &bas_map : nullptr, suite_cap);
            if (as_json) {
                json out;
                out["structural_identical"] = report.structural_identical;
                out["label_identical"] = report.label_identical;
                out["semantically_equivalent"] = report.semantically_equivalent;
                out["semantic_evaluated"] = report.semantic_evaluated;
                std::cout << out.dump() << "\n";
            } else {
                std::cout << "structural_identical: "
                          << (report.structural_identical ? "true" : "false") << "\n"
                          << "label_identical: "
                          << (report.label_identical ? "true" : "false") << "\n"
                          << "semantically_equivalent: "
                          << (report.semantically_equivalent ? "true" : "false");
                if (!report.semantic_evaluated)
                    std::cout << " (not evaluated: suite limit hit)";
                std::cout << "\n";
            }
            return kExitOk;
        }

        if (export_cmd->parsed()) {
            Model model = load_model(path, format);
            int selected = int(export_dot) + int(export_galileo) + int(as_json);
            if (selected != 1) {
                std::cerr << "export: pick exactly one of --dot, --galileo, --json\n";
                return kExitUsage;
            }
            if (export_dot)
                std::cout << atkit::emit_dot(model.tree, model.annotations.empty()
                                                             ? nullptr
                                                             : &model.annotations);
            else if (export_galileo)
                std::cout << atkit::emit_galileo(model.tree, model.attrs);
            else
                std::cout << atkit::emit_json(model.tree, model.attrs, model.annotations);
            return kExitOk;
        }
    } catch (const atkit::AtError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return exit_code_for(error);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitUsage;
    }

    return kExitUsage;
}
