#include "atkit/lint.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

namespace atkit {

const char* severity_name(Severity severity) noexcept {
    switch (severity) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::info: return "info";
    }
    return "?";
}

namespace {

std::string normalized_label(const std::string& label) {
    auto begin = label.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    auto end = label.find_last_not_of(" \t\r\n");
    std::string out = label.substr(begin, end - begin + 1);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::optional<OntoType> effective_ontotype(const AtNode& node,
                                           const AnnotationMap* annotations) {
    if (annotations) {
        if (auto it = annotations->find(node.id); it != annotations->end() &&
            it->second.ontotype != OntoType::unspecified)
            return it->second.ontotype;
    }
    if (node.annotation && *node.annotation != OntoType::unspecified)
        return node.annotation;
    return std::nullopt;
}

} // namespace

std::vector<LintDiagnostic> lint(const AttackTree& tree, const AttrMap& attrs,
                                 const AnnotationMap* annotations) {
    std::vector<LintDiagnostic> diagnostics;

    for (const auto& node : tree.nodes()) {
        auto ontotype = effective_ontotype(node, annotations);

        if (!ontotype)
            diagnostics.push_back({"L1", Severity::warning, node.id,
                                   "node '" + node.id + "' carries no ontological type"});

        if (node.kind != NodeKind::bas && tree.children(node.id).size() == 1)
            diagnostics.push_back({"L3", Severity::warning, node.id,
                                   "gate '" + node.id + "' has a single child"});

        if (node.kind != NodeKind::bas) {
            if (auto it = attrs.find(node.id); it != attrs.end() && !it->second.empty()) {
                std::string keys;
                for (const auto& [key, value] : it->second) {
                    (void)value;
                    keys += (keys.empty() ? "" : ",") + key;
                }
                diagnostics.push_back({"L4", Severity::error, node.id,
                                       "metric(s) " + keys + " assigned to gate '" +
                                           node.id + "'; metrics belong on leaves"});
            }
        }

        if (ontotype &&
            (*ontotype == OntoType::goal || *ontotype == OntoType::intention ||
             *ontotype == OntoType::object)) {
            if (auto it = attrs.find(node.id);
                it != attrs.end() && it->second.count("prob"))
                diagnostics.push_back({"L6", Severity::error, node.id,
                                       "node '" + node.id + "' typed as " +
                                           onto_type_name(*ontotype) +
                                           " carries prob; likelihoods attach only to types"});
        }

        if (normalized_label(node.label).empty())
            diagnostics.push_back({"L7", Severity::info, node.id,
                                   "node '" + node.id + "' has no description"});
    }

    bool root_bound = false;
    if (annotations) {
        if (auto it = annotations->find(tree.root());
            it != annotations->end() && it->second.scenario_ref)
            root_bound = true;
    }
    if (!root_bound)
        diagnostics.push_back({"L2", Severity::warning, tree.root(),
                               "root '" + tree.root() +
                                   "' is not bound to an attacker or scenario context"});

    std::map<std::string, std::vector<NodeId>> by_label;
    for (const auto& node : tree.nodes()) {
        std::string label = normalized_label(node.label);
        if (!label.empty())
            by_label[label].push_back(node.id);
    }
    for (const auto& [label, ids] : by_label) {
        if (ids.size() < 2)
            continue;
        std::string listing;
        for (const auto& id : ids)
            listing += (listing.empty() ? "" : ", ") + id;
        diagnostics.push_back({"L5", Severity::warning, ids.front(),
                               "label '" + label + "' is shared by nodes " + listing});
    }

    return diagnostics;
}

std::string diagnostics_to_json_lines(const std::vector<LintDiagnostic>& diagnostics) {
    std::string out;
    for (const auto& diagnostic : diagnostics) {
        nlohmann::ordered_json line;
        line["rule"] = diagnostic.rule;
        line["severity"] = severity_name(diagnostic.severity);
        if (diagnostic.node)
            line["node"] = *diagnostic.node;
        else
            line["node"] = nullptr;
        line["message"] = diagnostic.message;
        out += line.dump() + "\n";
    }
    return out;
}

DiffReport diff(const AttackTree& tree_a, const AttrMap& attrs_a,
                const AttackTree& tree_b, const AttrMap& attrs_b,
                const BasMap* bas_map, std::size_t suite_cap) {
    (void)attrs_a;
    (void)attrs_b;

    DiffReport report;
    report.structural_identical =
        canonical_hash(tree_a, false) == canonical_hash(tree_b, false);
    report.label_identical = canonical_hash(tree_a, true) == canonical_hash(tree_b, true);

    std::vector<NodeId> bas_a = tree_a.basic_steps();
    std::vector<NodeId> bas_b = tree_b.basic_steps();

    BasMap identity;
    if (!bas_map) {
        for (const auto& id : bas_a)
            identity.emplace(id, id);
        bas_map = &identity;
    } else {
        // An explicit map must be a bijection BAS(A) -> BAS(B).
        std::set<NodeId> domain, image;
        for (const auto& [from, to] : *bas_map) {
            domain.insert(from);
            if (!image.insert(to).second)
                throw AtError(errc::bad_map, "'" + to + "' is mapped to twice");
        }
        if (domain != std::set<NodeId>(bas_a.begin(), bas_a.end()) ||
            image != std::set<NodeId>(bas_b.begin(), bas_b.end()))
            throw AtError(errc::bad_map,
                          "map is not a bijection between the two BAS sets");
    }

    // Identity map over unequal BAS sets: trees over different steps are
    // never suite-equal.
    bool translatable = true;
    for (const auto& id : bas_a)
        if (bas_map->count(id) == 0)
            translatable = false;

    try {
        if (!translatable) {
            report.semantically_equivalent = false;
        } else {
            AttackSuite suite_a = minimal_attacks_dnf(tree_a, suite_cap);
            AttackSuite suite_b = minimal_attacks_dnf(tree_b, suite_cap);
            std::set<Attack> translated;
            for (const auto& attack : suite_a.attacks) {
                Attack mapped;
                for (const auto& member : attack)
                    mapped.insert(bas_map->at(member));
                translated.insert(std::move(mapped));
            }
            std::set<Attack> suite_b_set(suite_b.attacks.begin(), suite_b.attacks.end());
            bool same_bas = std::set<NodeId>(bas_b.begin(), bas_b.end()) ==
                            [&] {
                                std::set<NodeId> mapped;
                                for (const auto& id : bas_a)
                                    mapped.insert(bas_map->at(id));
                                return mapped;
                            }();
            report.semantically_equivalent = same_bas && translated == suite_b_set;
        }
    } catch (const AtError& error) {
        if (error.code() != errc::resource_limit && error.code() != errc::too_large)
            throw;
        report.semantic_evaluated = false;
        report.semantically_equivalent = false;
    }

    return report;
}

} // namespace atkit
