#ifndef ATKIT_LINT_HPP
#define ATKIT_LINT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atkit/core.hpp"
#include "atkit/galileo.hpp"
#include "atkit/semantics.hpp"

namespace atkit {

enum class Severity { error, warning, info };

const char* severity_name(Severity severity) noexcept;

struct LintDiagnostic {
    std::string rule;  // L1..L7
    Severity severity = Severity::warning;
    std::optional<NodeId> node;
    std::string message;
};

/// Rule catalog:
///   L1 NodeWithoutOntoType     warning  node carries no ontological type
///   L2 RootWithoutAttackerBinding warning  root lacks a scenario reference
///   L3 SingleChildGate         warning  gate with exactly one child
///   L4 MetricOnGate            error    attribute attached to a gate
///   L5 DuplicateLabel          warning  two nodes share a normalized label
///   L6 ProbOnIndividual        error    prob on a node typed as a non-type kind
///   L7 EmptyLabel              info     node has no description
std::vector<LintDiagnostic> lint(const AttackTree& tree, const AttrMap& attrs,
                                 const AnnotationMap* annotations = nullptr);

/// Serializes diagnostics as one JSON object per line.
std::string diagnostics_to_json_lines(const std::vector<LintDiagnostic>& diagnostics);

struct DiffReport {
    bool structural_identical = false;   // canonical hash without labels
    bool label_identical = false;        // canonical hash with labels
    bool semantically_equivalent = false;  // equal minimal-attack suites
    bool semantic_evaluated = true;        // false when a suite hit the cap
};

/// BAS correspondence from tree A to tree B; identity when absent.
using BasMap = std::map<NodeId, NodeId>;

DiffReport diff(const AttackTree& tree_a, const AttrMap& attrs_a,
                const AttackTree& tree_b, const AttrMap& attrs_b,
                const BasMap* bas_map = nullptr,
                std::size_t suite_cap = kDefaultSuiteCap);

} // namespace atkit

#endif
