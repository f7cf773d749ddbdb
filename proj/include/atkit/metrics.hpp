#ifndef ATKIT_METRICS_HPP
#define ATKIT_METRICS_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atkit/core.hpp"
#include "atkit/semantics.hpp"

namespace atkit {

/// A semiring binding a named security metric to the two gate types.
/// or_op aggregates alternatives (OR gates / across attacks), and_op
/// aggregates conjuncts (AND gates / within an attack).
struct AttributeDomain {
    std::string name;
    std::string carrier;        // human description of the value set
    std::function<double(double, double)> or_op;
    std::function<double(double, double)> and_op;
    double or_neutral = 0.0;    // identity of or_op
    double and_neutral = 0.0;   // identity of and_op
    std::string attribute_key;  // LeafAttributes key feeding this domain
};

struct MetricResult {
    double value = 0.0;
    std::optional<Attack> witness;  // attack attaining the value, when one exists
    std::string method;             // "bottom_up" | "via_attacks"
};

/// Per-BAS metric inputs.
using ValueMap = std::map<NodeId, double>;

/// Built-in domains: min_cost, min_time, min_time_seq, max_prob, max_damage,
/// min_skill, max_challenge.
AttributeDomain builtin_domain(const std::string& name);

std::vector<std::string> builtin_domain_names();

/// Folds the domain over the minimal-attack suite. Works on trees and DAGs.
MetricResult metric_via_attacks(const AttackTree& tree, const AttributeDomain& domain,
                                const ValueMap& values,
                                std::size_t suite_cap = kDefaultSuiteCap);

/// Single bottom-up pass; only valid on tree-shaped ATs (shared nodes would
/// be double-counted).
MetricResult metric_bottom_up(const AttackTree& tree, const AttributeDomain& domain,
                              const ValueMap& values);

/// Dispatcher: bottom-up when tree-shaped, via-attacks otherwise.
MetricResult metric(const AttackTree& tree, const AttributeDomain& domain,
                    const ValueMap& values, std::size_t suite_cap = kDefaultSuiteCap);

} // namespace atkit

#endif
