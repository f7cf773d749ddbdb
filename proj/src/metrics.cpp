#include "atkit/metrics.hpp"

#include <algorithm>
#include <limits>

namespace atkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double op_min(double a, double b) { return std::min(a, b); }
double op_max(double a, double b) { return std::max(a, b); }
double op_sum(double a, double b) { return a + b; }
double op_product(double a, double b) { return a * b; }

void check_values(const AttackTree& tree, const ValueMap& values) {
    for (const auto& bas : tree.basic_steps())
        if (values.find(bas) == values.end())
            throw AtError(errc::missing_value, "no value for basic attack step '" + bas + "'");
}

double fold_attack(const AttributeDomain& domain, const Attack& attack, const ValueMap& values) {
    double acc = domain.and_neutral;
    for (const auto& member : attack)
        acc = domain.and_op(acc, values.at(member));
    return acc;
}

} // namespace

AttributeDomain builtin_domain(const std::string& name) {
    // The operator table is a pinned convention; see README for the rationale
    // behind each pairing.
    if (name == "min_cost")
        return {name, "non-negative reals with +inf", op_min, op_sum, kInf, 0.0, "cost"};
    if (name == "min_time")
        return {name, "non-negative reals with +inf", op_min, op_max, kInf, 0.0, "time"};
    if (name == "min_time_seq")
        return {name, "non-negative reals with +inf", op_min, op_sum, kInf, 0.0, "time"};
    if (name == "max_prob")
        return {name, "[0,1]", op_max, op_product, 0.0, 1.0, "prob"};
    if (name == "max_damage")
        return {name, "non-negative reals", op_max, op_sum, 0.0, 0.0, "damage"};
    if (name == "min_skill")
        return {name, "non-negative reals with +inf", op_min, op_max, kInf, 0.0, "skill"};
    if (name == "max_challenge")
        return {name, "non-negative reals with +inf", op_max, op_min, 0.0, kInf, "challenge"};
    throw AtError(errc::unknown_domain, "'" + name + "'");
}

std::vector<std::string> builtin_domain_names() {
    return {"min_cost", "min_time", "min_time_seq", "max_prob",
            "max_damage", "min_skill", "max_challenge"};
}

MetricResult metric_via_attacks(const AttackTree& tree, const AttributeDomain& domain,
                                const ValueMap& values, std::size_t suite_cap) {
    check_values(tree, values);
    AttackSuite suite = minimal_attacks_dnf(tree, suite_cap);

    double acc = domain.or_neutral;
    for (const auto& attack : suite.attacks)
        acc = domain.or_op(acc, fold_attack(domain, attack, values));

    MetricResult result;
    result.value = acc;
    result.method = "via_attacks";
    // First attack attaining the value, in deterministic suite order.
    for (const auto& attack : suite.attacks)
        if (fold_attack(domain, attack, values) == acc) {
            result.witness = attack;
            break;
        }
    return result;
}

MetricResult metric_bottom_up(const AttackTree& tree, const AttributeDomain& domain,
                              const ValueMap& values) {
    if (!is_tree_shaped(tree))
        throw AtError(errc::not_tree_shaped,
                      "bottom-up evaluation over shared nodes double-counts; "
                      "use metric_via_attacks");
    check_values(tree, values);

    struct NodeResult {
        double value;
        std::optional<Attack> witness;
    };

    std::function<NodeResult(const NodeId&)> eval = [&](const NodeId& id) -> NodeResult {
        const auto& node = tree.node(id);
        if (node.kind == NodeKind::bas)
            return {values.at(id), Attack{id}};

        std::vector<NodeResult> child_results;
        for (const auto& child : tree.children(id))
            child_results.push_back(eval(child));

        NodeResult result;
        if (node.kind == NodeKind::or_gate) {
            double acc = domain.or_neutral;
            for (const auto& cr : child_results)
                acc = domain.or_op(acc, cr.value);
            result.value = acc;
            for (const auto& cr : child_results)
                if (cr.value == acc && cr.witness) {
                    result.witness = cr.witness;
                    break;
                }
        } else {
            double acc = domain.and_neutral;
            Attack merged;
            bool have_witness = true;
            for (const auto& cr : child_results) {
                acc = domain.and_op(acc, cr.value);
                if (cr.witness)
                    merged.insert(cr.witness->begin(), cr.witness->end());
                else
                    have_witness = false;
            }
            result.value = acc;
            if (have_witness)
                result.witness = std::move(merged);
        }
        return result;
    };

    NodeResult root_result = eval(tree.root());
    MetricResult result;
    result.value = root_result.value;
    result.witness = std::move(root_result.witness);
    result.method = "bottom_up";
    return result;
}

MetricResult metric(const AttackTree& tree, const AttributeDomain& domain,
                    const ValueMap& values, std::size_t suite_cap) {
    if (is_tree_shaped(tree))
        return metric_bottom_up(tree, domain, values);
    return metric_via_attacks(tree, domain, values, suite_cap);
}

} // namespace atkit
