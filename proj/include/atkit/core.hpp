#ifndef ATKIT_CORE_HPP
#define ATKIT_CORE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "atkit/errors.hpp"

namespace atkit {

using NodeId = std::string;

enum class NodeKind { bas, and_gate, or_gate };

const char* node_kind_name(NodeKind kind) noexcept;

/// Ontological category a node can be annotated with.
enum class OntoType { event_type, situation_type, goal, intention, object, unspecified };

const char* onto_type_name(OntoType type) noexcept;
std::optional<OntoType> onto_type_from_name(const std::string& name) noexcept;

struct AtNode {
    NodeId id;
    NodeKind kind = NodeKind::bas;
    std::string label;
    std::optional<OntoType> annotation;
};

/// Rooted DAG of AND/OR gates over basic attack steps. Immutable once built;
/// construction validates every structural invariant.
class AttackTree {
public:
    static AttackTree build(std::vector<AtNode> nodes,
                            std::vector<std::pair<NodeId, NodeId>> edges,
                            NodeId root);

    const NodeId& root() const { return nodes_[root_].id; }
    const std::vector<AtNode>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    bool contains(const NodeId& id) const { return index_.count(id) != 0; }
    const AtNode& node(const NodeId& id) const;
    const std::vector<NodeId>& children(const NodeId& id) const;
    std::size_t parent_count(const NodeId& id) const;

    /// BAS ids in sorted order.
    std::vector<NodeId> basic_steps() const;

private:
    AttackTree() = default;

    std::size_t index_of(const NodeId& id) const;

    std::vector<AtNode> nodes_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<std::size_t> parent_counts_;
    std::size_t root_ = 0;
    std::size_t edge_count_ = 0;
};

inline AttackTree build_tree(std::vector<AtNode> nodes,
                             std::vector<std::pair<NodeId, NodeId>> edges,
                             NodeId root) {
    return AttackTree::build(std::move(nodes), std::move(edges), std::move(root));
}

/// Boolean expression over BAS ids. Connectives are n-ary.
struct BooleanExpr {
    enum class Op { variable, conjunction, disjunction };

    Op op = Op::variable;
    NodeId var;                      // set when op == variable
    std::vector<BooleanExpr> args;   // set otherwise

    static BooleanExpr make_var(NodeId id);
    static BooleanExpr make_and(std::vector<BooleanExpr> args);
    static BooleanExpr make_or(std::vector<BooleanExpr> args);
};

BooleanExpr boolean_formula(const AttackTree& tree);

std::string to_string(const BooleanExpr& expr);

/// Normal form modulo commutativity: arguments of every connective sorted by
/// their rendered text. Two expressions are commutatively equal iff their
/// normal forms render identically.
BooleanExpr commutative_normal_form(const BooleanExpr& expr);

bool commutatively_equal(const BooleanExpr& a, const BooleanExpr& b);

/// Evaluates the expression with the given variables set to true.
bool evaluate(const BooleanExpr& expr, const std::vector<NodeId>& true_vars);

/// True iff every node has at most one parent.
bool is_tree_shaped(const AttackTree& tree);

/// SHA-256 hex digest, invariant under node renaming and reordering of
/// children of the same gate. With include_labels, normalized labels
/// (trimmed, case-folded) participate as well.
std::string canonical_hash(const AttackTree& tree, bool include_labels);

} // namespace atkit

#endif
