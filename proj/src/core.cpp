#include "atkit/core.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "atkit/detail/sha256.hpp"

namespace atkit {

const char* errc_name(errc code) noexcept {
    switch (code) {
    case errc::cycle_detected: return "CycleDetected";
    case errc::multiple_roots: return "MultipleRoots";
    case errc::unreachable_node: return "UnreachableNode";
    case errc::dangling_edge: return "DanglingEdge";
    case errc::leaf_with_children: return "LeafWithChildren";
    case errc::empty_gate: return "EmptyGate";
    case errc::unknown_node: return "UnknownNode";
    case errc::unknown_bas: return "UnknownBas";
    case errc::not_successful: return "NotSuccessful";
    case errc::too_large: return "TooLarge";
    case errc::resource_limit: return "ResourceLimit";
    case errc::missing_value: return "MissingValue";
    case errc::not_tree_shaped: return "NotTreeShaped";
    case errc::unknown_domain: return "UnknownDomain";
    case errc::syntax_error: return "SyntaxError";
    case errc::duplicate_definition: return "DuplicateDefinition";
    case errc::undefined_child: return "UndefinedChild";
    case errc::missing_toplevel: return "MissingToplevel";
    case errc::attribute_on_gate: return "AttributeOnGate";
    case errc::schema_violation: return "SchemaViolation";
    case errc::dangling_reference: return "DanglingReference";
    case errc::duplicate_id: return "DuplicateId";
    case errc::unknown_entity: return "UnknownEntity";
    case errc::not_an_event_type: return "NotAnEventType";
    case errc::validation_failed: return "ValidationFailed";
    case errc::bad_map: return "BadMap";
    case errc::suite_too_large: return "SuiteTooLarge";
    }
    return "UnknownError";
}

const char* node_kind_name(NodeKind kind) noexcept {
    switch (kind) {
    case NodeKind::bas: return "bas";
    case NodeKind::and_gate: return "and";
    case NodeKind::or_gate: return "or";
    }
    return "?";
}

const char* onto_type_name(OntoType type) noexcept {
    switch (type) {
    case OntoType::event_type: return "event_type";
    case OntoType::situation_type: return "situation_type";
    case OntoType::goal: return "goal";
    case OntoType::intention: return "intention";
    case OntoType::object: return "object";
    case OntoType::unspecified: return "unspecified";
    }
    return "?";
}

std::optional<OntoType> onto_type_from_name(const std::string& name) noexcept {
    if (name == "event_type") return OntoType::event_type;
    if (name == "situation_type") return OntoType::situation_type;
    if (name == "goal") return OntoType::goal;
    if (name == "intention") return OntoType::intention;
    if (name == "object") return OntoType::object;
    if (name == "unspecified") return OntoType::unspecified;
    return std::nullopt;
}

AttackTree AttackTree::build(std::vector<AtNode> nodes,
                             std::vector<std::pair<NodeId, NodeId>> edges,
                             NodeId root) {
    AttackTree tree;
    tree.nodes_ = std::move(nodes);

    for (std::size_t i = 0; i < tree.nodes_.size(); ++i) {
        const auto& id = tree.nodes_[i].id;
        if (id.empty())
            throw AtError(errc::schema_violation, "node with empty id");
        if (!tree.index_.emplace(id, i).second)
            throw AtError(errc::duplicate_id, "node id '" + id + "' defined twice");
    }
    if (tree.index_.count(root) == 0)
        throw AtError(errc::unknown_node, "root '" + root + "' is not a node");
    tree.root_ = tree.index_.at(root);

    tree.children_.assign(tree.nodes_.size(), {});
    tree.parent_counts_.assign(tree.nodes_.size(), 0);
    for (const auto& [parent, child] : edges) {
        auto pit = tree.index_.find(parent);
        auto cit = tree.index_.find(child);
        if (pit == tree.index_.end() || cit == tree.index_.end())
            throw AtError(errc::dangling_edge,
                          "edge " + parent + " -> " + child + " names an undefined node");
        tree.children_[pit->second].push_back(child);
        tree.parent_counts_[cit->second] += 1;
        tree.edge_count_ += 1;
    }

    for (std::size_t i = 0; i < tree.nodes_.size(); ++i) {
        const auto& node = tree.nodes_[i];
        if (node.kind == NodeKind::bas && !tree.children_[i].empty())
            throw AtError(errc::leaf_with_children,
                          "basic attack step '" + node.id + "' has children");
        if (node.kind != NodeKind::bas && tree.children_[i].empty())
            throw AtError(errc::empty_gate, "gate '" + node.id + "' has no children");
    }

    // Cycle check: iterative DFS with colors; reports one cycle by name.
    enum class Color { white, grey, black };
    std::vector<Color> color(tree.nodes_.size(), Color::white);
    std::vector<NodeId> path;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        color[i] = Color::grey;
        path.push_back(tree.nodes_[i].id);
        for (const auto& child : tree.children_[i]) {
            std::size_t c = tree.index_.at(child);
            if (color[c] == Color::grey) {
                std::string cycle;
                auto start = std::find(path.begin(), path.end(), child);
                for (auto it = start; it != path.end(); ++it)
                    cycle += *it + " -> ";
                cycle += child;
                throw AtError(errc::cycle_detected, cycle);
            }
            if (color[c] == Color::white)
                visit(c);
        }
        path.pop_back();
        color[i] = Color::black;
    };
    for (std::size_t i = 0; i < tree.nodes_.size(); ++i)
        if (color[i] == Color::white)
            visit(i);

    // Reachability from root; a second parentless node is a second root.
    std::vector<bool> reachable(tree.nodes_.size(), false);
    std::vector<std::size_t> stack{tree.root_};
    reachable[tree.root_] = true;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (const auto& child : tree.children_[i]) {
            std::size_t c = tree.index_.at(child);
            if (!reachable[c]) {
                reachable[c] = true;
                stack.push_back(c);
            }
        }
    }
    for (std::size_t i = 0; i < tree.nodes_.size(); ++i) {
        if (reachable[i])
            continue;
        if (tree.parent_counts_[i] == 0)
            throw AtError(errc::multiple_roots,
                          "'" + tree.nodes_[i].id + "' is a second parentless node besides '" +
                              tree.nodes_[tree.root_].id + "'");
    }
    for (std::size_t i = 0; i < tree.nodes_.size(); ++i)
        if (!reachable[i])
            throw AtError(errc::unreachable_node,
                          "'" + tree.nodes_[i].id + "' is not reachable from the root");
    if (tree.parent_counts_[tree.root_] != 0)
        throw AtError(errc::multiple_roots,
                      "declared root '" + root + "' has a parent");

    return tree;
}

std::size_t AttackTree::index_of(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw AtError(errc::unknown_node, "'" + id + "'");
    return it->second;
}

const AtNode& AttackTree::node(const NodeId& id) const { return nodes_[index_of(id)]; }

const std::vector<NodeId>& AttackTree::children(const NodeId& id) const {
    return children_[index_of(id)];
}

std::size_t AttackTree::parent_count(const NodeId& id) const {
    return parent_counts_[index_of(id)];
}

std::vector<NodeId> AttackTree::basic_steps() const {
    std::vector<NodeId> out;
    for (const auto& node : nodes_)
        if (node.kind == NodeKind::bas)
            out.push_back(node.id);
    std::sort(out.begin(), out.end());
    return out;
}

BooleanExpr BooleanExpr::make_var(NodeId id) {
    BooleanExpr e;
    e.op = Op::variable;
    e.var = std::move(id);
    return e;
}

BooleanExpr BooleanExpr::make_and(std::vector<BooleanExpr> args) {
    BooleanExpr e;
    e.op = Op::conjunction;
    e.args = std::move(args);
    return e;
}

BooleanExpr BooleanExpr::make_or(std::vector<BooleanExpr> args) {
    BooleanExpr e;
    e.op = Op::disjunction;
    e.args = std::move(args);
    return e;
}

BooleanExpr boolean_formula(const AttackTree& tree) {
    // Shared DAG subtrees are duplicated in the expression.
    std::function<BooleanExpr(const NodeId&)> formula = [&](const NodeId& id) {
        const auto& node = tree.node(id);
        if (node.kind == NodeKind::bas)
            return BooleanExpr::make_var(id);
        std::vector<BooleanExpr> args;
        for (const auto& child : tree.children(id))
            args.push_back(formula(child));
        return node.kind == NodeKind::and_gate ? BooleanExpr::make_and(std::move(args))
                                               : BooleanExpr::make_or(std::move(args));
    };
    return formula(tree.root());
}

std::string to_string(const BooleanExpr& expr) {
    switch (expr.op) {
    case BooleanExpr::Op::variable:
        return expr.var;
    case BooleanExpr::Op::conjunction:
    case BooleanExpr::Op::disjunction: {
        const char* sep = expr.op == BooleanExpr::Op::conjunction ? " & " : " | ";
        std::string out = "(";
        for (std::size_t i = 0; i < expr.args.size(); ++i) {
            if (i != 0)
                out += sep;
            out += to_string(expr.args[i]);
        }
        out += ")";
        return out;
    }
    }
    return "";
}

BooleanExpr commutative_normal_form(const BooleanExpr& expr) {
    if (expr.op == BooleanExpr::Op::variable)
        return expr;
    BooleanExpr out;
    out.op = expr.op;
    for (const auto& arg : expr.args)
        out.args.push_back(commutative_normal_form(arg));
    std::sort(out.args.begin(), out.args.end(), [](const BooleanExpr& a, const BooleanExpr& b) {
        return to_string(a) < to_string(b);
    });
    return out;
}

bool commutatively_equal(const BooleanExpr& a, const BooleanExpr& b) {
    return to_string(commutative_normal_form(a)) == to_string(commutative_normal_form(b));
}

bool evaluate(const BooleanExpr& expr, const std::vector<NodeId>& true_vars) {
    switch (expr.op) {
    case BooleanExpr::Op::variable:
        return std::find(true_vars.begin(), true_vars.end(), expr.var) != true_vars.end();
    case BooleanExpr::Op::conjunction:
        return std::all_of(expr.args.begin(), expr.args.end(),
                           [&](const BooleanExpr& e) { return evaluate(e, true_vars); });
    case BooleanExpr::Op::disjunction:
        return std::any_of(expr.args.begin(), expr.args.end(),
                           [&](const BooleanExpr& e) { return evaluate(e, true_vars); });
    }
    return false;
}

bool is_tree_shaped(const AttackTree& tree) {
    for (const auto& node : tree.nodes())
        if (tree.parent_count(node.id) > 1)
            return false;
    return true;
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

} // namespace

std::string canonical_hash(const AttackTree& tree, bool include_labels) {
    std::unordered_map<NodeId, std::string> memo;
    std::function<std::string(const NodeId&)> digest = [&](const NodeId& id) -> std::string {
        auto it = memo.find(id);
        if (it != memo.end())
            return it->second;
        const auto& node = tree.node(id);
        std::vector<std::string> child_digests;
        for (const auto& child : tree.children(id))
            child_digests.push_back(digest(child));
        std::sort(child_digests.begin(), child_digests.end());
        std::string payload = node_kind_name(node.kind);
        payload += "(";
        for (const auto& d : child_digests) {
            payload += d;
            payload += ",";
        }
        payload += ")";
        if (include_labels) {
            payload += "|";
            payload += normalized_label(node.label);
        }
        std::string h = detail::sha256_hex(payload);
        memo.emplace(id, h);
        return h;
    };
    return digest(tree.root());
}

} // namespace atkit
