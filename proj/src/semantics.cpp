#include "atkit/semantics.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace atkit {

std::string to_string(const Attack& attack) {
    std::string out = "{";
    bool first = true;
    for (const auto& member : attack) {
        if (!first)
            out += ",";
        out += member;
        first = false;
    }
    out += "}";
    return out;
}

namespace {

// Single bottom-up pass; memo keyed by node id so DAG evaluation is linear
// in the number of edges.
bool eval_node(const AttackTree& tree, const NodeId& id, const Attack& attack,
               std::unordered_map<NodeId, bool>& memo) {
    auto it = memo.find(id);
    if (it != memo.end())
        return it->second;
    const auto& node = tree.node(id);
    bool result = false;
    switch (node.kind) {
    case NodeKind::bas:
        result = attack.count(id) != 0;
        break;
    case NodeKind::or_gate:
        for (const auto& child : tree.children(id))
            if (eval_node(tree, child, attack, memo)) {
                result = true;
                break;
            }
        break;
    case NodeKind::and_gate:
        result = true;
        for (const auto& child : tree.children(id))
            if (!eval_node(tree, child, attack, memo)) {
                result = false;
                break;
            }
        break;
    }
    memo.emplace(id, result);
    return result;
}

void sort_suite(std::vector<Attack>& attacks) {
    std::sort(attacks.begin(), attacks.end(), [](const Attack& a, const Attack& b) {
        if (a.size() != b.size())
            return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
}

bool is_subset(const Attack& small, const Attack& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Drops every attack that strictly contains another one.
std::vector<Attack> absorb(std::vector<Attack> attacks) {
    sort_suite(attacks);
    std::vector<Attack> kept;
    for (const auto& candidate : attacks) {
        bool dominated = false;
        for (const auto& k : kept)
            if (is_subset(k, candidate)) {
                dominated = true;
                break;
            }
        if (!dominated && (kept.empty() || kept.back() != candidate))
            kept.push_back(candidate);
    }
    return kept;
}

} // namespace

bool structure_function(const AttackTree& tree, const NodeId& node, const Attack& attack) {
    if (!tree.contains(node))
        throw AtError(errc::unknown_node, "'" + node + "'");
    std::unordered_map<NodeId, bool> memo;
    return eval_node(tree, node, attack, memo);
}

bool is_successful(const AttackTree& tree, const Attack& attack) {
    for (const auto& member : attack) {
        if (!tree.contains(member) || tree.node(member).kind != NodeKind::bas)
            throw AtError(errc::unknown_bas,
                          "'" + member + "' is not a basic attack step of the tree");
    }
    return structure_function(tree, tree.root(), attack);
}

bool is_minimal(const AttackTree& tree, const Attack& attack) {
    if (!is_successful(tree, attack))
        throw AtError(errc::not_successful, "attack " + to_string(attack) + " is not successful");
    for (const auto& member : attack) {
        Attack reduced = attack;
        reduced.erase(member);
        if (is_successful(tree, reduced))
            return false;
    }
    return true;
}

AttackSuite minimal_attacks_bruteforce(const AttackTree& tree) {
    std::vector<NodeId> bas = tree.basic_steps();
    if (bas.size() > kBruteForceMaxBas)
        throw AtError(errc::too_large,
                      std::to_string(bas.size()) + " basic attack steps exceed the brute-force "
                      "limit of " + std::to_string(kBruteForceMaxBas) +
                      "; use minimal_attacks_dnf");

    std::vector<Attack> successful;
    const std::size_t total = std::size_t{1} << bas.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
        Attack attack;
        for (std::size_t i = 0; i < bas.size(); ++i)
            if (mask & (std::size_t{1} << i))
                attack.insert(bas[i]);
        if (is_successful(tree, attack))
            successful.push_back(std::move(attack));
    }

    AttackSuite suite;
    suite.attacks = absorb(std::move(successful));
    return suite;
}

AttackSuite minimal_attacks_dnf(const AttackTree& tree, std::size_t suite_cap) {
    std::unordered_map<NodeId, std::vector<Attack>> memo;
    std::function<const std::vector<Attack>&(const NodeId&)> suite_of =
        [&](const NodeId& id) -> const std::vector<Attack>& {
        auto it = memo.find(id);
        if (it != memo.end())
            return it->second;
        const auto& node = tree.node(id);
        std::vector<Attack> result;
        switch (node.kind) {
        case NodeKind::bas:
            result.push_back(Attack{id});
            break;
        case NodeKind::or_gate: {
            for (const auto& child : tree.children(id)) {
                const auto& cs = suite_of(child);
                result.insert(result.end(), cs.begin(), cs.end());
            }
            result = absorb(std::move(result));
            break;
        }
        case NodeKind::and_gate: {
            result.push_back(Attack{});
            for (const auto& child : tree.children(id)) {
                const auto& cs = suite_of(child);
                std::vector<Attack> next;
                if (result.size() * cs.size() > suite_cap)
                    throw AtError(errc::resource_limit,
                                  "intermediate attack suite at '" + id + "' exceeds cap of " +
                                      std::to_string(suite_cap));
                for (const auto& left : result)
                    for (const auto& right : cs) {
                        Attack merged = left;
                        merged.insert(right.begin(), right.end());
                        next.push_back(std::move(merged));
                    }
                result = absorb(std::move(next));
            }
            break;
        }
        }
        if (result.size() > suite_cap)
            throw AtError(errc::resource_limit,
                          "attack suite at '" + id + "' exceeds cap of " +
                              std::to_string(suite_cap));
        return memo.emplace(id, std::move(result)).first->second;
    };

    AttackSuite suite;
    suite.attacks = suite_of(tree.root());
    sort_suite(suite.attacks);
    return suite;
}

} // namespace atkit
