#ifndef ATKIT_SEMANTICS_HPP
#define ATKIT_SEMANTICS_HPP

#include <set>
#include <vector>

#include "atkit/core.hpp"

namespace atkit {

/// An attack is a set of BAS ids (members achieved/performed).
using Attack = std::set<NodeId>;

/// Antichain of attacks, sorted by size then lexicographic member order.
struct AttackSuite {
    std::vector<Attack> attacks;

    bool operator==(const AttackSuite&) const = default;
};

std::string to_string(const Attack& attack);

inline constexpr std::size_t kDefaultSuiteCap = 1'000'000;
inline constexpr std::size_t kBruteForceMaxBas = 20;

/// True iff the attack reaches the given node.
bool structure_function(const AttackTree& tree, const NodeId& node, const Attack& attack);

/// True iff the attack reaches the root. Members must be BAS of the tree.
bool is_successful(const AttackTree& tree, const Attack& attack);

/// True iff removing any single member makes the attack unsuccessful.
/// Requires a successful attack.
bool is_minimal(const AttackTree& tree, const Attack& attack);

/// Oracle: enumerates all 2^|BAS| subsets. Refuses trees with more than
/// kBruteForceMaxBas basic steps.
AttackSuite minimal_attacks_bruteforce(const AttackTree& tree);

/// Bottom-up DNF composition with absorption at every step.
AttackSuite minimal_attacks_dnf(const AttackTree& tree,
                                std::size_t suite_cap = kDefaultSuiteCap);

} // namespace atkit

#endif
