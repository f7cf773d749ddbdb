#include <doctest.h>

#include <algorithm>
#include <random>

#include "atkit/semantics.hpp"
#include "testutil.hpp"

using namespace atkit;

namespace {

AttackTree pin_tree() {
    return build_tree(
        {
            {"GetPIN", NodeKind::or_gate, "Get PIN", std::nullopt},
            {"n", NodeKind::bas, "pilfer notebook", std::nullopt},
            {"crypto", NodeKind::and_gate, "cryptoattack", std::nullopt},
            {"t", NodeKind::bas, "intercept transactions", std::nullopt},
            {"p", NodeKind::bas, "use weak plain RSA", std::nullopt},
        },
        {{"GetPIN", "n"}, {"GetPIN", "crypto"}, {"crypto", "t"}, {"crypto", "p"}},
        "GetPIN");
}

AttackTree shared_bas_dag() {
    return build_tree(
        {
            {"root", NodeKind::or_gate, "", std::nullopt},
            {"g1", NodeKind::and_gate, "", std::nullopt},
            {"g2", NodeKind::and_gate, "", std::nullopt},
            {"s", NodeKind::bas, "", std::nullopt},
            {"x", NodeKind::bas, "", std::nullopt},
            {"y", NodeKind::bas, "", std::nullopt},
        },
        {{"root", "g1"}, {"root", "g2"}, {"g1", "s"}, {"g1", "x"}, {"g2", "s"}, {"g2", "y"}},
        "root");
}

} // namespace

TEST_CASE("structure_function on the PIN tree") {
    AttackTree tree = pin_tree();
    CHECK(structure_function(tree, "GetPIN", {"n"}));
    CHECK_FALSE(structure_function(tree, "GetPIN", {"t"}));
    CHECK(structure_function(tree, "crypto", {"t", "p"}));
    CHECK_FALSE(structure_function(tree, "crypto", {"t"}));
    CHECK_THROWS_AS((void)structure_function(tree, "ghost", {}), AtError);
}

TEST_CASE("structure_function on a lone BAS with the empty attack") {
    AttackTree tree = build_tree({{"b", NodeKind::bas, "", std::nullopt}}, {}, "b");
    CHECK_FALSE(structure_function(tree, "b", {}));
}

TEST_CASE("is_successful") {
    AttackTree tree = pin_tree();
    CHECK(is_successful(tree, {"t", "p"}));
    CHECK(is_successful(tree, {"n", "t", "p"}));
    CHECK_FALSE(is_successful(tree, {}));
    try {
        is_successful(tree, {"crypto"});
        FAIL("expected UnknownBas");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::unknown_bas);
    }
}

TEST_CASE("is_minimal") {
    AttackTree tree = pin_tree();
    CHECK(is_minimal(tree, {"t", "p"}));
    CHECK(is_minimal(tree, {"n"}));
    CHECK_FALSE(is_minimal(tree, {"n", "t", "p"}));
    try {
        is_minimal(tree, {"t"});
        FAIL("expected NotSuccessful");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::not_successful);
    }

    AttackTree one = build_tree({{"b", NodeKind::bas, "", std::nullopt}}, {}, "b");
    CHECK(is_minimal(one, {"b"}));
}

TEST_CASE("minimal_attacks_bruteforce on fixed trees") {
    CHECK(minimal_attacks_bruteforce(pin_tree()).attacks ==
          std::vector<Attack>{{"n"}, {"t", "p"}});

    AttackTree one = build_tree({{"b", NodeKind::bas, "", std::nullopt}}, {}, "b");
    CHECK(minimal_attacks_bruteforce(one).attacks == std::vector<Attack>{{"b"}});

    AttackTree conj = build_tree({{"g", NodeKind::and_gate, "", std::nullopt},
                                  {"a", NodeKind::bas, "", std::nullopt},
                                  {"b", NodeKind::bas, "", std::nullopt}},
                                 {{"g", "a"}, {"g", "b"}}, "g");
    CHECK(minimal_attacks_bruteforce(conj).attacks == std::vector<Attack>{{"a", "b"}});
}

TEST_CASE("minimal_attacks_bruteforce refuses oversized trees") {
    std::vector<AtNode> nodes = {{"g", NodeKind::or_gate, "", std::nullopt}};
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int i = 0; i < 21; ++i) {
        std::string id = "b" + std::to_string(i);
        nodes.push_back({id, NodeKind::bas, "", std::nullopt});
        edges.emplace_back("g", id);
    }
    AttackTree tree = build_tree(nodes, edges, "g");
    try {
        minimal_attacks_bruteforce(tree);
        FAIL("expected TooLarge");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::too_large);
    }
}

TEST_CASE("minimal_attacks_dnf applies absorption") {
    // OR of (AND a b) and (AND a b c) collapses to {{a,b}}.
    AttackTree tree = build_tree(
        {
            {"root", NodeKind::or_gate, "", std::nullopt},
            {"g1", NodeKind::and_gate, "", std::nullopt},
            {"g2", NodeKind::and_gate, "", std::nullopt},
            {"a", NodeKind::bas, "", std::nullopt},
            {"b", NodeKind::bas, "", std::nullopt},
            {"c", NodeKind::bas, "", std::nullopt},
        },
        {{"root", "g1"}, {"root", "g2"}, {"g1", "a"}, {"g1", "b"},
         {"g2", "a"}, {"g2", "b"}, {"g2", "c"}},
        "root");
    CHECK(minimal_attacks_dnf(tree).attacks == std::vector<Attack>{{"a", "b"}});
}

TEST_CASE("minimal_attacks_dnf handles shared BAS") {
    CHECK(minimal_attacks_dnf(shared_bas_dag()).attacks ==
          std::vector<Attack>{{"s", "x"}, {"s", "y"}});
    // Matches the exhaustive oracle over all 8 subsets.
    CHECK(minimal_attacks_dnf(shared_bas_dag()) ==
          minimal_attacks_bruteforce(shared_bas_dag()));
}

TEST_CASE("minimal_attacks_dnf enforces the suite cap") {
    // 2x2x2 AND of ORs yields 8 cut sets; cap of 4 must trip.
    std::vector<AtNode> nodes = {{"root", NodeKind::and_gate, "", std::nullopt}};
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int g = 0; g < 3; ++g) {
        std::string gate = "g" + std::to_string(g);
        nodes.push_back({gate, NodeKind::or_gate, "", std::nullopt});
        edges.emplace_back("root", gate);
        for (int b = 0; b < 2; ++b) {
            std::string bas = gate + "b" + std::to_string(b);
            nodes.push_back({bas, NodeKind::bas, "", std::nullopt});
            edges.emplace_back(gate, bas);
        }
    }
    AttackTree tree = build_tree(nodes, edges, "root");
    try {
        minimal_attacks_dnf(tree, 4);
        FAIL("expected ResourceLimit");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::resource_limit);
    }
}

TEST_CASE("property: dnf equals brute force on random DAGs") {
    std::mt19937 rng(7);
    for (int round = 0; round < 200; ++round) {
        AttackTree tree = testutil::random_dag(rng, 12).build();
        CHECK(minimal_attacks_dnf(tree) == minimal_attacks_bruteforce(tree));
    }
}

TEST_CASE("property: monotonicity of is_successful") {
    std::mt19937 rng(11);
    for (int round = 0; round < 200; ++round) {
        AttackTree tree = testutil::random_dag(rng).build();
        std::vector<NodeId> bas = tree.basic_steps();
        Attack small, big;
        for (const auto& id : bas) {
            int draw = std::uniform_int_distribution<int>(0, 2)(rng);
            if (draw == 0)
                small.insert(id);
            if (draw <= 1)
                big.insert(id);
        }
        big.insert(small.begin(), small.end());
        if (is_successful(tree, small))
            CHECK(is_successful(tree, big));
    }
}

TEST_CASE("property: suites are antichains of minimal successful attacks") {
    std::mt19937 rng(13);
    for (int round = 0; round < 100; ++round) {
        AttackTree tree = testutil::random_dag(rng).build();
        AttackSuite suite = minimal_attacks_dnf(tree);
        for (std::size_t i = 0; i < suite.attacks.size(); ++i) {
            CHECK(is_successful(tree, suite.attacks[i]));
            CHECK(is_minimal(tree, suite.attacks[i]));
            for (std::size_t j = 0; j < suite.attacks.size(); ++j) {
                if (i == j)
                    continue;
                CHECK_FALSE(std::includes(suite.attacks[j].begin(), suite.attacks[j].end(),
                                          suite.attacks[i].begin(), suite.attacks[i].end()));
            }
        }
    }
}

TEST_CASE("property: boolean_formula agrees with structure_function") {
    std::mt19937 rng(17);
    for (int round = 0; round < 100; ++round) {
        AttackTree tree = testutil::random_dag(rng).build();
        BooleanExpr formula = boolean_formula(tree);
        Attack attack;
        for (const auto& id : tree.basic_steps())
            if (std::uniform_int_distribution<int>(0, 1)(rng) == 0)
                attack.insert(id);
        std::vector<NodeId> true_vars(attack.begin(), attack.end());
        CHECK(evaluate(formula, true_vars) == structure_function(tree, tree.root(), attack));
    }
}
