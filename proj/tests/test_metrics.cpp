#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "atkit/metrics.hpp"
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

} // namespace

TEST_CASE("builtin_domain table") {
    AttributeDomain cost = builtin_domain("min_cost");
    CHECK(cost.or_op(3, 5) == 3);
    CHECK(cost.and_op(3, 5) == 8);
    CHECK(cost.or_neutral == std::numeric_limits<double>::infinity());
    CHECK(cost.and_neutral == 0.0);
    CHECK(cost.attribute_key == "cost");

    AttributeDomain prob = builtin_domain("max_prob");
    CHECK(prob.or_op(0.2, 0.5) == 0.5);
    CHECK(prob.and_op(0.5, 0.5) == 0.25);
    CHECK(prob.or_neutral == 0.0);
    CHECK(prob.and_neutral == 1.0);

    CHECK(builtin_domain("min_skill").and_op(3, 5) == 5);
    CHECK(builtin_domain("max_challenge").and_op(3, 5) == 3);
    CHECK(builtin_domain("min_time").and_op(3, 5) == 5);
    CHECK(builtin_domain("min_time_seq").and_op(3, 5) == 8);
    CHECK(builtin_domain("max_damage").and_op(3, 5) == 8);

    try {
        builtin_domain("unknown");
        FAIL("expected UnknownDomain");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::unknown_domain);
    }
}

TEST_CASE("metric_via_attacks on the PIN tree") {
    AttackTree tree = pin_tree();

    MetricResult cost = metric_via_attacks(tree, builtin_domain("min_cost"),
                                           {{"n", 5}, {"t", 1}, {"p", 1}});
    CHECK(cost.value == 2);
    CHECK(cost.witness == Attack{"t", "p"});
    CHECK(cost.method == "via_attacks");

    MetricResult prob = metric_via_attacks(tree, builtin_domain("max_prob"),
                                           {{"n", 0.1}, {"t", 0.5}, {"p", 0.5}});
    CHECK(prob.value == 0.25);
    CHECK(prob.witness == Attack{"t", "p"});

    AttackTree one = build_tree({{"b", NodeKind::bas, "", std::nullopt}}, {}, "b");
    MetricResult single = metric_via_attacks(one, builtin_domain("min_cost"), {{"b", 7}});
    CHECK(single.value == 7);
    CHECK(single.witness == Attack{"b"});
}

TEST_CASE("metric_bottom_up on the PIN tree") {
    AttackTree tree = pin_tree();

    MetricResult cost =
        metric_bottom_up(tree, builtin_domain("min_cost"), {{"n", 5}, {"t", 1}, {"p", 1}});
    CHECK(cost.value == 2);
    CHECK(cost.witness == Attack{"t", "p"});
    CHECK(cost.method == "bottom_up");

    MetricResult prob = metric_bottom_up(tree, builtin_domain("max_prob"),
                                         {{"n", 0.9}, {"t", 0.5}, {"p", 0.5}});
    CHECK(prob.value == 0.9);
    CHECK(prob.witness == Attack{"n"});

    AttackTree conj = build_tree({{"g", NodeKind::and_gate, "", std::nullopt},
                                  {"a", NodeKind::bas, "", std::nullopt},
                                  {"b", NodeKind::bas, "", std::nullopt}},
                                 {{"g", "a"}, {"g", "b"}}, "g");
    CHECK(metric_bottom_up(conj, builtin_domain("min_skill"), {{"a", 3}, {"b", 5}}).value == 5);
}

TEST_CASE("metric_bottom_up rejects DAGs, metric dispatches") {
    AttackTree dag = build_tree(
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
    ValueMap values = {{"s", 1}, {"x", 2}, {"y", 3}};

    try {
        metric_bottom_up(dag, builtin_domain("min_cost"), values);
        FAIL("expected NotTreeShaped");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::not_tree_shaped);
    }

    CHECK(metric(dag, builtin_domain("min_cost"), values).method == "via_attacks");
    CHECK(metric(dag, builtin_domain("min_cost"), values).value == 3);
    CHECK(metric(pin_tree(), builtin_domain("min_cost"), {{"n", 5}, {"t", 1}, {"p", 1}}).method ==
          "bottom_up");
}

TEST_CASE("missing values are reported by BAS name") {
    try {
        metric(pin_tree(), builtin_domain("min_cost"), {{"n", 5}});
        FAIL("expected MissingValue");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::missing_value);
        CHECK(std::string(e.what()).find("'p'") != std::string::npos);
    }
}

TEST_CASE("property: bottom-up equals via-attacks on random shaped trees") {
    std::mt19937 rng(23);
    const std::vector<std::string> exact_domains = {"min_cost", "min_time", "max_damage",
                                                    "min_skill", "max_challenge"};
    for (int round = 0; round < 200; ++round) {
        AttackTree tree = testutil::random_tree(rng).build();
        ValueMap values = testutil::random_values(rng, tree, false);
        for (const auto& name : exact_domains) {
            AttributeDomain domain = builtin_domain(name);
            MetricResult a = metric_bottom_up(tree, domain, values);
            MetricResult b = metric_via_attacks(tree, domain, values);
            CHECK(a.value == b.value);
        }
        ValueMap probs = testutil::random_values(rng, tree, true);
        AttributeDomain prob_domain = builtin_domain("max_prob");
        MetricResult a = metric_bottom_up(tree, prob_domain, probs);
        MetricResult b = metric_via_attacks(tree, prob_domain, probs);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
    }
}

TEST_CASE("property: witnesses reproduce the reported value") {
    std::mt19937 rng(29);
    for (int round = 0; round < 100; ++round) {
        AttackTree tree = testutil::random_dag(rng).build();
        for (const auto& name : {"min_cost", "max_prob", "min_skill"}) {
            AttributeDomain domain = builtin_domain(name);
            ValueMap values =
                testutil::random_values(rng, tree, std::string(name) == "max_prob");
            MetricResult result = metric(tree, domain, values);
            REQUIRE(result.witness.has_value());
            double folded = domain.and_neutral;
            for (const auto& member : *result.witness)
                folded = domain.and_op(folded, values.at(member));
            if (std::string(name) == "max_prob")
                CHECK(folded == doctest::Approx(result.value).epsilon(1e-12));
            else
                CHECK(folded == result.value);
        }
    }
}

TEST_CASE("property: semiring laws hold on sampled operands") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> sample(0.0, 8.0);
    for (const auto& name : builtin_domain_names()) {
        AttributeDomain domain = builtin_domain(name);
        bool prob = name == "max_prob";
        for (int round = 0; round < 1000; ++round) {
            double a = prob ? sample(rng) / 8.0 : sample(rng);
            double b = prob ? sample(rng) / 8.0 : sample(rng);
            double c = prob ? sample(rng) / 8.0 : sample(rng);
            CHECK(domain.or_op(a, b) == domain.or_op(b, a));
            CHECK(domain.and_op(a, b) == domain.and_op(b, a));
            CHECK(domain.or_op(a, domain.or_op(b, c)) ==
                  doctest::Approx(domain.or_op(domain.or_op(a, b), c)).epsilon(1e-12));
            CHECK(domain.and_op(a, domain.and_op(b, c)) ==
                  doctest::Approx(domain.and_op(domain.and_op(a, b), c)).epsilon(1e-12));
            CHECK(domain.or_op(domain.or_neutral, a) == a);
            CHECK(domain.and_op(domain.and_neutral, a) == a);
        }
    }
}

TEST_CASE("property: folding over all successful attacks equals minimal-only for min_cost") {
    std::mt19937 rng(37);
    AttributeDomain domain = builtin_domain("min_cost");
    for (int round = 0; round < 50; ++round) {
        AttackTree tree = testutil::random_dag(rng, 8).build();
        ValueMap values = testutil::random_values(rng, tree, false);
        std::vector<NodeId> bas = tree.basic_steps();

        double over_all = domain.or_neutral;
        for (std::size_t mask = 0; mask < (std::size_t{1} << bas.size()); ++mask) {
            Attack attack;
            for (std::size_t i = 0; i < bas.size(); ++i)
                if (mask & (std::size_t{1} << i))
                    attack.insert(bas[i]);
            if (!is_successful(tree, attack))
                continue;
            double folded = domain.and_neutral;
            for (const auto& member : attack)
                folded = domain.and_op(folded, values.at(member));
            over_all = domain.or_op(over_all, folded);
        }
        CHECK(over_all == metric_via_attacks(tree, domain, values).value);
    }
}
