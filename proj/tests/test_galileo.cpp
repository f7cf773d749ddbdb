#include <doctest.h>

#include <cstdlib>
#include <random>

#include "atkit/galileo.hpp"
#include "testutil.hpp"

using namespace atkit;

TEST_CASE("parse_galileo reads the PIN fixture") {
    GalileoParseResult result = parse_galileo(testutil::read_file(testutil::fixture_path("pin.galileo")));
    CHECK(result.tree.root() == "GetPIN");
    CHECK(result.tree.node_count() == 5);
    CHECK(result.tree.children("GetPIN") == std::vector<NodeId>{"n", "crypto"});
    CHECK(result.tree.node("crypto").kind == NodeKind::and_gate);
    // The Galileo name doubles as the label.
    CHECK(result.tree.node("crypto").label == "crypto");
    CHECK(result.attrs.at("n").at("cost") == 1);
    CHECK(result.attrs.at("p").at("cost") == 1);
}

TEST_CASE("parse_galileo accepts quoted names, comments and CRLF") {
    GalileoParseResult result = parse_galileo(
        "toplevel \"get in\";\r\n"
        "// quoted names may contain spaces\r\n"
        "\"get in\" or door \"back window\";\r\n"
        "door cost=2 prob=0.5;\r\n"
        "\"back window\";\r\n");
    CHECK(result.tree.root() == "get in");
    CHECK(result.tree.children("get in") == std::vector<NodeId>{"door", "back window"});
    CHECK(result.attrs.at("door").at("prob") == 0.5);
}

TEST_CASE("parse_galileo rejects malformed documents with positions") {
    auto expect = [](const std::string& text, errc code, int line, int column) {
        try {
            parse_galileo(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.code() == code);
            CHECK(e.line() == line);
            CHECK(e.column() == column);
        }
    };

    expect("a or b;\n", errc::missing_toplevel, 1, 1);
    expect("toplevel a;\na or b;\nb;\ntoplevel a;\n", errc::duplicate_definition, 4, 1);
    expect("toplevel a;\na or b;\nb;\nb cost=1;\n", errc::duplicate_definition, 4, 1);
    expect("toplevel a;\na or ghost;\n", errc::undefined_child, 2, 6);
    expect("toplevel ghost;\na;\n", errc::undefined_child, 1, 10);
    expect("toplevel a;\na or;\n", errc::syntax_error, 2, 5);
    expect("toplevel a;\na cost 1;\n", errc::syntax_error, 2, 8);
    expect("toplevel a;\na cost=x;\n", errc::syntax_error, 2, 8);
    expect("toplevel a;\na price=1;\n", errc::syntax_error, 2, 3);
    expect("toplevel a;\na prob=1.5;\n", errc::syntax_error, 2, 8);
    expect("toplevel a;\na cost=1 cost=2;\n", errc::duplicate_definition, 2, 10);
    expect("toplevel \"a;\n", errc::syntax_error, 1, 10);
    expect("toplevel a;\na @ b;\n", errc::syntax_error, 2, 3);
}

TEST_CASE("parse_galileo structural failures come from tree validation") {
    try {
        parse_galileo("toplevel a;\na or b;\nb or a;\n");
        FAIL("expected CycleDetected");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::cycle_detected);
    }
    try {
        parse_galileo("toplevel a;\na;\nb;\n");
        FAIL("expected MultipleRoots");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::multiple_roots);
    }
}

TEST_CASE("emit_galileo is deterministic pre-order with canonical attribute order") {
    GalileoParseResult result = parse_galileo(
        "toplevel top;\n"
        "b skill=3 cost=2;\n"
        "top and b a;\n"
        "a prob=0.25 time=4;\n");
    CHECK(emit_galileo(result.tree, result.attrs) ==
          "toplevel top;\n"
          "top and b a;\n"
          "b cost=2 skill=3;\n"
          "a time=4 prob=0.25;\n");
}

TEST_CASE("emit_galileo quotes names that need it") {
    AttackTree tree = build_tree({{"or", NodeKind::or_gate, "", std::nullopt},
                                  {"a b", NodeKind::bas, "", std::nullopt},
                                  {"9lives", NodeKind::bas, "", std::nullopt}},
                                 {{"or", "a b"}, {"or", "9lives"}}, "or");
    std::string text = emit_galileo(tree, {});
    CHECK(text == "toplevel \"or\";\n\"or\" or \"a b\" \"9lives\";\n\"a b\";\n\"9lives\";\n");
    GalileoParseResult again = parse_galileo(text);
    CHECK(again.tree.children("or") == std::vector<NodeId>{"a b", "9lives"});
}

TEST_CASE("emit_galileo rejects attributes on gates") {
    GalileoParseResult pin =
        parse_galileo(testutil::read_file(testutil::fixture_path("pin.galileo")));
    AttrMap bad = pin.attrs;
    bad["crypto"]["cost"] = 1;
    try {
        emit_galileo(pin.tree, bad);
        FAIL("expected AttributeOnGate");
    } catch (const AtError& e) {
        CHECK(e.code() == errc::attribute_on_gate);
    }
}

TEST_CASE("format_decimal renders shortest no-exponent forms") {
    CHECK(format_decimal(0) == "0");
    CHECK(format_decimal(1) == "1");
    CHECK(format_decimal(42) == "42");
    CHECK(format_decimal(0.5) == "0.5");
    CHECK(format_decimal(0.1) == "0.1");
    CHECK(format_decimal(0.25) == "0.25");
    CHECK(format_decimal(1234.5678) == "1234.5678");
    std::string tiny = format_decimal(1e-7);
    CHECK(tiny.find('e') == std::string::npos);
    CHECK(tiny.find('E') == std::string::npos);
    CHECK(std::strtod(tiny.c_str(), nullptr) == 1e-7);
    std::string big = format_decimal(1e20);
    CHECK(big.find('e') == std::string::npos);
    CHECK(std::strtod(big.c_str(), nullptr) == 1e20);
}

TEST_CASE("property: Galileo emit -> parse -> emit is byte-identical") {
    std::mt19937 rng(51);
    for (int round = 0; round < 200; ++round) {
        AttackTree tree = testutil::random_dag(rng).build();
        AttrMap attrs = testutil::random_attrs(rng, tree);
        std::string first = emit_galileo(tree, attrs);
        GalileoParseResult parsed = parse_galileo(first);
        CHECK(emit_galileo(parsed.tree, parsed.attrs) == first);
        CHECK(canonical_hash(parsed.tree, false) == canonical_hash(tree, false));
        CHECK(parsed.attrs == attrs);
    }
}

TEST_CASE("property: mangled Galileo input never crashes") {
    std::mt19937 rng(53);
    std::string base = testutil::read_file(testutil::fixture_path("pin.galileo"));
    const std::string alphabet = "abc \"=;\n\t/.0123456789or_and";
    for (int round = 0; round < 500; ++round) {
        std::string text = base;
        int edits = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int e = 0; e < edits && !text.empty(); ++e) {
            std::size_t at = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
            switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
            case 0:
                text[at] = alphabet[std::uniform_int_distribution<std::size_t>(
                    0, alphabet.size() - 1)(rng)];
                break;
            case 1:
                text.erase(at, 1);
                break;
            default:
                text.insert(at, 1, alphabet[std::uniform_int_distribution<std::size_t>(
                                      0, alphabet.size() - 1)(rng)]);
                break;
            }
        }
        try {
            parse_galileo(text);
        } catch (const AtError&) {
            // Any structured failure is fine; only crashes/hangs are bugs.
        }
    }
}

TEST_CASE("emit_dot shapes nodes and lists every edge") {
    GalileoParseResult pin =
        parse_galileo(testutil::read_file(testutil::fixture_path("pin.galileo")));
    AnnotationMap annotations;
    annotations["GetPIN"] = Annotation{OntoType::goal, std::string("sc1"), std::nullopt};
    std::string dot = emit_dot(pin.tree, &annotations);

    CHECK(dot.rfind("digraph attack_tree {", 0) == 0);
    CHECK(dot.find("\"n\" [shape=box") != std::string::npos);
    CHECK(dot.find("\\nOR\"") != std::string::npos);
    CHECK(dot.find("\\nAND\"") != std::string::npos);
    CHECK(dot.find("tooltip=\"goal <- sc1\"") != std::string::npos);

    std::size_t arrows = 0;
    for (std::size_t at = dot.find("->"); at != std::string::npos; at = dot.find("->", at + 2))
        ++arrows;
    CHECK(arrows == pin.tree.edge_count());
}

TEST_CASE("parse_json reads a well-formed document") {
    std::string text = R"({
      "format_version": 1,
      "root": "top",
      "nodes": [
        {"id": "top", "kind": "or", "label": "Top"},
        {"id": "a", "kind": "bas", "label": "A", "attrs": {"cost": 3, "prob": 0.5}},
        {"id": "b", "kind": "bas", "label": "B"}
      ],
      "edges": [["top", "a"], ["top", "b"]],
      "annotations": {"top": {"ontotype": "goal", "scenario_ref": "sc1"}}
    })";
    JsonDocument doc = parse_json(text);
    CHECK(doc.tree.root() == "top");
    CHECK(doc.tree.node("top").label == "Top");
    CHECK(doc.attrs.at("a").at("prob") == 0.5);
    CHECK(doc.annotations.at("top").ontotype == OntoType::goal);
    CHECK(doc.annotations.at("top").scenario_ref == "sc1");
    // Annotations propagate onto the node itself.
    CHECK(doc.tree.node("top").annotation == OntoType::goal);
}

TEST_CASE("parse_json reports schema violations with JSON-pointer paths") {
    auto expect = [](const std::string& text, errc code, const std::string& fragment) {
        try {
            parse_json(text);
            FAIL("expected schema failure");
        } catch (const AtError& e) {
            CHECK(e.code() == code);
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    expect("{nope", errc::syntax_error, "not valid JSON");
    expect(R"({"root": "a", "nodes": [], "edges": []})", errc::schema_violation,
           "/format_version");
    expect(R"({"format_version": 2, "root": "a", "nodes": [], "edges": []})",
           errc::schema_violation, "/format_version");
    expect(R"({"format_version": 1, "root": "a",
               "nodes": [{"id": "a", "kind": "nand"}], "edges": []})",
           errc::schema_violation, "/nodes/0/kind");
    expect(R"({"format_version": 1, "root": "a",
               "nodes": [{"id": "a", "kind": "bas", "attrs": {"price": 1}}], "edges": []})",
           errc::schema_violation, "/nodes/0/attrs/price");
    expect(R"({"format_version": 1, "root": "a",
               "nodes": [{"id": "a", "kind": "bas", "attrs": {"prob": 2}}], "edges": []})",
           errc::schema_violation, "/nodes/0/attrs/prob");
    expect(R"({"format_version": 1, "root": "a",
               "nodes": [{"id": "a", "kind": "bas"}], "edges": [],
               "annotations": {"zz": {"ontotype": "goal"}}})",
           errc::schema_violation, "/annotations/zz");
    expect(R"({"format_version": 1, "root": "a",
               "nodes": [{"id": "a", "kind": "or", "attrs": {"cost": 1}},
                         {"id": "b", "kind": "bas"}],
               "edges": [["a", "b"]]})",
           errc::attribute_on_gate, "/nodes/0/attrs");
}

TEST_CASE("property: JSON emit -> parse -> emit is byte-identical") {
    std::mt19937 rng(59);
    for (int round = 0; round < 200; ++round) {
        AttackTree tree = testutil::random_dag(rng).build();
        AttrMap attrs = testutil::random_attrs(rng, tree);
        AnnotationMap annotations;
        for (const auto& node : tree.nodes())
            if (std::uniform_int_distribution<int>(0, 2)(rng) == 0)
                annotations[node.id] = Annotation{
                    node.kind == NodeKind::bas ? OntoType::event_type : OntoType::goal,
                    std::nullopt, std::string("note ") + node.id};
        std::string first = emit_json(tree, attrs, annotations);
        JsonDocument parsed = parse_json(first);
        CHECK(emit_json(parsed.tree, parsed.attrs, parsed.annotations) == first);
        CHECK(canonical_hash(parsed.tree, true) == canonical_hash(tree, true));
        CHECK(parsed.attrs == attrs);
        CHECK(parsed.annotations == annotations);
    }
}
