#include "atkit/galileo.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

namespace atkit {

namespace {

const std::set<std::string> kAttributeKeys = {"cost", "time", "prob",
                                              "damage", "skill", "challenge"};

// Canonical emission order for leaf attributes.
const std::vector<std::string> kAttributeOrder = {"cost", "time", "prob",
                                                  "damage", "skill", "challenge"};

} // namespace

bool is_known_attribute_key(const std::string& key) { return kAttributeKeys.count(key) != 0; }

namespace {

void check_attribute_range(const std::string& key, double value,
                           const std::function<void(const std::string&)>& fail) {
    if (!(value >= 0.0))
        fail("attribute '" + key + "' must be non-negative");
    if (key == "prob" && value > 1.0)
        fail("attribute 'prob' must be in [0,1]");
}

// ---------------------------------------------------------------------------
// Galileo lexer

enum class TokKind { identifier, string, number, equals, semicolon, end };

struct Token {
    TokKind kind = TokKind::end;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_ws_and_comments();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= text_.size()) {
            tok.kind = TokKind::end;
            return tok;
        }
        char c = text_[pos_];
        if (c == ';') {
            advance();
            tok.kind = TokKind::semicolon;
            tok.text = ";";
            return tok;
        }
        if (c == '=') {
            advance();
            tok.kind = TokKind::equals;
            tok.text = "=";
            return tok;
        }
        if (c == '"') {
            advance();
            std::string value;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                char d = text_[pos_];
                if (d == '\\' && pos_ + 1 < text_.size()) {
                    advance();
                    d = text_[pos_];
                    if (d != '"' && d != '\\')
                        throw ParseError(errc::syntax_error, line_, column_,
                                         "unknown escape '\\" + std::string(1, d) + "'");
                }
                if (d == '\n')
                    throw ParseError(errc::syntax_error, tok.line, tok.column,
                                     "unterminated string");
                value.push_back(d);
                advance();
            }
            if (pos_ >= text_.size())
                throw ParseError(errc::syntax_error, tok.line, tok.column,
                                 "unterminated string");
            advance(); // closing quote
            tok.kind = TokKind::string;
            tok.text = std::move(value);
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string value;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                value.push_back(text_[pos_]);
                advance();
            }
            tok.kind = TokKind::number;
            tok.text = std::move(value);
            return tok;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string value;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                value.push_back(text_[pos_]);
                advance();
            }
            tok.kind = TokKind::identifier;
            tok.text = std::move(value);
            return tok;
        }
        throw ParseError(errc::syntax_error, line_, column_,
                         "unexpected character '" + std::string(1, c) + "'");
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

struct Definition {
    NodeKind kind = NodeKind::bas;
    std::vector<Token> children;
    LeafAttributes attrs;
    Token at;
};

bool is_name(const Token& tok) {
    return tok.kind == TokKind::identifier || tok.kind == TokKind::string;
}

double parse_decimal(const Token& tok) {
    char* end = nullptr;
    double value = std::strtod(tok.text.c_str(), &end);
    if (end != tok.text.c_str() + tok.text.size())
        throw ParseError(errc::syntax_error, tok.line, tok.column,
                         "malformed decimal '" + tok.text + "'");
    return value;
}

} // namespace

GalileoParseResult parse_galileo(std::string_view text) {
    Lexer lexer(text);
    Token tok = lexer.next();

    if (tok.kind != TokKind::identifier || tok.text != "toplevel")
        throw ParseError(errc::missing_toplevel, tok.line, tok.column,
                         "document must start with 'toplevel <name>;'");
    Token toplevel = lexer.next();
    if (!is_name(toplevel))
        throw ParseError(errc::syntax_error, toplevel.line, toplevel.column,
                         "expected node name after 'toplevel'");
    tok = lexer.next();
    if (tok.kind != TokKind::semicolon)
        throw ParseError(errc::syntax_error, tok.line, tok.column, "expected ';'");

    std::vector<std::string> order;
    std::map<std::string, Definition> defs;

    for (tok = lexer.next(); tok.kind != TokKind::end; tok = lexer.next()) {
        if (!is_name(tok))
            throw ParseError(errc::syntax_error, tok.line, tok.column,
                             "expected node name or end of document");
        if (tok.text == "toplevel" && tok.kind == TokKind::identifier)
            throw ParseError(errc::duplicate_definition, tok.line, tok.column,
                             "only one 'toplevel' declaration is allowed");
        Definition def;
        def.at = tok;

        Token next = lexer.next();
        if (next.kind == TokKind::identifier && (next.text == "or" || next.text == "and")) {
            def.kind = next.text == "or" ? NodeKind::or_gate : NodeKind::and_gate;
            for (next = lexer.next(); next.kind != TokKind::semicolon; next = lexer.next()) {
                if (!is_name(next))
                    throw ParseError(errc::syntax_error, next.line, next.column,
                                     "expected child name or ';'");
                def.children.push_back(next);
            }
            if (def.children.empty())
                throw ParseError(errc::syntax_error, next.line, next.column,
                                 "gate needs at least one child");
        } else {
            def.kind = NodeKind::bas;
            while (next.kind != TokKind::semicolon) {
                if (next.kind != TokKind::identifier)
                    throw ParseError(errc::syntax_error, next.line, next.column,
                                     "expected attribute key, 'or', 'and', or ';'");
                Token key = next;
                if (!is_known_attribute_key(key.text))
                    throw ParseError(errc::syntax_error, key.line, key.column,
                                     "unknown attribute key '" + key.text + "'");
                next = lexer.next();
                if (next.kind != TokKind::equals)
                    throw ParseError(errc::syntax_error, next.line, next.column,
                                     "expected '=' after attribute key");
                next = lexer.next();
                if (next.kind != TokKind::number)
                    throw ParseError(errc::syntax_error, next.line, next.column,
                                     "expected decimal value");
                double value = parse_decimal(next);
                check_attribute_range(key.text, value, [&](const std::string& msg) {
                    throw ParseError(errc::syntax_error, next.line, next.column, msg);
                });
                if (!def.attrs.emplace(key.text, value).second)
                    throw ParseError(errc::duplicate_definition, key.line, key.column,
                                     "attribute '" + key.text + "' given twice");
                next = lexer.next();
            }
        }

        if (defs.count(tok.text))
            throw ParseError(errc::duplicate_definition, tok.line, tok.column,
                             "node '" + tok.text + "' defined twice");
        order.push_back(tok.text);
        defs.emplace(tok.text, std::move(def));
    }

    if (defs.count(toplevel.text) == 0)
        throw ParseError(errc::undefined_child, toplevel.line, toplevel.column,
                         "toplevel node '" + toplevel.text + "' is never defined");
    for (const auto& name : order)
        for (const auto& child : defs.at(name).children)
            if (defs.count(child.text) == 0)
                throw ParseError(errc::undefined_child, child.line, child.column,
                                 "child '" + child.text + "' is never defined");

    std::vector<AtNode> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    AttrMap attrs;
    for (const auto& name : order) {
        const auto& def = defs.at(name);
        // The Galileo name doubles as the human-readable label.
        nodes.push_back(AtNode{name, def.kind, name, std::nullopt});
        for (const auto& child : def.children)
            edges.emplace_back(name, child.text);
        if (!def.attrs.empty())
            attrs.emplace(name, def.attrs);
    }

    GalileoParseResult result{AttackTree::build(std::move(nodes), std::move(edges),
                                               toplevel.text),
                              std::move(attrs),
                              {}};
    return result;
}

namespace {

bool needs_quoting(const std::string& name) {
    if (name.empty())
        return true;
    if (name == "or" || name == "and" || name == "toplevel")
        return true;
    if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_')
        return true;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return true;
    return false;
}

std::string galileo_name(const std::string& name) {
    if (!needs_quoting(name))
        return name;
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    out += "\"";
    return out;
}

} // namespace

std::string format_decimal(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    std::string shortest(buf, res.ptr);
    if (shortest.find('e') == std::string::npos && shortest.find('E') == std::string::npos)
        return shortest;
    // Shortest form uses an exponent; fall back to the shortest fixed-point
    // rendering that still reparses to the same double.
    for (int precision = 1; precision <= 40; ++precision) {
        char fixed[128];
        std::snprintf(fixed, sizeof(fixed), "%.*f", precision, value);
        if (std::strtod(fixed, nullptr) == value) {
            std::string out = fixed;
            while (out.find('.') != std::string::npos && out.back() == '0')
                out.pop_back();
            if (out.back() == '.')
                out.pop_back();
            if (std::strtod(out.c_str(), nullptr) == value)
                return out;
            return fixed;
        }
    }
    return shortest;
}

std::string emit_galileo(const AttackTree& tree, const AttrMap& attrs) {
    for (const auto& [id, leaf_attrs] : attrs) {
        (void)leaf_attrs;
        if (!tree.contains(id) || tree.node(id).kind != NodeKind::bas)
            throw AtError(errc::attribute_on_gate,
                          "attributes attached to non-leaf node '" + id + "'");
    }

    std::string out = "toplevel " + galileo_name(tree.root()) + ";\n";
    std::set<NodeId> emitted;
    std::function<void(const NodeId&)> emit = [&](const NodeId& id) {
        if (!emitted.insert(id).second)
            return;
        const auto& node = tree.node(id);
        out += galileo_name(id);
        if (node.kind != NodeKind::bas) {
            out += node.kind == NodeKind::or_gate ? " or" : " and";
            for (const auto& child : tree.children(id))
                out += " " + galileo_name(child);
        } else if (auto it = attrs.find(id); it != attrs.end()) {
            for (const auto& key : kAttributeOrder)
                if (auto vit = it->second.find(key); vit != it->second.end())
                    out += " " + key + "=" + format_decimal(vit->second);
        }
        out += ";\n";
        for (const auto& child : tree.children(id))
            emit(child);
    };
    emit(tree.root());
    return out;
}

namespace {

std::string dot_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string emit_dot(const AttackTree& tree, const AnnotationMap* annotations) {
    std::string out = "digraph attack_tree {\n";
    out += "  rankdir=TB;\n";
    for (const auto& node : tree.nodes()) {
        const std::string& label = node.label.empty() ? node.id : node.label;
        out += "  \"" + dot_escape(node.id) + "\" [";
        switch (node.kind) {
        case NodeKind::bas:
            out += "shape=box, label=\"" + dot_escape(label) + "\"";
            break;
        case NodeKind::or_gate:
            out += "shape=ellipse, label=\"" + dot_escape(label) + "\\nOR\"";
            break;
        case NodeKind::and_gate:
            out += "shape=ellipse, label=\"" + dot_escape(label) + "\\nAND\"";
            break;
        }
        if (annotations) {
            if (auto it = annotations->find(node.id); it != annotations->end()) {
                std::string tip = onto_type_name(it->second.ontotype);
                if (it->second.scenario_ref)
                    tip += " <- " + *it->second.scenario_ref;
                out += ", tooltip=\"" + dot_escape(tip) + "\"";
            }
        }
        out += "];\n";
    }
    for (const auto& node : tree.nodes())
        for (const auto& child : tree.children(node.id))
            out += "  \"" + dot_escape(node.id) + "\" -> \"" + dot_escape(child) + "\";\n";
    out += "}\n";
    return out;
}

// ---------------------------------------------------------------------------
// JSON carrier

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& message) {
    throw AtError(errc::schema_violation, path + ": " + message);
}

const json& require_field(const json& obj, const std::string& path, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end())
        schema_fail(path + "/" + key, "missing required field");
    return *it;
}

} // namespace

JsonDocument parse_json(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded())
        throw AtError(errc::syntax_error, "not valid JSON");
    if (!doc.is_object())
        schema_fail("", "expected a JSON object");

    const json& version = require_field(doc, "", "format_version");
    if (!version.is_number_integer() || version.get<int>() != 1)
        schema_fail("/format_version", "expected integer 1");

    const json& root = require_field(doc, "", "root");
    if (!root.is_string())
        schema_fail("/root", "expected string");

    const json& jnodes = require_field(doc, "", "nodes");
    if (!jnodes.is_array())
        schema_fail("/nodes", "expected array");

    std::vector<AtNode> nodes;
    AttrMap attrs;
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const std::string path = "/nodes/" + std::to_string(i);
        const json& jnode = jnodes[i];
        if (!jnode.is_object())
            schema_fail(path, "expected object");
        const json& jid = require_field(jnode, path, "id");
        if (!jid.is_string())
            schema_fail(path + "/id", "expected string");
        const json& jkind = require_field(jnode, path, "kind");
        if (!jkind.is_string())
            schema_fail(path + "/kind", "expected string");
        NodeKind kind;
        std::string kind_text = jkind.get<std::string>();
        if (kind_text == "bas")
            kind = NodeKind::bas;
        else if (kind_text == "and")
            kind = NodeKind::and_gate;
        else if (kind_text == "or")
            kind = NodeKind::or_gate;
        else
            schema_fail(path + "/kind", "expected one of \"bas\", \"and\", \"or\"");

        AtNode node{jid.get<std::string>(), kind, "", std::nullopt};
        if (auto it = jnode.find("label"); it != jnode.end()) {
            if (!it->is_string())
                schema_fail(path + "/label", "expected string");
            node.label = it->get<std::string>();
        }
        if (auto it = jnode.find("attrs"); it != jnode.end()) {
            if (!it->is_object())
                schema_fail(path + "/attrs", "expected object");
            if (!it->empty() && kind != NodeKind::bas)
                throw AtError(errc::attribute_on_gate,
                              path + "/attrs: attributes on gate '" + node.id + "'");
            LeafAttributes leaf_attrs;
            for (const auto& [key, value] : it->items()) {
                if (!is_known_attribute_key(key))
                    schema_fail(path + "/attrs/" + key, "unknown attribute key");
                if (!value.is_number())
                    schema_fail(path + "/attrs/" + key, "expected number");
                double v = value.get<double>();
                check_attribute_range(key, v, [&](const std::string& msg) {
                    schema_fail(path + "/attrs/" + key, msg);
                });
                leaf_attrs.emplace(key, v);
            }
            if (!leaf_attrs.empty())
                attrs.emplace(node.id, std::move(leaf_attrs));
        }
        nodes.push_back(std::move(node));
    }

    const json& jedges = require_field(doc, "", "edges");
    if (!jedges.is_array())
        schema_fail("/edges", "expected array");
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const std::string path = "/edges/" + std::to_string(i);
        const json& jedge = jedges[i];
        if (!jedge.is_array() || jedge.size() != 2 || !jedge[0].is_string() ||
            !jedge[1].is_string())
            schema_fail(path, "expected [parent, child] string pair");
        edges.emplace_back(jedge[0].get<std::string>(), jedge[1].get<std::string>());
    }

    AnnotationMap annotations;
    std::set<std::string> node_ids;
    for (const auto& node : nodes)
        node_ids.insert(node.id);
    if (auto it = doc.find("annotations"); it != doc.end()) {
        if (!it->is_object())
            schema_fail("/annotations", "expected object");
        for (const auto& [key, value] : it->items()) {
            const std::string path = "/annotations/" + key;
            if (node_ids.count(key) == 0)
                schema_fail(path, "annotation for unknown node");
            if (!value.is_object())
                schema_fail(path, "expected object");
            Annotation ann;
            if (auto ot = value.find("ontotype"); ot != value.end()) {
                if (!ot->is_string())
                    schema_fail(path + "/ontotype", "expected string");
                auto parsed = onto_type_from_name(ot->get<std::string>());
                if (!parsed)
                    schema_fail(path + "/ontotype", "unknown ontotype");
                ann.ontotype = *parsed;
            }
            if (auto sr = value.find("scenario_ref"); sr != value.end()) {
                if (!sr->is_string())
                    schema_fail(path + "/scenario_ref", "expected string");
                ann.scenario_ref = sr->get<std::string>();
            }
            if (auto notes = value.find("notes"); notes != value.end()) {
                if (!notes->is_string())
                    schema_fail(path + "/notes", "expected string");
                ann.notes = notes->get<std::string>();
            }
            annotations.emplace(key, std::move(ann));
        }
    }

    for (auto& node : nodes)
        if (auto it = annotations.find(node.id); it != annotations.end())
            node.annotation = it->second.ontotype;

    return JsonDocument{AttackTree::build(std::move(nodes), std::move(edges),
                                          root.get<std::string>()),
                        std::move(attrs), std::move(annotations)};
}

std::string emit_json(const AttackTree& tree, const AttrMap& attrs,
                      const AnnotationMap& annotations) {
    for (const auto& [id, ann] : annotations) {
        (void)ann;
        if (!tree.contains(id))
            throw AtError(errc::schema_violation,
                          "/annotations/" + id + ": annotation for unknown node");
    }

    json doc;
    doc["format_version"] = 1;
    doc["root"] = tree.root();
    json jnodes = json::array();
    for (const auto& node : tree.nodes()) {
        json jnode;
        jnode["id"] = node.id;
        jnode["kind"] = node_kind_name(node.kind);
        jnode["label"] = node.label;
        if (auto it = attrs.find(node.id); it != attrs.end() && !it->second.empty()) {
            json jattrs;
            for (const auto& key : kAttributeOrder)
                if (auto vit = it->second.find(key); vit != it->second.end())
                    jattrs[key] = vit->second;
            jnode["attrs"] = std::move(jattrs);
        }
        jnodes.push_back(std::move(jnode));
    }
    doc["nodes"] = std::move(jnodes);
    json jedges = json::array();
    for (const auto& node : tree.nodes())
        for (const auto& child : tree.children(node.id))
            jedges.push_back(json::array({node.id, child}));
    doc["edges"] = std::move(jedges);
    json janns = json::object();
    for (const auto& [id, ann] : annotations) {
        json jann;
        jann["ontotype"] = onto_type_name(ann.ontotype);
        if (ann.scenario_ref)
            jann["scenario_ref"] = *ann.scenario_ref;
        if (ann.notes)
            jann["notes"] = *ann.notes;
        janns[id] = std::move(jann);
    }
    doc["annotations"] = std::move(janns);
    return doc.dump(2) + "\n";
}

} // namespace atkit
