#ifndef ATKIT_GALILEO_HPP
#define ATKIT_GALILEO_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atkit/core.hpp"

namespace atkit {

/// Leaf attribute keys accepted by the carriers, with their value ranges.
bool is_known_attribute_key(const std::string& key);

/// attribute key -> non-negative decimal (prob additionally in [0,1])
using LeafAttributes = std::map<std::string, double>;

/// node id -> leaf attributes
using AttrMap = std::map<NodeId, LeafAttributes>;

struct Annotation {
    OntoType ontotype = OntoType::unspecified;
    std::optional<std::string> scenario_ref;
    std::optional<std::string> notes;

    bool operator==(const Annotation&) const = default;
};

/// node id -> annotation; lives in the JSON carrier or a sidecar, never in
/// Galileo text.
using AnnotationMap = std::map<NodeId, Annotation>;

struct ParseDiagnostic {
    int line = 0;
    int column = 0;
    std::string message;
};

struct GalileoParseResult {
    AttackTree tree;
    AttrMap attrs;
    std::vector<ParseDiagnostic> diagnostics;
};

/// Parses the extended-Galileo textual format. Grammar:
///   document  := toplevel statement*
///   toplevel  := "toplevel" name ";"
///   statement := name ("or"|"and") name+ ";"        (gate)
///              | name (key "=" decimal)* ";"        (leaf)
///   name      := bare identifier or double-quoted string
/// `//` starts a line comment; LF and CRLF both accepted.
GalileoParseResult parse_galileo(std::string_view text);

/// Deterministic emission: toplevel first, then definitions in depth-first
/// pre-order from the root, children in stored order, each node once.
std::string emit_galileo(const AttackTree& tree, const AttrMap& attrs);

/// Renders a decimal without exponent, shortest form that reparses to the
/// same double.
std::string format_decimal(double value);

std::string emit_dot(const AttackTree& tree, const AnnotationMap* annotations = nullptr);

struct JsonDocument {
    AttackTree tree;
    AttrMap attrs;
    AnnotationMap annotations;
};

JsonDocument parse_json(std::string_view text);

std::string emit_json(const AttackTree& tree, const AttrMap& attrs,
                      const AnnotationMap& annotations);

} // namespace atkit

#endif
