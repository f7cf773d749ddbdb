#ifndef ATKIT_ERRORS_HPP
#define ATKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace atkit {

enum class errc {
    // core / structural
    cycle_detected,
    multiple_roots,
    unreachable_node,
    dangling_edge,
    leaf_with_children,
    empty_gate,
    unknown_node,
    // semantics
    unknown_bas,
    not_successful,
    too_large,
    resource_limit,
    // metrics
    missing_value,
    not_tree_shaped,
    unknown_domain,
    // carriers
    syntax_error,
    duplicate_definition,
    undefined_child,
    missing_toplevel,
    attribute_on_gate,
    schema_violation,
    // scenario / synth
    dangling_reference,
    duplicate_id,
    unknown_entity,
    not_an_event_type,
    validation_failed,
    // diff
    bad_map,
    suite_too_large,
};

const char* errc_name(errc code) noexcept;

/// Base error type for all atkit failures.
class AtError : public std::runtime_error {
public:
    AtError(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Carrier parse failure with a source position (1-based).
class ParseError : public AtError {
public:
    ParseError(errc code, int line, int column, const std::string& message)
        : AtError(code, "line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

} // namespace atkit

#endif
