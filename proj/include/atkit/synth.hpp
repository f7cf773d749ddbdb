#ifndef ATKIT_SYNTH_HPP
#define ATKIT_SYNTH_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "atkit/core.hpp"
#include "atkit/galileo.hpp"
#include "atkit/scenario.hpp"

namespace atkit {

struct ProvenanceEntry {
    std::string event_type;               // scenario entity the node stands for
    std::vector<std::string> supporting;  // capabilities, vulnerabilities,
                                          // situations, intentions, bearers
};

/// Total over the synthesized tree's nodes; every id resolves in the graph.
using Provenance = std::map<NodeId, ProvenanceEntry>;

struct SynthesisResult {
    AttackTree tree;
    Provenance provenance;
};

/// Derives an attack tree from the scenario graph rooted at an event type.
/// any_of children become an OR gate, requires_all children an AND gate;
/// mixed refinement becomes an AND over the requires_all children plus an
/// "<event>_alts" OR node grouping the alternatives. Event types without
/// refinement become basic attack steps. Shared event types stay shared
/// DAG nodes.
SynthesisResult synthesize_at(const ScenarioGraph& graph,
                              const std::string& root_event_type);

/// Leaf metric values pulled from the graph: prob from likelihood
/// assignments on the BAS's event type (causal preferred over triggering),
/// other keys from numeric attrs of quality values inhering in supporting
/// capabilities and vulnerabilities.
AttrMap attach_metrics(const ScenarioGraph& graph, const AttackTree& tree,
                       const Provenance& provenance);

/// Annotations for the JSON carrier: every node typed as an event type and
/// bound to its provenance entity.
AnnotationMap synthesis_annotations(const AttackTree& tree, const Provenance& provenance);

struct TraceResult {
    Entity event_type;
    std::vector<Entity> supporting;
};

TraceResult trace(const ScenarioGraph& graph, const AttackTree& tree,
                  const Provenance& provenance, const NodeId& node);

} // namespace atkit

#endif
