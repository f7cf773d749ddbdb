#include "atkit/synth.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace atkit {

namespace {

struct Refinement {
    std::vector<std::string> requires_all;
    std::vector<std::string> any_of;
};

// Children sorted by explicit order, then by position in the relation list.
Refinement refinement_of(const ScenarioGraph& graph, const std::string& event) {
    struct Child {
        std::string id;
        int order;
        std::size_t position;
    };
    std::vector<Child> all, any;
    const auto& relations = graph.relations();
    for (std::size_t i = 0; i < relations.size(); ++i) {
        const auto& relation = relations[i];
        if (relation.source != event)
            continue;
        Child child{relation.target, relation.order.value_or(0), i};
        if (relation.kind == RelationKind::requires_all)
            all.push_back(child);
        else if (relation.kind == RelationKind::any_of)
            any.push_back(child);
    }
    auto by_order = [](const Child& a, const Child& b) {
        return std::tie(a.order, a.position) < std::tie(b.order, b.position);
    };
    std::sort(all.begin(), all.end(), by_order);
    std::sort(any.begin(), any.end(), by_order);
    Refinement result;
    for (const auto& child : all)
        result.requires_all.push_back(child.id);
    for (const auto& child : any)
        result.any_of.push_back(child.id);
    return result;
}

std::vector<std::string> supporting_entities(const ScenarioGraph& graph,
                                             const std::string& event) {
    std::set<std::string> supporting;
    for (const auto& relation : graph.relations()) {
        switch (relation.kind) {
        case RelationKind::manifests:
        case RelationKind::triggers:
            if (relation.target == event)
                supporting.insert(relation.source);
            break;
        case RelationKind::exploits:
            if (relation.source == event)
                supporting.insert(relation.target);
            if (relation.target == event)
                supporting.insert(relation.source);
            break;
        case RelationKind::hurts:
            if (relation.source == event)
                supporting.insert(relation.target);
            break;
        default:
            break;
        }
    }
    // Pull in bearers of the supporting aspects, then the goals of the
    // supporting objects.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& relation : graph.relations()) {
            if (relation.kind == RelationKind::inheres_in &&
                supporting.count(relation.source) &&
                supporting.insert(relation.target).second)
                changed = true;
            if (relation.kind == RelationKind::has_goal &&
                supporting.count(relation.source) &&
                supporting.insert(relation.target).second)
                changed = true;
        }
    }
    supporting.erase(event);
    return {supporting.begin(), supporting.end()};
}

} // namespace

SynthesisResult synthesize_at(const ScenarioGraph& graph,
                              const std::string& root_event_type) {
    auto diagnostics = validate_scenario(graph);
    if (!diagnostics.empty()) {
        std::string summary;
        for (const auto& diagnostic : diagnostics)
            summary += (summary.empty() ? "" : "; ") + diagnostic.rule + " " + diagnostic.subject;
        throw AtError(errc::validation_failed, summary);
    }
    if (!graph.contains(root_event_type))
        throw AtError(errc::unknown_entity, "'" + root_event_type + "'");
    if (!is_event_type(graph.entity(root_event_type).kind))
        throw AtError(errc::not_an_event_type,
                      "'" + root_event_type + "' is a " +
                          entity_kind_name(graph.entity(root_event_type).kind));

    std::vector<AtNode> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    Provenance provenance;
    std::set<std::string> visited;

    std::function<void(const std::string&)> emit = [&](const std::string& event) {
        if (!visited.insert(event).second)
            return;
        const Entity& entity = graph.entity(event);
        Refinement refinement = refinement_of(graph, event);

        NodeKind kind;
        if (refinement.requires_all.empty() && refinement.any_of.empty())
            kind = NodeKind::bas;
        else if (refinement.requires_all.empty())
            kind = NodeKind::or_gate;
        else
            kind = NodeKind::and_gate;

        nodes.push_back(AtNode{event, kind, entity.label, OntoType::event_type});
        provenance[event] = ProvenanceEntry{event, supporting_entities(graph, event)};

        if (kind == NodeKind::bas)
            return;

        for (const auto& child : refinement.requires_all)
            edges.emplace_back(event, child);

        if (!refinement.requires_all.empty() && !refinement.any_of.empty()) {
            // Mixed refinement: gates are homogeneous, so the alternatives
            // get their own OR node under the AND.
            std::string alts_id = event + "_alts";
            while (graph.contains(alts_id) || visited.count(alts_id))
                alts_id += "_";
            visited.insert(alts_id);
            nodes.push_back(
                AtNode{alts_id, NodeKind::or_gate, entity.label + " (alternatives)",
                       OntoType::event_type});
            provenance[alts_id] = provenance[event];
            edges.emplace_back(event, alts_id);
            for (const auto& child : refinement.any_of)
                edges.emplace_back(alts_id, child);
        } else {
            for (const auto& child : refinement.any_of)
                edges.emplace_back(event, child);
        }

        for (const auto& child : refinement.requires_all)
            emit(child);
        for (const auto& child : refinement.any_of)
            emit(child);
    };
    emit(root_event_type);

    return SynthesisResult{AttackTree::build(std::move(nodes), std::move(edges),
                                             root_event_type),
                           std::move(provenance)};
}

AttrMap attach_metrics(const ScenarioGraph& graph, const AttackTree& tree,
                       const Provenance& provenance) {
    AttrMap attrs;
    for (const auto& node : tree.nodes()) {
        if (node.kind != NodeKind::bas)
            continue;
        auto entry = provenance.find(node.id);
        if (entry == provenance.end())
            continue;
        LeafAttributes leaf_attrs;

        // prob: causal likelihood preferred over triggering when both exist.
        std::optional<double> triggering, causal;
        for (const auto& likelihood : graph.likelihoods()) {
            if (likelihood.subject != entry->second.event_type)
                continue;
            if (likelihood.kind == LikelihoodKind::causal && !causal)
                causal = likelihood.value;
            if (likelihood.kind == LikelihoodKind::triggering && !triggering)
                triggering = likelihood.value;
        }
        if (causal)
            leaf_attrs["prob"] = *causal;
        else if (triggering)
            leaf_attrs["prob"] = *triggering;

        // Other keys: numeric attrs of quality values inhering in supporting
        // capabilities and vulnerabilities. First quality wins per key.
        for (const auto& supporting_id : entry->second.supporting) {
            EntityKind kind = graph.entity(supporting_id).kind;
            if (kind != EntityKind::threat_capability && kind != EntityKind::vulnerability)
                continue;
            for (const auto& relation : graph.relations()) {
                if (relation.kind != RelationKind::inheres_in ||
                    relation.target != supporting_id)
                    continue;
                const Entity& quality = graph.entity(relation.source);
                if (quality.kind != EntityKind::quality_value)
                    continue;
                for (const auto& [key, value] : quality.attrs) {
                    if (key == "prob" || !is_known_attribute_key(key))
                        continue;
                    if (const double* number = std::get_if<double>(&value))
                        leaf_attrs.emplace(key, *number);
                }
            }
        }

        if (!leaf_attrs.empty())
            attrs.emplace(node.id, std::move(leaf_attrs));
    }
    return attrs;
}

AnnotationMap synthesis_annotations(const AttackTree& tree, const Provenance& provenance) {
    AnnotationMap annotations;
    for (const auto& node : tree.nodes()) {
        Annotation annotation;
        annotation.ontotype = OntoType::event_type;
        if (auto it = provenance.find(node.id); it != provenance.end())
            annotation.scenario_ref = it->second.event_type;
        annotations.emplace(node.id, std::move(annotation));
    }
    return annotations;
}

TraceResult trace(const ScenarioGraph& graph, const AttackTree& tree,
                  const Provenance& provenance, const NodeId& node) {
    if (!tree.contains(node))
        throw AtError(errc::unknown_node, "'" + node + "'");
    auto it = provenance.find(node);
    if (it == provenance.end())
        throw AtError(errc::unknown_node, "no provenance for node '" + node + "'");
    TraceResult result;
    result.event_type = graph.entity(it->second.event_type);
    for (const auto& id : it->second.supporting)
        result.supporting.push_back(graph.entity(id));
    return result;
}

} // namespace atkit
