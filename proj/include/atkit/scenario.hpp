#ifndef ATKIT_SCENARIO_HPP
#define ATKIT_SCENARIO_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atkit/errors.hpp"

namespace atkit {

enum class EntityKind {
    risk_subject,
    threat_object,
    object_at_risk,
    intention,
    threat_capability,
    vulnerability,
    quality_value,
    threat_event_type,
    loss_event_type,
    threatening_situation_type,
};

const char* entity_kind_name(EntityKind kind) noexcept;
std::optional<EntityKind> entity_kind_from_name(const std::string& name) noexcept;

bool is_event_type(EntityKind kind) noexcept;
/// Aspects inhere in a single bearer: intentions, capabilities,
/// vulnerabilities, quality values.
bool is_aspect(EntityKind kind) noexcept;
/// Kinds that may carry a likelihood assignment (types, never individuals).
bool is_likelihood_subject(EntityKind kind) noexcept;

using AttrValue = std::variant<double, std::string>;

struct Entity {
    std::string id;
    EntityKind kind = EntityKind::threat_event_type;
    std::string label;
    std::map<std::string, AttrValue> attrs;
};

enum class RelationKind {
    inheres_in,
    has_goal,
    hurts,
    manifests,
    participates_in,
    exploits,
    requires_all,
    any_of,
    triggers,
};

const char* relation_kind_name(RelationKind kind) noexcept;
std::optional<RelationKind> relation_kind_from_name(const std::string& name) noexcept;

struct Relation {
    RelationKind kind = RelationKind::inheres_in;
    std::string source;
    std::string target;
    std::optional<int> order;
    std::optional<std::string> reading;  // "parthood" | "causal_pattern"
};

enum class LikelihoodKind { triggering, causal };

struct LikelihoodAssignment {
    LikelihoodKind kind = LikelihoodKind::triggering;
    std::string subject;
    double value = 0.0;  // probability in [0,1]
};

struct ScenarioDiagnostic {
    std::string rule;     // V1..V4
    std::string subject;  // offending entity id
    std::string message;
};

/// Immutable after load; relation endpoints always resolve.
class ScenarioGraph {
public:
    ScenarioGraph() = default;
    ScenarioGraph(std::vector<Entity> entities, std::vector<Relation> relations,
                  std::vector<LikelihoodAssignment> likelihoods);

    const std::vector<Entity>& entities() const { return entities_; }
    const std::vector<Relation>& relations() const { return relations_; }
    const std::vector<LikelihoodAssignment>& likelihoods() const { return likelihoods_; }

    bool contains(const std::string& id) const { return index_.count(id) != 0; }
    const Entity& entity(const std::string& id) const;

private:
    std::vector<Entity> entities_;
    std::vector<Relation> relations_;
    std::vector<LikelihoodAssignment> likelihoods_;
    std::map<std::string, std::size_t> index_;
};

ScenarioGraph load_scenario(std::string_view json_text);

std::string emit_scenario(const ScenarioGraph& graph);

/// Ontological well-formedness rules V1-V4; diagnostics, never failures.
std::vector<ScenarioDiagnostic> validate_scenario(const ScenarioGraph& graph);

/// Closure of the root under requires_all/any_of, plus entities linked to
/// those event types by manifests/exploits/triggers/hurts and their bearers.
ScenarioGraph refinement_subgraph(const ScenarioGraph& graph,
                                  const std::string& root_event_type);

} // namespace atkit

#endif
