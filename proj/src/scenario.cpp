#include "atkit/scenario.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

namespace atkit {

const char* entity_kind_name(EntityKind kind) noexcept {
    switch (kind) {
    case EntityKind::risk_subject: return "risk_subject";
    case EntityKind::threat_object: return "threat_object";
    case EntityKind::object_at_risk: return "object_at_risk";
    case EntityKind::intention: return "intention";
    case EntityKind::threat_capability: return "threat_capability";
    case EntityKind::vulnerability: return "vulnerability";
    case EntityKind::quality_value: return "quality_value";
    case EntityKind::threat_event_type: return "threat_event_type";
    case EntityKind::loss_event_type: return "loss_event_type";
    case EntityKind::threatening_situation_type: return "threatening_situation_type";
    }
    return "?";
}

std::optional<EntityKind> entity_kind_from_name(const std::string& name) noexcept {
    static const std::map<std::string, EntityKind> names = {
        {"risk_subject", EntityKind::risk_subject},
        {"threat_object", EntityKind::threat_object},
        {"object_at_risk", EntityKind::object_at_risk},
        {"intention", EntityKind::intention},
        {"threat_capability", EntityKind::threat_capability},
        {"vulnerability", EntityKind::vulnerability},
        {"quality_value", EntityKind::quality_value},
        {"threat_event_type", EntityKind::threat_event_type},
        {"loss_event_type", EntityKind::loss_event_type},
        {"threatening_situation_type", EntityKind::threatening_situation_type},
    };
    auto it = names.find(name);
    if (it == names.end())
        return std::nullopt;
    return it->second;
}

bool is_event_type(EntityKind kind) noexcept {
    return kind == EntityKind::threat_event_type || kind == EntityKind::loss_event_type;
}

bool is_aspect(EntityKind kind) noexcept {
    return kind == EntityKind::intention || kind == EntityKind::threat_capability ||
           kind == EntityKind::vulnerability || kind == EntityKind::quality_value;
}

bool is_likelihood_subject(EntityKind kind) noexcept {
    return is_event_type(kind) || kind == EntityKind::threatening_situation_type;
}

const char* relation_kind_name(RelationKind kind) noexcept {
    switch (kind) {
    case RelationKind::inheres_in: return "inheres_in";
    case RelationKind::has_goal: return "has_goal";
    case RelationKind::hurts: return "hurts";
    case RelationKind::manifests: return "manifests";
    case RelationKind::participates_in: return "participates_in";
    case RelationKind::exploits: return "exploits";
    case RelationKind::requires_all: return "requires_all";
    case RelationKind::any_of: return "any_of";
    case RelationKind::triggers: return "triggers";
    }
    return "?";
}

std::optional<RelationKind> relation_kind_from_name(const std::string& name) noexcept {
    static const std::map<std::string, RelationKind> names = {
        {"inheres_in", RelationKind::inheres_in},
        {"has_goal", RelationKind::has_goal},
        {"hurts", RelationKind::hurts},
        {"manifests", RelationKind::manifests},
        {"participates_in", RelationKind::participates_in},
        {"exploits", RelationKind::exploits},
        {"requires_all", RelationKind::requires_all},
        {"any_of", RelationKind::any_of},
        {"triggers", RelationKind::triggers},
    };
    auto it = names.find(name);
    if (it == names.end())
        return std::nullopt;
    return it->second;
}

ScenarioGraph::ScenarioGraph(std::vector<Entity> entities, std::vector<Relation> relations,
                             std::vector<LikelihoodAssignment> likelihoods)
    : entities_(std::move(entities)), relations_(std::move(relations)),
      likelihoods_(std::move(likelihoods)) {
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        const auto& entity = entities_[i];
        if (entity.id.empty())
            throw AtError(errc::schema_violation, "entity with empty id");
        if (entity.label.empty())
            throw AtError(errc::schema_violation,
                          "entity '" + entity.id + "' has an empty label");
        if (!index_.emplace(entity.id, i).second)
            throw AtError(errc::duplicate_id, "entity id '" + entity.id + "' defined twice");
    }
    for (const auto& relation : relations_) {
        if (!contains(relation.source) || !contains(relation.target))
            throw AtError(errc::dangling_reference,
                          std::string(relation_kind_name(relation.kind)) + " relation " +
                              relation.source + " -> " + relation.target +
                              " references a missing entity");
        // Endpoint-kind constraints that make a relation meaningless rather
        // than merely suspect; softer rules live in validate_scenario.
        EntityKind source_kind = entity(relation.source).kind;
        EntityKind target_kind = entity(relation.target).kind;
        switch (relation.kind) {
        case RelationKind::inheres_in:
            if (!is_aspect(source_kind))
                throw AtError(errc::schema_violation,
                              "inheres_in source '" + relation.source + "' is not an aspect");
            break;
        case RelationKind::has_goal:
            if (source_kind != EntityKind::risk_subject &&
                source_kind != EntityKind::threat_object)
                throw AtError(errc::schema_violation,
                              "has_goal source '" + relation.source +
                                  "' is not a risk subject or threat object");
            if (target_kind != EntityKind::intention)
                throw AtError(errc::schema_violation,
                              "has_goal target '" + relation.target + "' is not an intention");
            break;
        case RelationKind::hurts:
            if (!is_event_type(source_kind))
                throw AtError(errc::schema_violation,
                              "hurts source '" + relation.source + "' is not an event type");
            if (target_kind != EntityKind::intention)
                throw AtError(errc::schema_violation,
                              "hurts target '" + relation.target + "' is not an intention");
            break;
        case RelationKind::requires_all:
        case RelationKind::any_of:
            if (!is_event_type(source_kind) || !is_event_type(target_kind))
                throw AtError(errc::schema_violation,
                              std::string(relation_kind_name(relation.kind)) + " relation " +
                                  relation.source + " -> " + relation.target +
                                  " must connect event types");
            break;
        case RelationKind::triggers:
            if (source_kind != EntityKind::threatening_situation_type)
                throw AtError(errc::schema_violation,
                              "triggers source '" + relation.source +
                                  "' is not a threatening situation type");
            if (!is_event_type(target_kind))
                throw AtError(errc::schema_violation,
                              "triggers target '" + relation.target + "' is not an event type");
            break;
        default:
            break;
        }
    }
    for (const auto& likelihood : likelihoods_) {
        if (!contains(likelihood.subject))
            throw AtError(errc::dangling_reference,
                          "likelihood subject '" + likelihood.subject + "' is missing");
        if (!(likelihood.value >= 0.0 && likelihood.value <= 1.0))
            throw AtError(errc::schema_violation,
                          "likelihood on '" + likelihood.subject + "' must be in [0,1]");
    }
}

const Entity& ScenarioGraph::entity(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw AtError(errc::unknown_entity, "'" + id + "'");
    return entities_[it->second];
}

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

std::string require_string(const json& obj, const std::string& path, const std::string& key) {
    const json& value = require_field(obj, path, key);
    if (!value.is_string())
        schema_fail(path + "/" + key, "expected string");
    return value.get<std::string>();
}

} // namespace

ScenarioGraph load_scenario(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded())
        throw AtError(errc::syntax_error, "not valid JSON");
    if (!doc.is_object())
        schema_fail("", "expected a JSON object");

    const json& version = require_field(doc, "", "format_version");
    if (!version.is_number_integer() || version.get<int>() != 1)
        schema_fail("/format_version", "expected integer 1");

    const json& jentities = require_field(doc, "", "entities");
    if (!jentities.is_array())
        schema_fail("/entities", "expected array");
    std::vector<Entity> entities;
    for (std::size_t i = 0; i < jentities.size(); ++i) {
        const std::string path = "/entities/" + std::to_string(i);
        const json& jentity = jentities[i];
        if (!jentity.is_object())
            schema_fail(path, "expected object");
        Entity entity;
        entity.id = require_string(jentity, path, "id");
        auto kind = entity_kind_from_name(require_string(jentity, path, "kind"));
        if (!kind)
            schema_fail(path + "/kind", "unknown entity kind");
        entity.kind = *kind;
        entity.label = require_string(jentity, path, "label");
        if (auto it = jentity.find("attrs"); it != jentity.end()) {
            if (!it->is_object())
                schema_fail(path + "/attrs", "expected object");
            for (const auto& [key, value] : it->items()) {
                if (value.is_number())
                    entity.attrs.emplace(key, value.get<double>());
                else if (value.is_string())
                    entity.attrs.emplace(key, value.get<std::string>());
                else
                    schema_fail(path + "/attrs/" + key, "expected number or string");
            }
        }
        entities.push_back(std::move(entity));
    }

    const json& jrelations = require_field(doc, "", "relations");
    if (!jrelations.is_array())
        schema_fail("/relations", "expected array");
    std::vector<Relation> relations;
    for (std::size_t i = 0; i < jrelations.size(); ++i) {
        const std::string path = "/relations/" + std::to_string(i);
        const json& jrelation = jrelations[i];
        if (!jrelation.is_object())
            schema_fail(path, "expected object");
        Relation relation;
        auto kind = relation_kind_from_name(require_string(jrelation, path, "kind"));
        if (!kind)
            schema_fail(path + "/kind", "unknown relation kind");
        relation.kind = *kind;
        relation.source = require_string(jrelation, path, "source");
        relation.target = require_string(jrelation, path, "target");
        if (auto it = jrelation.find("order"); it != jrelation.end()) {
            if (!it->is_number_integer())
                schema_fail(path + "/order", "expected integer");
            relation.order = it->get<int>();
        }
        if (auto it = jrelation.find("reading"); it != jrelation.end()) {
            if (!it->is_string())
                schema_fail(path + "/reading", "expected string");
            std::string reading = it->get<std::string>();
            if (reading != "parthood" && reading != "causal_pattern")
                schema_fail(path + "/reading",
                            "expected \"parthood\" or \"causal_pattern\"");
            relation.reading = std::move(reading);
        }
        relations.push_back(std::move(relation));
    }

    std::vector<LikelihoodAssignment> likelihoods;
    if (auto it = doc.find("likelihoods"); it != doc.end()) {
        if (!it->is_array())
            schema_fail("/likelihoods", "expected array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "/likelihoods/" + std::to_string(i);
            const json& jlik = (*it)[i];
            if (!jlik.is_object())
                schema_fail(path, "expected object");
            LikelihoodAssignment likelihood;
            std::string kind = require_string(jlik, path, "kind");
            if (kind == "triggering")
                likelihood.kind = LikelihoodKind::triggering;
            else if (kind == "causal")
                likelihood.kind = LikelihoodKind::causal;
            else
                schema_fail(path + "/kind", "expected \"triggering\" or \"causal\"");
            likelihood.subject = require_string(jlik, path, "subject");
            const json& value = require_field(jlik, path, "value");
            if (!value.is_number())
                schema_fail(path + "/value", "expected number");
            likelihood.value = value.get<double>();
            likelihoods.push_back(std::move(likelihood));
        }
    }

    return ScenarioGraph(std::move(entities), std::move(relations), std::move(likelihoods));
}

std::string emit_scenario(const ScenarioGraph& graph) {
    json doc;
    doc["format_version"] = 1;
    json jentities = json::array();
    for (const auto& entity : graph.entities()) {
        json jentity;
        jentity["id"] = entity.id;
        jentity["kind"] = entity_kind_name(entity.kind);
        jentity["label"] = entity.label;
        if (!entity.attrs.empty()) {
            json jattrs;
            for (const auto& [key, value] : entity.attrs) {
                if (std::holds_alternative<double>(value))
                    jattrs[key] = std::get<double>(value);
                else
                    jattrs[key] = std::get<std::string>(value);
            }
            jentity["attrs"] = std::move(jattrs);
        }
        jentities.push_back(std::move(jentity));
    }
    doc["entities"] = std::move(jentities);
    json jrelations = json::array();
    for (const auto& relation : graph.relations()) {
        json jrelation;
        jrelation["kind"] = relation_kind_name(relation.kind);
        jrelation["source"] = relation.source;
        jrelation["target"] = relation.target;
        if (relation.order)
            jrelation["order"] = *relation.order;
        if (relation.reading)
            jrelation["reading"] = *relation.reading;
        jrelations.push_back(std::move(jrelation));
    }
    doc["relations"] = std::move(jrelations);
    json jlikelihoods = json::array();
    for (const auto& likelihood : graph.likelihoods()) {
        json jlik;
        jlik["kind"] = likelihood.kind == LikelihoodKind::triggering ? "triggering" : "causal";
        jlik["subject"] = likelihood.subject;
        jlik["value"] = likelihood.value;
        jlikelihoods.push_back(std::move(jlik));
    }
    doc["likelihoods"] = std::move(jlikelihoods);
    return doc.dump(2) + "\n";
}

std::vector<ScenarioDiagnostic> validate_scenario(const ScenarioGraph& graph) {
    std::vector<ScenarioDiagnostic> diagnostics;

    // V1: each aspect inheres in exactly one bearer.
    for (const auto& entity : graph.entities()) {
        if (!is_aspect(entity.kind))
            continue;
        std::size_t bearers = 0;
        for (const auto& relation : graph.relations())
            if (relation.kind == RelationKind::inheres_in && relation.source == entity.id)
                ++bearers;
        if (bearers != 1)
            diagnostics.push_back({"V1", entity.id,
                                   "aspect '" + entity.id + "' has " +
                                       std::to_string(bearers) +
                                       " bearers; each aspect inheres in exactly one"});
    }

    // V2: likelihoods attach to type kinds only.
    for (const auto& likelihood : graph.likelihoods()) {
        EntityKind kind = graph.entity(likelihood.subject).kind;
        if (!is_likelihood_subject(kind))
            diagnostics.push_back({"V2", likelihood.subject,
                                   "likelihood assigned to '" + likelihood.subject + "' (" +
                                       entity_kind_name(kind) +
                                       "); likelihoods attach only to event and situation types"});
    }

    // V3: every threat/loss event type must, directly or via a refinement
    // ancestor, hurt an intention of a risk subject.
    std::set<std::string> risk_intentions;
    for (const auto& entity : graph.entities()) {
        if (entity.kind != EntityKind::intention)
            continue;
        for (const auto& relation : graph.relations()) {
            bool borne = relation.kind == RelationKind::inheres_in &&
                         relation.source == entity.id &&
                         graph.entity(relation.target).kind == EntityKind::risk_subject;
            bool goal = relation.kind == RelationKind::has_goal &&
                        relation.target == entity.id &&
                        graph.entity(relation.source).kind == EntityKind::risk_subject;
            if (borne || goal) {
                risk_intentions.insert(entity.id);
                break;
            }
        }
    }
    std::set<std::string> hurting;  // event types with a qualifying hurts edge
    for (const auto& relation : graph.relations())
        if (relation.kind == RelationKind::hurts && risk_intentions.count(relation.target))
            hurting.insert(relation.source);
    // Propagate coverage down the refinement edges (fixpoint).
    std::set<std::string> covered = hurting;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& relation : graph.relations()) {
            if (relation.kind != RelationKind::requires_all &&
                relation.kind != RelationKind::any_of)
                continue;
            if (covered.count(relation.source) && !covered.count(relation.target)) {
                covered.insert(relation.target);
                changed = true;
            }
        }
    }
    for (const auto& entity : graph.entities())
        if (is_event_type(entity.kind) && covered.count(entity.id) == 0)
            diagnostics.push_back({"V3", entity.id,
                                   "event type '" + entity.id +
                                       "' hurts no intention of any risk subject"});

    // V4: refinement subgraph over event types is acyclic.
    std::map<std::string, std::vector<std::string>> refinement;
    for (const auto& relation : graph.relations())
        if (relation.kind == RelationKind::requires_all ||
            relation.kind == RelationKind::any_of)
            refinement[relation.source].push_back(relation.target);
    std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
    std::set<std::string> on_cycle;
    std::function<bool(const std::string&)> dfs = [&](const std::string& id) -> bool {
        color[id] = 1;
        for (const auto& child : refinement[id]) {
            if (color[child] == 1 || (color[child] == 0 && dfs(child))) {
                on_cycle.insert(id);
                return true;
            }
        }
        color[id] = 2;
        return false;
    };
    for (const auto& [id, children] : refinement) {
        (void)children;
        if (color[id] == 0)
            dfs(id);
    }
    for (const auto& id : on_cycle)
        diagnostics.push_back({"V4", id,
                               "event type '" + id + "' lies on a refinement cycle"});

    std::sort(diagnostics.begin(), diagnostics.end(),
              [](const ScenarioDiagnostic& a, const ScenarioDiagnostic& b) {
                  return std::tie(a.rule, a.subject) < std::tie(b.rule, b.subject);
              });
    return diagnostics;
}

ScenarioGraph refinement_subgraph(const ScenarioGraph& graph,
                                  const std::string& root_event_type) {
    if (!graph.contains(root_event_type))
        throw AtError(errc::unknown_entity, "'" + root_event_type + "'");
    if (!is_event_type(graph.entity(root_event_type).kind))
        throw AtError(errc::not_an_event_type,
                      "'" + root_event_type + "' is a " +
                          entity_kind_name(graph.entity(root_event_type).kind));

    // Closure of the root under refinement edges.
    std::set<std::string> events{root_event_type};
    std::vector<std::string> frontier{root_event_type};
    while (!frontier.empty()) {
        std::string current = frontier.back();
        frontier.pop_back();
        for (const auto& relation : graph.relations()) {
            if ((relation.kind == RelationKind::requires_all ||
                 relation.kind == RelationKind::any_of) &&
                relation.source == current && events.insert(relation.target).second)
                frontier.push_back(relation.target);
        }
    }

    // Context: linked entities, then bearers of the linked aspects.
    std::set<std::string> included = events;
    for (const auto& relation : graph.relations()) {
        switch (relation.kind) {
        case RelationKind::manifests:
        case RelationKind::exploits:
        case RelationKind::triggers:
        case RelationKind::hurts:
        case RelationKind::participates_in:
            if (events.count(relation.source))
                included.insert(relation.target);
            if (events.count(relation.target))
                included.insert(relation.source);
            break;
        default:
            break;
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& relation : graph.relations()) {
            if (relation.kind != RelationKind::inheres_in)
                continue;
            if (included.count(relation.source) && included.insert(relation.target).second)
                changed = true;
        }
    }

    std::vector<Entity> entities;
    for (const auto& entity : graph.entities())
        if (included.count(entity.id))
            entities.push_back(entity);
    std::vector<Relation> relations;
    for (const auto& relation : graph.relations())
        if (included.count(relation.source) && included.count(relation.target))
            relations.push_back(relation);
    std::vector<LikelihoodAssignment> likelihoods;
    for (const auto& likelihood : graph.likelihoods())
        if (included.count(likelihood.subject))
            likelihoods.push_back(likelihood);

    return ScenarioGraph(std::move(entities), std::move(relations), std::move(likelihoods));
}

} // namespace atkit
