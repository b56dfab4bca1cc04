#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace genplan::pddl {

using PredicateId = std::uint32_t;
using ObjectId = std::uint32_t;
using TypeId = std::uint32_t;

inline constexpr TypeId kObjectType = 0;

/// Base predicates come from the domain file. Goal predicates are the
/// generated p_G copies of base predicates. Type predicates are static unary
/// predicates generated for declared types so that object types are visible
/// in the state. Derived predicates come from a side file.
enum class PredicateKind : std::uint8_t { Base = 0, Goal = 1, Type = 2, Derived = 3 };

struct PredicateSchema {
    std::string name;
    std::uint32_t arity = 0;
    PredicateKind kind = PredicateKind::Base;
    std::vector<TypeId> parameter_types;
    /// Base <-> goal pairing; for type predicates, the type they encode.
    std::optional<std::uint32_t> partner;

    bool is_goal_marker() const { return kind == PredicateKind::Goal; }
    bool is_derived() const { return kind == PredicateKind::Derived; }
    bool operator==(const PredicateSchema&) const = default;
};

/// A term is either a schema variable (index into the parameter list) or a
/// domain constant (index into DomainModel::constants).
struct Term {
    bool is_variable = true;
    std::uint32_t index = 0;
    bool operator==(const Term&) const = default;
};

struct AtomTemplate {
    PredicateId predicate = 0;
    std::vector<Term> args;
    bool operator==(const AtomTemplate&) const = default;
};

struct TypedName {
    std::string name;
    TypeId type = kObjectType;
    bool operator==(const TypedName&) const = default;
};

struct ActionSchema {
    std::string name;
    std::vector<TypedName> parameters;
    std::vector<AtomTemplate> preconditions;
    std::vector<AtomTemplate> add_effects;
    std::vector<AtomTemplate> delete_effects;
    bool operator==(const ActionSchema&) const = default;
};

struct TypeDef {
    std::string name;
    TypeId parent = kObjectType;
    bool operator==(const TypeDef&) const = default;
};

/// head(x1..xn) := exists z. body1 and body2 ...
/// Variables 0..n-1 are the head parameters, variable n (when present) is the
/// existential one.
struct DerivedPredicateDef {
    PredicateId head = 0;
    std::vector<std::string> head_variables;
    std::optional<std::string> existential;
    std::vector<AtomTemplate> body;

    std::size_t variable_count() const { return head_variables.size() + (existential ? 1 : 0); }
    bool operator==(const DerivedPredicateDef&) const = default;
};

struct DomainModel {
    std::string name;
    std::vector<std::string> requirements;
    bool typed = false;
    std::vector<TypeDef> types{TypeDef{"object", kObjectType}};
    std::vector<TypedName> constants;
    std::vector<PredicateSchema> predicates;
    std::vector<ActionSchema> schemas;
    std::vector<DerivedPredicateDef> derived_defs;

    std::optional<PredicateId> find_predicate(std::string_view n) const {
        for (std::size_t i = 0; i < predicates.size(); ++i)
            if (predicates[i].name == n)
                return static_cast<PredicateId>(i);
        return std::nullopt;
    }

    std::optional<TypeId> find_type(std::string_view n) const {
        for (std::size_t i = 0; i < types.size(); ++i)
            if (types[i].name == n)
                return static_cast<TypeId>(i);
        return std::nullopt;
    }

    bool is_subtype(TypeId sub, TypeId super) const {
        for (TypeId t = sub;; t = types[t].parent) {
            if (t == super)
                return true;
            if (t == kObjectType)
                return false;
        }
    }

    std::size_t count(PredicateKind kind) const {
        std::size_t n = 0;
        for (const auto& p : predicates)
            n += p.kind == kind;
        return n;
    }

    std::size_t base_predicate_count() const { return count(PredicateKind::Base); }

    bool operator==(const DomainModel&) const = default;
};

struct GroundAtom {
    PredicateId predicate = 0;
    std::vector<ObjectId> args;

    /// Canonical total order: predicate id, then argument ids.
    auto operator<=>(const GroundAtom&) const = default;
};

struct InstanceModel {
    std::string name;
    std::string domain_name;
    /// Domain constants come first, followed by the declared objects.
    std::vector<TypedName> objects;
    std::vector<GroundAtom> init;
    std::vector<GroundAtom> goal;

    std::optional<ObjectId> find_object(std::string_view n) const {
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (objects[i].name == n)
                return static_cast<ObjectId>(i);
        return std::nullopt;
    }
};

inline std::string goal_predicate_name(const std::string& base) { return base + "_G"; }
inline std::string type_predicate_name(const std::string& type) { return "Type_" + type; }

} // namespace genplan::pddl
