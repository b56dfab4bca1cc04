#pragma once

#include "genplan/error.hpp"
#include "genplan/pddl/model.hpp"
#include "genplan/pddl/sexpr.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace genplan::pddl {

namespace detail {

inline const std::vector<std::string_view>& supported_requirements() {
    static const std::vector<std::string_view> reqs{":strips", ":typing"};
    return reqs;
}

inline bool is_variable(const SExpr& e) { return e.is_token() && !e.token.empty() && e.token.front() == '?'; }

inline const SExpr& expect_list(const SExpr& e, std::string_view what) {
    if (!e.is_list)
        throw Error(ErrorCode::SyntaxError, "expected a list for " + std::string(what), e.where);
    return e;
}

inline const std::string& expect_token(const SExpr& e, std::string_view what) {
    if (!e.is_token() || e.token.empty())
        throw Error(ErrorCode::SyntaxError, "expected a name for " + std::string(what), e.where);
    return e.token;
}

/// Features outside the STRIPS + typing subset are rejected by keyword.
inline void reject_unsupported_keyword(const SExpr& e) {
    static const std::vector<std::string_view> unsupported{
        "not", "or", "imply", "exists", "forall", "when", "=", "increase", "decrease",
        "assign", "scale-up", "scale-down", "either", "preference"};
    if (e.is_list && !e.items.empty() && e.items.front().is_token()) {
        const auto& head = e.items.front().token;
        for (auto kw : unsupported) {
            if (head == kw)
                throw Error(ErrorCode::UnsupportedFeature, "'" + head + "' is outside the STRIPS+typing subset",
                            e.where);
        }
    }
}

struct TypedEntry {
    std::string name;
    std::string type;
    SourceLocation where;
};

/// Parses "a b - t c - u d" style lists. Untyped names get type "object".
inline std::vector<TypedEntry> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin) {
    std::vector<TypedEntry> out;
    std::size_t pending = 0;
    for (std::size_t i = begin; i < items.size(); ++i) {
        const auto& item = items[i];
        if (item.is_list) {
            if (item.head_is("either"))
                throw Error(ErrorCode::UnsupportedFeature, "'either' types are outside the supported subset",
                            item.where);
            throw Error(ErrorCode::SyntaxError, "unexpected list in typed list", item.where);
        }
        if (item.token == "-") {
            if (i + 1 >= items.size())
                throw Error(ErrorCode::SyntaxError, "missing type after '-'", item.where);
            const auto& t = items[i + 1];
            if (t.is_list && t.head_is("either"))
                throw Error(ErrorCode::UnsupportedFeature, "'either' types are outside the supported subset",
                            t.where);
            const auto& type = expect_token(t, "type");
            for (std::size_t k = out.size() - pending; k < out.size(); ++k)
                out[k].type = type;
            pending = 0;
            ++i;
            continue;
        }
        out.push_back({item.token, "object", item.where});
        ++pending;
    }
    return out;
}

class DomainParser {
public:
    DomainModel parse(std::string_view text) {
        auto top = read_sexprs(text);
        if (top.size() != 1)
            throw Error(ErrorCode::SyntaxError, "expected exactly one (define ...) form",
                        top.empty() ? SourceLocation{1, 1} : top[1].where);
        const auto& def = top.front();
        if (!def.head_is("define") || def.size() < 2 || !def[1].head_is("domain") || def[1].size() != 2)
            throw Error(ErrorCode::SyntaxError, "expected (define (domain NAME) ...)", def.where);
        model_.name = expect_token(def[1][1], "domain name");

        // Types first, so later sections can resolve them regardless of order.
        for (std::size_t i = 2; i < def.size(); ++i)
            if (def[i].head_is(":types"))
                parse_types(def[i]);
        for (std::size_t i = 2; i < def.size(); ++i) {
            const auto& sec = expect_list(def[i], "domain section");
            if (sec.items.empty() || !sec[0].is_token())
                throw Error(ErrorCode::SyntaxError, "malformed domain section", sec.where);
            const auto& key = sec[0].token;
            if (key == ":requirements")
                parse_requirements(sec);
            else if (key == ":types")
                continue;
            else if (key == ":constants")
                parse_constants(sec);
            else if (key == ":predicates")
                parse_predicates(sec);
            else if (key == ":action")
                actions_.push_back(&sec);
            else if (key == ":functions" || key == ":derived" || key == ":durative-action" ||
                     key == ":constraints")
                throw Error(ErrorCode::UnsupportedFeature, "section " + key + " is not supported", sec.where);
            else
                throw Error(ErrorCode::SyntaxError, "unknown domain section " + key, sec.where);
        }
        for (const auto* a : actions_)
            parse_action(*a);
        add_generated_predicates(model_);
        return std::move(model_);
    }

    /// Appends type predicates and one goal predicate per base predicate.
    static void add_generated_predicates(DomainModel& m) {
        const std::size_t base_count = m.predicates.size();
        if (m.typed) {
            for (TypeId t = 1; t < m.types.size(); ++t) {
                PredicateSchema p;
                p.name = type_predicate_name(m.types[t].name);
                p.arity = 1;
                p.kind = PredicateKind::Type;
                p.parameter_types = {kObjectType};
                p.partner = t;
                m.predicates.push_back(std::move(p));
            }
        }
        for (std::size_t i = 0; i < base_count; ++i) {
            PredicateSchema g = m.predicates[i];
            g.name = goal_predicate_name(m.predicates[i].name);
            g.kind = PredicateKind::Goal;
            g.partner = static_cast<std::uint32_t>(i);
            m.predicates[i].partner = static_cast<std::uint32_t>(m.predicates.size());
            m.predicates.push_back(std::move(g));
        }
    }

private:
    void parse_requirements(const SExpr& sec) {
        for (std::size_t i = 1; i < sec.size(); ++i) {
            const auto& r = expect_token(sec[i], "requirement");
            const auto& ok = supported_requirements();
            if (std::find(ok.begin(), ok.end(), r) == ok.end())
                throw Error(ErrorCode::UnsupportedFeature, "requirement " + r + " is not supported", sec[i].where);
            model_.requirements.push_back(r);
            if (r == ":typing")
                model_.typed = true;
        }
    }

    TypeId resolve_type(const std::string& name, SourceLocation where) const {
        if (auto t = model_.find_type(name))
            return *t;
        throw Error(ErrorCode::UnknownType, "undeclared type " + name, where);
    }

    void parse_types(const SExpr& sec) {
        model_.typed = true;
        auto entries = parse_typed_list(sec.items, 1);
        for (const auto& e : entries) {
            if (e.name == "object")
                continue;
            if (model_.find_type(e.name))
                throw Error(ErrorCode::DuplicateName, "type " + e.name + " declared twice", e.where);
            model_.types.push_back({e.name, kObjectType});
        }
        // Parents may be declared after their children, or only used as parents.
        for (const auto& e : entries) {
            if (e.type == "object" || e.name == "object")
                continue;
            if (!model_.find_type(e.type))
                model_.types.push_back({e.type, kObjectType});
        }
        for (const auto& e : entries) {
            if (e.name == "object")
                continue;
            model_.types[*model_.find_type(e.name)].parent = *model_.find_type(e.type);
        }
        for (TypeId t = 1; t < model_.types.size(); ++t) {
            std::size_t steps = 0;
            for (TypeId u = t; u != kObjectType; u = model_.types[u].parent)
                if (++steps > model_.types.size())
                    throw Error(ErrorCode::SyntaxError, "cyclic type hierarchy at " + model_.types[t].name, sec.where);
        }
    }

    void parse_constants(const SExpr& sec) {
        for (const auto& e : parse_typed_list(sec.items, 1)) {
            for (const auto& c : model_.constants)
                if (c.name == e.name)
                    throw Error(ErrorCode::DuplicateName, "constant " + e.name + " declared twice", e.where);
            model_.constants.push_back({e.name, resolve_type(e.type, e.where)});
        }
    }

    void parse_predicates(const SExpr& sec) {
        for (std::size_t i = 1; i < sec.size(); ++i) {
            const auto& p = expect_list(sec[i], "predicate declaration");
            if (p.items.empty())
                throw Error(ErrorCode::SyntaxError, "empty predicate declaration", p.where);
            PredicateSchema schema;
            schema.name = expect_token(p[0], "predicate name");
            if (model_.find_predicate(schema.name))
                throw Error(ErrorCode::DuplicateName, "predicate " + schema.name + " declared twice", p.where);
            for (const auto& e : parse_typed_list(p.items, 1)) {
                if (e.name.empty() || e.name.front() != '?')
                    throw Error(ErrorCode::SyntaxError, "predicate parameters must be variables", e.where);
                schema.parameter_types.push_back(resolve_type(e.type, e.where));
            }
            schema.arity = static_cast<std::uint32_t>(schema.parameter_types.size());
            model_.predicates.push_back(std::move(schema));
        }
    }

    AtomTemplate parse_atom(const SExpr& e, const std::vector<TypedName>& params) const {
        reject_unsupported_keyword(e);
        if (!e.is_list || e.items.empty())
            throw Error(ErrorCode::SyntaxError, "expected an atom", e.where);
        const auto& name = expect_token(e[0], "predicate");
        auto pid = model_.find_predicate(name);
        if (!pid)
            throw Error(ErrorCode::UnknownPredicate, "undeclared predicate " + name, e.where);
        if (model_.predicates[*pid].arity != e.size() - 1)
            throw Error(ErrorCode::ArityMismatch,
                        name + " expects " + std::to_string(model_.predicates[*pid].arity) + " arguments, got " +
                            std::to_string(e.size() - 1),
                        e.where);
        AtomTemplate atom;
        atom.predicate = *pid;
        for (std::size_t i = 1; i < e.size(); ++i) {
            const auto& arg = expect_token(e[i], "argument");
            if (is_variable(e[i])) {
                auto it = std::find_if(params.begin(), params.end(), [&](const auto& p) { return p.name == arg; });
                if (it == params.end())
                    throw Error(ErrorCode::SyntaxError, "variable " + arg + " is not a parameter", e[i].where);
                atom.args.push_back({true, static_cast<std::uint32_t>(it - params.begin())});
            } else {
                auto it = std::find_if(model_.constants.begin(), model_.constants.end(),
                                       [&](const auto& c) { return c.name == arg; });
                if (it == model_.constants.end())
                    throw Error(ErrorCode::UnknownObject, "undeclared constant " + arg, e[i].where);
                atom.args.push_back({false, static_cast<std::uint32_t>(it - model_.constants.begin())});
            }
        }
        return atom;
    }

    void parse_precondition(const SExpr& e, ActionSchema& a) const {
        if (e.head_is("and")) {
            for (std::size_t i = 1; i < e.size(); ++i)
                parse_precondition(e[i], a);
            return;
        }
        if (e.is_list && e.items.empty())
            return;
        a.preconditions.push_back(parse_atom(e, a.parameters));
    }

    void parse_effect(const SExpr& e, ActionSchema& a) const {
        if (e.head_is("and")) {
            for (std::size_t i = 1; i < e.size(); ++i)
                parse_effect(e[i], a);
            return;
        }
        if (e.is_list && e.items.empty())
            return;
        if (e.head_is("not")) {
            if (e.size() != 2)
                throw Error(ErrorCode::SyntaxError, "(not ...) takes exactly one atom", e.where);
            a.delete_effects.push_back(parse_atom(e[1], a.parameters));
            return;
        }
        a.add_effects.push_back(parse_atom(e, a.parameters));
    }

    void parse_action(const SExpr& sec) {
        ActionSchema a;
        if (sec.size() < 2)
            throw Error(ErrorCode::SyntaxError, "action without a name", sec.where);
        a.name = expect_token(sec[1], "action name");
        for (const auto& other : model_.schemas)
            if (other.name == a.name)
                throw Error(ErrorCode::DuplicateName, "action " + a.name + " declared twice", sec.where);
        const SExpr* pre = nullptr;
        const SExpr* eff = nullptr;
        for (std::size_t i = 2; i < sec.size(); i += 2) {
            const auto& key = expect_token(sec[i], "action field");
            if (i + 1 >= sec.size())
                throw Error(ErrorCode::SyntaxError, "missing value for " + key, sec[i].where);
            const auto& value = sec[i + 1];
            if (key == ":parameters") {
                for (const auto& e : parse_typed_list(expect_list(value, ":parameters").items, 0)) {
                    if (e.name.empty() || e.name.front() != '?')
                        throw Error(ErrorCode::SyntaxError, "parameters must be variables", e.where);
                    a.parameters.push_back({e.name, resolve_type(e.type, e.where)});
                }
            } else if (key == ":precondition") {
                pre = &value;
            } else if (key == ":effect") {
                eff = &value;
            } else {
                throw Error(ErrorCode::UnsupportedFeature, "action field " + key + " is not supported", sec[i].where);
            }
        }
        if (pre)
            parse_precondition(*pre, a);
        if (eff)
            parse_effect(*eff, a);
        model_.schemas.push_back(std::move(a));
    }

    DomainModel model_;
    std::vector<const SExpr*> actions_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

/// Parses a domain in the STRIPS + typing subset. Goal predicates (and type
/// predicates for typed domains) are generated and appended after the base
/// predicates.
inline DomainModel parse_domain(std::string_view text) { return detail::DomainParser{}.parse(text); }

inline DomainModel parse_domain_file(const std::string& path) { return parse_domain(detail::read_file(path)); }

inline InstanceModel parse_instance(std::string_view text, const DomainModel& domain) {
    using namespace detail;
    auto top = read_sexprs(text);
    if (top.size() != 1)
        throw Error(ErrorCode::SyntaxError, "expected exactly one (define ...) form",
                    top.empty() ? SourceLocation{1, 1} : top[1].where);
    const auto& def = top.front();
    if (!def.head_is("define") || def.size() < 2 || !def[1].head_is("problem") || def[1].size() != 2)
        throw Error(ErrorCode::SyntaxError, "expected (define (problem NAME) ...)", def.where);

    InstanceModel inst;
    inst.name = expect_token(def[1][1], "problem name");
    inst.objects = domain.constants;

    auto resolve_atom = [&](const SExpr& e) {
        reject_unsupported_keyword(e);
        if (!e.is_list || e.items.empty())
            throw Error(ErrorCode::SyntaxError, "expected a ground atom", e.where);
        const auto& name = expect_token(e[0], "predicate");
        auto pid = domain.find_predicate(name);
        if (!pid || domain.predicates[*pid].kind != PredicateKind::Base)
            throw Error(ErrorCode::UnknownPredicate, "undeclared predicate " + name, e.where);
        const auto& schema = domain.predicates[*pid];
        if (schema.arity != e.size() - 1)
            throw Error(ErrorCode::ArityMismatch,
                        name + " expects " + std::to_string(schema.arity) + " arguments, got " +
                            std::to_string(e.size() - 1),
                        e.where);
        GroundAtom atom;
        atom.predicate = *pid;
        for (std::size_t i = 1; i < e.size(); ++i) {
            const auto& obj = expect_token(e[i], "object");
            auto oid = inst.find_object(obj);
            if (!oid)
                throw Error(ErrorCode::UnknownObject, "undeclared object " + obj, e[i].where);
            if (!domain.is_subtype(inst.objects[*oid].type, schema.parameter_types[i - 1]))
                throw Error(ErrorCode::UnknownType, "object " + obj + " has the wrong type for " + name, e[i].where);
            atom.args.push_back(*oid);
        }
        return atom;
    };

    const SExpr* init = nullptr;
    const SExpr* goal = nullptr;
    for (std::size_t i = 2; i < def.size(); ++i) {
        const auto& sec = expect_list(def[i], "problem section");
        if (sec.items.empty() || !sec[0].is_token())
            throw Error(ErrorCode::SyntaxError, "malformed problem section", sec.where);
        const auto& key = sec[0].token;
        if (key == ":domain") {
            if (sec.size() != 2)
                throw Error(ErrorCode::SyntaxError, "expected (:domain NAME)", sec.where);
            inst.domain_name = expect_token(sec[1], "domain name");
        } else if (key == ":requirements") {
            for (std::size_t r = 1; r < sec.size(); ++r) {
                const auto& ok = supported_requirements();
                if (std::find(ok.begin(), ok.end(), sec[r].token) == ok.end())
                    throw Error(ErrorCode::UnsupportedFeature, "requirement " + sec[r].token + " is not supported",
                                sec[r].where);
            }
        } else if (key == ":objects") {
            for (const auto& e : parse_typed_list(sec.items, 1)) {
                if (inst.find_object(e.name))
                    throw Error(ErrorCode::DuplicateName, "object " + e.name + " declared twice", e.where);
                auto t = domain.find_type(e.type);
                if (!t)
                    throw Error(ErrorCode::UnknownType, "undeclared type " + e.type, e.where);
                inst.objects.push_back({e.name, *t});
            }
        } else if (key == ":init") {
            init = &sec;
        } else if (key == ":goal") {
            goal = &sec;
        } else {
            throw Error(ErrorCode::UnsupportedFeature, "section " + key + " is not supported", sec.where);
        }
    }
    if (!inst.domain_name.empty() && inst.domain_name != domain.name)
        throw Error(ErrorCode::InvalidArgument,
                    "instance is for domain " + inst.domain_name + ", not " + domain.name, def.where);
    if (init)
        for (std::size_t i = 1; i < init->size(); ++i)
            inst.init.push_back(resolve_atom((*init)[i]));
    if (goal) {
        if (goal->size() > 2)
            throw Error(ErrorCode::SyntaxError, "(:goal ...) takes one formula", goal->where);
        if (goal->size() == 2) {
            const auto& g = (*goal)[1];
            if (g.head_is("and")) {
                for (std::size_t i = 1; i < g.size(); ++i)
                    inst.goal.push_back(resolve_atom(g[i]));
            } else if (!(g.is_list && g.items.empty())) {
                inst.goal.push_back(resolve_atom(g));
            }
        }
    }
    if (inst.goal.empty())
        throw Error(ErrorCode::EmptyGoal, "instance " + inst.name + " has an empty goal",
                    goal ? goal->where : def.where);
    std::sort(inst.init.begin(), inst.init.end());
    inst.init.erase(std::unique(inst.init.begin(), inst.init.end()), inst.init.end());
    std::sort(inst.goal.begin(), inst.goal.end());
    inst.goal.erase(std::unique(inst.goal.begin(), inst.goal.end()), inst.goal.end());
    return inst;
}

inline InstanceModel parse_instance_file(const std::string& path, const DomainModel& domain) {
    return parse_instance(detail::read_file(path), domain);
}

/// Parses a derived-predicate side file and registers the definitions (and
/// their head predicates) on the domain. Grammar:
///
///   file     := def*
///   def      := "(:derived" head body ")"
///   head     := "(" name variable* ")"
///   body     := conj | "(exists (" variable ")" conj ")"
///   conj     := atom | "(and" atom+ ")"
///
/// Body atoms may use base, type and goal predicates but not derived ones.
namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

} // namespace detail

inline void add_derived_predicates(DomainModel& domain, std::string_view text) {
    using namespace detail;
    auto top = read_sexprs(text);
    struct Pending {
        const SExpr* def;
        PredicateId head;
    };
    std::vector<Pending> pending;
    for (const auto& def : top) {
        if (!def.head_is(":derived") || def.size() != 3)
            throw Error(ErrorCode::SyntaxError, "expected (:derived (head ...) body)", def.where);
        const auto& head = expect_list(def[1], "derived head");
        if (head.items.empty())
            throw Error(ErrorCode::SyntaxError, "empty derived head", head.where);
        PredicateSchema schema;
        schema.name = expect_token(head[0], "derived predicate name");
        schema.kind = PredicateKind::Derived;
        if (domain.find_predicate(schema.name))
            throw Error(ErrorCode::DuplicateName, "predicate " + schema.name + " already exists", head.where);
        for (std::size_t i = 1; i < head.size(); ++i) {
            if (!is_variable(head[i]))
                throw Error(ErrorCode::SyntaxError, "derived head arguments must be variables", head[i].where);
            schema.parameter_types.push_back(kObjectType);
        }
        schema.arity = static_cast<std::uint32_t>(schema.parameter_types.size());
        domain.predicates.push_back(std::move(schema));
        pending.push_back({&def, static_cast<PredicateId>(domain.predicates.size() - 1)});
    }

    for (const auto& [def, head_id] : pending) {
        DerivedPredicateDef d;
        d.head = head_id;
        const auto& head = (*def)[1];
        for (std::size_t i = 1; i < head.size(); ++i) {
            if (std::find(d.head_variables.begin(), d.head_variables.end(), head[i].token) != d.head_variables.end())
                throw Error(ErrorCode::SyntaxError, "repeated head variable " + head[i].token, head[i].where);
            d.head_variables.push_back(head[i].token);
        }
        const SExpr* conj = &(*def)[2];
        if (conj->head_is("exists")) {
            const auto& ex = *conj;
            if (ex.size() != 3 || !ex[1].is_list || ex[1].size() != 1 || !is_variable(ex[1][0]))
                throw Error(ErrorCode::UnsupportedFeature, "only one existentially quantified variable is supported",
                            ex.where);
            d.existential = ex[1][0].token;
            conj = &ex[2];
        }
        std::vector<std::string> vars = d.head_variables;
        if (d.existential)
            vars.push_back(*d.existential);

        auto parse_body_atom = [&](const SExpr& e) {
            reject_unsupported_keyword(e);
            if (!e.is_list || e.items.empty())
                throw Error(ErrorCode::SyntaxError, "expected an atom", e.where);
            const auto& name = expect_token(e[0], "predicate");
            // Tokens are lower-cased by the reader while goal predicates carry
            // an upper-case suffix, so the lookup ignores case.
            std::optional<PredicateId> pid;
            for (PredicateId p = 0; p < domain.predicates.size() && !pid; ++p)
                if (iequals(domain.predicates[p].name, name))
                    pid = p;
            if (!pid)
                throw Error(ErrorCode::UnknownPredicate, "undeclared predicate " + name, e.where);
            if (domain.predicates[*pid].is_derived())
                throw Error(ErrorCode::UnsupportedFeature, "derived predicates may not appear in derived bodies",
                            e.where);
            if (domain.predicates[*pid].arity != e.size() - 1)
                throw Error(ErrorCode::ArityMismatch, "wrong number of arguments for " + name, e.where);
            AtomTemplate atom;
            atom.predicate = *pid;
            for (std::size_t i = 1; i < e.size(); ++i) {
                auto it = std::find(vars.begin(), vars.end(), e[i].token);
                if (!is_variable(e[i]) || it == vars.end())
                    throw Error(ErrorCode::SyntaxError, "unknown variable " + e[i].token, e[i].where);
                atom.args.push_back({true, static_cast<std::uint32_t>(it - vars.begin())});
            }
            return atom;
        };
        if (conj->head_is("and")) {
            for (std::size_t i = 1; i < conj->size(); ++i)
                d.body.push_back(parse_body_atom((*conj)[i]));
        } else {
            d.body.push_back(parse_body_atom(*conj));
        }
        if (d.body.empty())
            throw Error(ErrorCode::SyntaxError, "derived body is empty", def->where);
        // Every head variable must be bound by the body.
        for (std::uint32_t v = 0; v < vars.size(); ++v) {
            bool bound = std::any_of(d.body.begin(), d.body.end(), [&](const AtomTemplate& a) {
                return std::any_of(a.args.begin(), a.args.end(), [&](const Term& t) { return t.index == v; });
            });
            if (!bound)
                throw Error(ErrorCode::SyntaxError, "variable " + vars[v] + " does not occur in the body", def->where);
        }
        domain.derived_defs.push_back(std::move(d));
    }
}

inline void add_derived_predicates_file(DomainModel& domain, const std::string& path) {
    add_derived_predicates(domain, detail::read_file(path));
}

namespace detail {

inline void write_typed(std::ostream& out, const std::vector<TypedName>& names, const DomainModel& d) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i)
            out << ' ';
        out << names[i].name;
        if (d.typed)
            out << " - " << d.types[names[i].type].name;
    }
}

inline void write_atom(std::ostream& out, const AtomTemplate& a, const DomainModel& d,
                       const std::vector<TypedName>& params) {
    out << '(' << d.predicates[a.predicate].name;
    for (const auto& t : a.args)
        out << ' ' << (t.is_variable ? params[t.index].name : d.constants[t.index].name);
    out << ')';
}

} // namespace detail

/// Writes the base part of a domain (generated and derived predicates are
/// omitted since parsing regenerates them).
inline std::string serialize_domain(const DomainModel& d) {
    std::ostringstream out;
    out << "(define (domain " << d.name << ")\n";
    if (!d.requirements.empty()) {
        out << "  (:requirements";
        for (const auto& r : d.requirements)
            out << ' ' << r;
        out << ")\n";
    }
    if (d.typed && d.types.size() > 1) {
        out << "  (:types";
        for (TypeId t = 1; t < d.types.size(); ++t)
            out << ' ' << d.types[t].name << " - " << d.types[d.types[t].parent].name;
        out << ")\n";
    }
    if (!d.constants.empty()) {
        out << "  (:constants ";
        detail::write_typed(out, d.constants, d);
        out << ")\n";
    }
    out << "  (:predicates";
    for (const auto& p : d.predicates) {
        if (p.kind != PredicateKind::Base)
            continue;
        out << " (" << p.name;
        for (std::size_t i = 0; i < p.arity; ++i) {
            out << " ?x" << i;
            if (d.typed)
                out << " - " << d.types[p.parameter_types[i]].name;
        }
        out << ')';
    }
    out << ")\n";
    for (const auto& a : d.schemas) {
        out << "  (:action " << a.name << "\n    :parameters (";
        detail::write_typed(out, a.parameters, d);
        out << ")\n    :precondition (and";
        for (const auto& p : a.preconditions) {
            out << ' ';
            detail::write_atom(out, p, d, a.parameters);
        }
        out << ")\n    :effect (and";
        for (const auto& p : a.add_effects) {
            out << ' ';
            detail::write_atom(out, p, d, a.parameters);
        }
        for (const auto& p : a.delete_effects) {
            out << " (not ";
            detail::write_atom(out, p, d, a.parameters);
            out << ')';
        }
        out << "))\n";
    }
    out << ")\n";
    return out.str();
}

} // namespace genplan::pddl
