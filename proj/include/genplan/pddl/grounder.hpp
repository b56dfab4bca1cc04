#pragma once

#include "genplan/error.hpp"
#include "genplan/pddl/model.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace genplan::pddl {

using AtomId = std::uint32_t;
using ActionId = std::uint32_t;

/// A state is the sorted, duplicate-free list of the atom ids true in it.
/// Since atom ids follow the canonical atom order, comparing two states
/// lexicographically compares their canonical serializations atom by atom.
using State = std::vector<AtomId>;

struct GroundAction {
    std::uint32_t schema = 0;
    std::vector<ObjectId> args;
    std::vector<AtomId> preconditions;
    std::vector<AtomId> add_effects;
    std::vector<AtomId> delete_effects;
};

struct GroundingLimits {
    std::size_t max_atoms = 5'000'000;
    std::size_t max_actions = 2'000'000;
};

/// The compact state model of one instance: a dense atom table (every
/// type-consistent atom of every predicate, in canonical order), the ground
/// actions that survive reachability pruning, and the initial/goal atoms.
class GroundedProblem {
public:
    GroundedProblem(std::shared_ptr<const DomainModel> domain, InstanceModel instance, GroundingLimits limits = {});

    const DomainModel& domain() const { return *domain_; }
    std::shared_ptr<const DomainModel> domain_ptr() const { return domain_; }
    const InstanceModel& instance() const { return instance_; }
    std::size_t object_count() const { return instance_.objects.size(); }

    std::size_t atom_count() const { return atom_total_; }
    std::size_t atom_count(PredicateId p) const { return offsets_[p + 1] - offsets_[p]; }
    const std::vector<GroundAction>& actions() const { return actions_; }

    /// Candidate action count before static and reachability pruning.
    std::size_t unpruned_action_count() const { return unpruned_actions_; }

    /// Initial state, goal-augmented and derived-closed.
    const State& initial_state() const { return init_; }
    /// Goal atoms p(t) of the instance, as ids.
    const State& goal_atoms() const { return goal_; }

    std::optional<AtomId> atom_id(const GroundAtom& atom) const;
    GroundAtom atom(AtomId id) const;
    PredicateId predicate_of(AtomId id) const {
        auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id);
        return static_cast<PredicateId>(it - offsets_.begin() - 1);
    }
    PredicateKind kind_of(AtomId id) const { return domain_->predicates[predicate_of(id)].kind; }

    /// Id of p_G(t) for the base atom p(t).
    AtomId goal_marker_of(AtomId base) const {
        PredicateId p = predicate_of(base);
        return offsets_[*domain_->predicates[p].partner] + (base - offsets_[p]);
    }

    /// state ∪ {p_G(t) : p(t) ∈ goal}.
    State augment_goals(const State& state, const State& goal) const;

    /// Removes stale derived atoms and adds every head instantiation whose
    /// body holds in the non-derived part of the state.
    State apply_derived(const State& state) const;

    /// Goal-augmentation followed by derived closure, w.r.t. the instance goal.
    State complete(const State& base_state) const { return apply_derived(augment_goals(base_state, goal_)); }

    /// True iff for each goal atom p_G(t) in s, p(t) is in s.
    bool is_goal(const State& s) const;

    bool applicable(const GroundAction& a, const State& s) const {
        return std::includes(s.begin(), s.end(), a.preconditions.begin(), a.preconditions.end());
    }

    /// Progression: applies the action to the base atoms and re-completes.
    State apply(const GroundAction& a, const State& s) const;

    /// N(s): one entry per distinct successor state different from s, each
    /// labelled with the first ground action (canonical order) producing it.
    std::vector<std::pair<ActionId, State>> successors(const State& s) const;

    std::string atom_name(AtomId id) const;
    std::string action_name(ActionId id) const;
    std::string state_string(const State& s) const;

private:
    void build_atom_table(const GroundingLimits& limits);
    void ground_actions(const GroundingLimits& limits);
    std::vector<ObjectId> objects_of_type(TypeId t) const;

    std::shared_ptr<const DomainModel> domain_;
    InstanceModel instance_;
    std::vector<AtomId> offsets_;
    std::size_t atom_total_ = 0;
    // Per predicate and argument position: rank of each object among the
    // candidates of that position (or npos), plus the mixed-radix strides.
    std::vector<std::vector<std::vector<std::uint32_t>>> ranks_;
    std::vector<std::vector<std::vector<ObjectId>>> candidates_;
    std::vector<std::vector<std::size_t>> strides_;
    std::vector<GroundAction> actions_;
    std::size_t unpruned_actions_ = 0;
    State init_;
    State goal_;
};

inline constexpr std::uint32_t kNoRank = std::numeric_limits<std::uint32_t>::max();

inline std::vector<ObjectId> GroundedProblem::objects_of_type(TypeId t) const {
    std::vector<ObjectId> out;
    for (ObjectId o = 0; o < instance_.objects.size(); ++o)
        if (domain_->is_subtype(instance_.objects[o].type, t))
            out.push_back(o);
    return out;
}

inline GroundedProblem::GroundedProblem(std::shared_ptr<const DomainModel> domain, InstanceModel instance,
                                        GroundingLimits limits)
    : domain_(std::move(domain)), instance_(std::move(instance)) {
    build_atom_table(limits);

    State base;
    for (const auto& a : instance_.init) {
        auto id = atom_id(a);
        if (!id)
            throw Error(ErrorCode::UnknownObject, "init atom outside the atom table");
        base.push_back(*id);
    }
    for (ObjectId o = 0; o < instance_.objects.size(); ++o) {
        for (TypeId t = instance_.objects[o].type; t != kObjectType; t = domain_->types[t].parent) {
            for (PredicateId p = 0; p < domain_->predicates.size(); ++p) {
                const auto& schema = domain_->predicates[p];
                if (schema.kind == PredicateKind::Type && schema.partner == t)
                    base.push_back(*atom_id(GroundAtom{p, {o}}));
            }
        }
    }
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());
    for (const auto& g : instance_.goal) {
        auto id = atom_id(g);
        if (!id)
            throw Error(ErrorCode::UnknownObject, "goal atom outside the atom table");
        goal_.push_back(*id);
    }
    std::sort(goal_.begin(), goal_.end());
    init_ = base;
    ground_actions(limits);
    init_ = complete(base);
}

inline void GroundedProblem::build_atom_table(const GroundingLimits& limits) {
    const auto& preds = domain_->predicates;
    offsets_.assign(preds.size() + 1, 0);
    ranks_.resize(preds.size());
    candidates_.resize(preds.size());
    strides_.resize(preds.size());
    std::size_t total = 0;
    const std::size_t n_objects = instance_.objects.size();
    for (PredicateId p = 0; p < preds.size(); ++p) {
        offsets_[p] = static_cast<AtomId>(total);
        const auto& schema = preds[p];
        std::size_t count = 1;
        for (std::uint32_t j = 0; j < schema.arity; ++j) {
            auto cands = objects_of_type(schema.parameter_types[j]);
            std::vector<std::uint32_t> rank(n_objects, kNoRank);
            for (std::uint32_t r = 0; r < cands.size(); ++r)
                rank[cands[r]] = r;
            count *= cands.size();
            if (count > limits.max_atoms)
                throw Error(ErrorCode::CapacityExceeded, "too many ground atoms for predicate " + schema.name);
            candidates_[p].push_back(std::move(cands));
            ranks_[p].push_back(std::move(rank));
        }
        strides_[p].assign(schema.arity, 1);
        for (std::size_t j = schema.arity; j-- > 1;)
            strides_[p][j - 1] = strides_[p][j] * candidates_[p][j].size();
        total += count;
        if (total > limits.max_atoms)
            throw Error(ErrorCode::CapacityExceeded,
                        "atom table exceeds the limit of " + std::to_string(limits.max_atoms));
    }
    offsets_[preds.size()] = static_cast<AtomId>(total);
    atom_total_ = total;
}

inline std::optional<AtomId> GroundedProblem::atom_id(const GroundAtom& a) const {
    if (a.predicate >= domain_->predicates.size() || a.args.size() != domain_->predicates[a.predicate].arity)
        return std::nullopt;
    std::size_t idx = offsets_[a.predicate];
    for (std::size_t j = 0; j < a.args.size(); ++j) {
        if (a.args[j] >= instance_.objects.size())
            return std::nullopt;
        auto r = ranks_[a.predicate][j][a.args[j]];
        if (r == kNoRank)
            return std::nullopt;
        idx += r * strides_[a.predicate][j];
    }
    return static_cast<AtomId>(idx);
}

inline GroundAtom GroundedProblem::atom(AtomId id) const {
    GroundAtom a;
    a.predicate = predicate_of(id);
    std::size_t rest = id - offsets_[a.predicate];
    for (std::size_t j = 0; j < strides_[a.predicate].size(); ++j) {
        a.args.push_back(candidates_[a.predicate][j][rest / strides_[a.predicate][j]]);
        rest %= strides_[a.predicate][j];
    }
    return a;
}

inline void GroundedProblem::ground_actions(const GroundingLimits& limits) {
    const auto& d = *domain_;
    // A predicate is static when no schema adds or deletes it.
    std::vector<char> fluent(d.predicates.size(), 0);
    for (const auto& s : d.schemas) {
        for (const auto& a : s.add_effects)
            fluent[a.predicate] = 1;
        for (const auto& a : s.delete_effects)
            fluent[a.predicate] = 1;
    }
    std::vector<char> in_init(atom_total_, 0);
    for (AtomId a : init_)
        in_init[a] = 1;

    struct Candidate {
        std::uint32_t schema;
        std::vector<ObjectId> args;
    };
    std::vector<Candidate> cands;
    unpruned_actions_ = 0;

    auto instantiate = [&](const AtomTemplate& t, const std::vector<ObjectId>& binding) {
        GroundAtom g;
        g.predicate = t.predicate;
        for (const auto& term : t.args)
            g.args.push_back(term.is_variable ? binding[term.index] : term.index);
        return atom_id(g);
    };

    for (std::uint32_t si = 0; si < d.schemas.size(); ++si) {
        const auto& schema = d.schemas[si];
        const std::size_t n = schema.parameters.size();
        std::vector<std::vector<ObjectId>> domains;
        std::size_t product = 1;
        for (const auto& p : schema.parameters) {
            domains.push_back(objects_of_type(p.type));
            product *= domains.back().size();
        }
        unpruned_actions_ += product;

        // Static preconditions are checked as soon as their last variable is bound.
        std::vector<std::vector<const AtomTemplate*>> checks(n + 1);
        for (const auto& pre : schema.preconditions) {
            std::size_t last = 0;
            for (const auto& t : pre.args)
                if (t.is_variable)
                    last = std::max<std::size_t>(last, t.index + 1);
            if (!fluent[pre.predicate])
                checks[last].push_back(&pre);
        }
        std::vector<ObjectId> binding(n);
        auto statics_hold = [&](std::size_t level) {
            for (const auto* pre : checks[level]) {
                auto id = instantiate(*pre, binding);
                if (!id || !in_init[*id])
                    return false;
            }
            return true;
        };
        if (!statics_hold(0))
            continue;
        // Iterative backtracking over parameter positions.
        std::vector<std::size_t> pos(n, 0);
        std::size_t level = 0;
        if (n == 0) {
            cands.push_back({si, {}});
            continue;
        }
        while (true) {
            if (pos[level] >= domains[level].size()) {
                if (level == 0)
                    break;
                pos[level] = 0;
                --level;
                ++pos[level];
                continue;
            }
            binding[level] = domains[level][pos[level]];
            if (!statics_hold(level + 1)) {
                ++pos[level];
                continue;
            }
            if (level + 1 == n) {
                cands.push_back({si, binding});
                if (cands.size() > limits.max_actions)
                    throw Error(ErrorCode::CapacityExceeded,
                                "ground actions exceed the limit of " + std::to_string(limits.max_actions));
                ++pos[level];
            } else {
                ++level;
            }
        }
    }

    // Delete-relaxed reachability from the initial state.
    std::vector<char> reached = in_init;
    std::vector<GroundAction> built;
    built.reserve(cands.size());
    for (const auto& c : cands) {
        GroundAction ga;
        ga.schema = c.schema;
        ga.args = c.args;
        const auto& schema = d.schemas[c.schema];
        bool ok = true;
        for (const auto& t : schema.preconditions) {
            auto id = instantiate(t, c.args);
            if (!id) {
                ok = false;
                break;
            }
            ga.preconditions.push_back(*id);
        }
        for (const auto& t : schema.add_effects) {
            auto id = instantiate(t, c.args);
            if (!id) {
                ok = false;
                break;
            }
            ga.add_effects.push_back(*id);
        }
        for (const auto& t : schema.delete_effects) {
            auto id = instantiate(t, c.args);
            if (id)
                ga.delete_effects.push_back(*id);
        }
        if (!ok)
            continue;
        for (auto* v : {&ga.preconditions, &ga.add_effects, &ga.delete_effects}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
        }
        // Add wins over delete when both mention the same atom.
        State del;
        std::set_difference(ga.delete_effects.begin(), ga.delete_effects.end(), ga.add_effects.begin(),
                            ga.add_effects.end(), std::back_inserter(del));
        ga.delete_effects = std::move(del);
        built.push_back(std::move(ga));
    }
    std::vector<char> enabled(built.size(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < built.size(); ++i) {
            if (enabled[i])
                continue;
            const auto& pre = built[i].preconditions;
            if (std::all_of(pre.begin(), pre.end(), [&](AtomId a) { return reached[a] != 0; })) {
                enabled[i] = 1;
                changed = true;
                for (AtomId a : built[i].add_effects)
                    reached[a] = 1;
            }
        }
    }
    for (std::size_t i = 0; i < built.size(); ++i)
        if (enabled[i])
            actions_.push_back(std::move(built[i]));
}

inline State GroundedProblem::augment_goals(const State& state, const State& goal) const {
    State out = state;
    for (AtomId g : goal) {
        PredicateId p = predicate_of(g);
        if (domain_->predicates[p].kind != PredicateKind::Base)
            throw Error(ErrorCode::InvalidArgument, "goal atoms must use base predicates");
        out.push_back(goal_marker_of(g));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline State GroundedProblem::apply_derived(const State& state) const {
    State out;
    out.reserve(state.size());
    for (AtomId a : state)
        if (kind_of(a) != PredicateKind::Derived)
            out.push_back(a);
    if (domain_->derived_defs.empty())
        return out;
    const State base = out;

    auto range_of = [&](PredicateId p) {
        auto lo = std::lower_bound(base.begin(), base.end(), offsets_[p]);
        auto hi = std::lower_bound(lo, base.end(), offsets_[p + 1]);
        return std::span<const AtomId>(lo, hi);
    };

    constexpr ObjectId kUnbound = std::numeric_limits<ObjectId>::max();
    for (const auto& def : domain_->derived_defs) {
        std::vector<ObjectId> binding(def.variable_count(), kUnbound);
        // Depth-first join over the body atoms.
        auto join = [&](auto&& self, std::size_t i) -> void {
            if (i == def.body.size()) {
                GroundAtom head{def.head, {}};
                for (std::size_t v = 0; v < def.head_variables.size(); ++v)
                    head.args.push_back(binding[v]);
                if (auto id = atom_id(head))
                    out.push_back(*id);
                return;
            }
            const auto& tmpl = def.body[i];
            for (AtomId a : range_of(tmpl.predicate)) {
                GroundAtom g = atom(a);
                std::vector<std::uint32_t> newly;
                bool ok = true;
                for (std::size_t j = 0; j < tmpl.args.size() && ok; ++j) {
                    auto& slot = binding[tmpl.args[j].index];
                    if (slot == kUnbound) {
                        slot = g.args[j];
                        newly.push_back(tmpl.args[j].index);
                    } else if (slot != g.args[j]) {
                        ok = false;
                    }
                }
                if (ok)
                    self(self, i + 1);
                for (auto v : newly)
                    binding[v] = kUnbound;
            }
        };
        join(join, 0);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool GroundedProblem::is_goal(const State& s) const {
    for (AtomId a : s) {
        PredicateId p = predicate_of(a);
        const auto& schema = domain_->predicates[p];
        if (schema.kind != PredicateKind::Goal)
            continue;
        AtomId target = offsets_[*schema.partner] + (a - offsets_[p]);
        if (!std::binary_search(s.begin(), s.end(), target))
            return false;
    }
    return true;
}

inline State GroundedProblem::apply(const GroundAction& a, const State& s) const {
    State next;
    next.reserve(s.size() + a.add_effects.size());
    for (AtomId x : s) {
        if (kind_of(x) == PredicateKind::Derived)
            continue;
        if (!std::binary_search(a.delete_effects.begin(), a.delete_effects.end(), x))
            next.push_back(x);
    }
    next.insert(next.end(), a.add_effects.begin(), a.add_effects.end());
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return apply_derived(next);
}

inline std::vector<std::pair<ActionId, State>> GroundedProblem::successors(const State& s) const {
    std::vector<std::pair<ActionId, State>> out;
    for (ActionId i = 0; i < actions_.size(); ++i) {
        if (!applicable(actions_[i], s))
            continue;
        State next = apply(actions_[i], s);
        if (next == s)
            continue;
        bool seen = std::any_of(out.begin(), out.end(), [&](const auto& e) { return e.second == next; });
        if (!seen)
            out.emplace_back(i, std::move(next));
    }
    return out;
}

inline std::string GroundedProblem::atom_name(AtomId id) const {
    GroundAtom a = atom(id);
    std::string out = "(" + domain_->predicates[a.predicate].name;
    for (auto o : a.args)
        out += " " + instance_.objects[o].name;
    return out + ")";
}

inline std::string GroundedProblem::action_name(ActionId id) const {
    const auto& a = actions_.at(id);
    std::string out = "(" + domain_->schemas[a.schema].name;
    for (auto o : a.args)
        out += " " + instance_.objects[o].name;
    return out + ")";
}

inline std::string GroundedProblem::state_string(const State& s) const {
    std::string out;
    for (AtomId a : s) {
        if (!out.empty())
            out += ' ';
        out += atom_name(a);
    }
    return out;
}

/// Grounds an instance; see GroundedProblem.
inline GroundedProblem ground(std::shared_ptr<const DomainModel> domain, InstanceModel instance,
                              GroundingLimits limits = {}) {
    return GroundedProblem(std::move(domain), std::move(instance), limits);
}

} // namespace genplan::pddl
