#pragma once

#include "genplan/dataset.hpp"
#include "genplan/generators.hpp"
#include "genplan/pddl/grounder.hpp"
#include "genplan/pddl/parser.hpp"
#include "genplan/state_space.hpp"

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

namespace support {

using namespace genplan;

inline std::string data(const std::string& rel) { return std::string(GENPLAN_DATA_DIR) + "/" + rel; }

inline std::shared_ptr<const pddl::DomainModel> domain(const std::string& name, const std::string& derived = {}) {
    return load_domain(data("domains/" + name + ".pddl"), derived.empty() ? std::string{} : data("domains/" + derived));
}

inline std::shared_ptr<const pddl::DomainModel> domain_from_text(const std::string& text) {
    return std::make_shared<const pddl::DomainModel>(pddl::parse_domain(text));
}

inline GroundedProblem problem(std::shared_ptr<const pddl::DomainModel> d, const std::string& text) {
    auto inst = pddl::parse_instance(text, *d);
    return GroundedProblem(std::move(d), std::move(inst));
}

inline GroundedProblem gripper(int balls) { return problem(domain("gripper"), gen::gripper(balls)); }

inline AtomId atom(const GroundedProblem& p, const std::string& pred, const std::vector<std::string>& args) {
    pddl::GroundAtom a;
    a.predicate = *p.domain().find_predicate(pred);
    for (const auto& o : args)
        a.args.push_back(*p.instance().find_object(o));
    return *p.atom_id(a);
}

inline State state_of(std::vector<AtomId> atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms;
}

/// A hand-built transition system. edges[s] lists targets; states are {s}.
inline TransitionSystem system_of(const std::vector<std::vector<StateId>>& edges, const std::vector<StateId>& goals,
                                  StateId init = 0) {
    TransitionSystem ts;
    const auto n = edges.size();
    ts.states.resize(n);
    ts.successors.resize(n);
    ts.goal_flags.assign(n, 0);
    ts.init = init;
    for (StateId s = 0; s < n; ++s) {
        ts.states[s] = {s};
        for (std::size_t i = 0; i < edges[s].size(); ++i)
            ts.successors[s].push_back({static_cast<ActionId>(i), edges[s][i]});
    }
    for (auto g : goals)
        ts.goal_flags[g] = 1;
    ts.goal_distance = goal_distances(ts);
    return ts;
}

} // namespace support
