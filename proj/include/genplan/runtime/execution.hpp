#pragma once

#include "genplan/error.hpp"
#include "genplan/gnn/model.hpp"
#include "genplan/pddl/grounder.hpp"
#include "genplan/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace genplan::runtime {

inline constexpr std::size_t kDefaultStepCap = 10000;

enum class Termination { Goal, StepCap, Stuck };

inline std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::Goal: return "goal";
    case Termination::StepCap: return "step_cap";
    case Termination::Stuck: return "stuck";
    }
    return "?";
}

/// One episode. states[0] is the initial state; actions[i] leads from
/// states[i] to states[i + 1].
struct RunOutcome {
    bool solved = false;
    std::size_t steps = 0;
    Termination reason = Termination::Stuck;
    std::vector<State> states;
    std::vector<ActionId> actions;
};

/// Probabilities of the successors of a state, in the given order.
using ProbabilityFn = std::function<std::vector<double>(const State&, std::span<const State>)>;
/// Values of a list of states.
using ValueFn = std::function<std::vector<double>(std::span<const State>)>;

namespace detail {

/// Scores closer than this count as equal.
inline constexpr double kTieEpsilon = 1e-12;

struct Expanded {
    std::vector<ActionId> actions;
    std::vector<State> states;
};

inline Expanded expand_state(const GroundedProblem& problem, const State& s) {
    Expanded e;
    for (auto& [a, t] : problem.successors(s)) {
        e.actions.push_back(a);
        e.states.push_back(std::move(t));
    }
    return e;
}

/// Greedy closed-set episode: score(successors) gives one number per
/// successor and higher is better.
template <class Score>
RunOutcome run_closed_set(const GroundedProblem& problem, Score&& score, std::size_t step_cap) {
    RunOutcome out;
    State current = problem.initial_state();
    std::unordered_set<State, StateHash> visited{current};
    out.states.push_back(current);
    while (true) {
        if (problem.is_goal(current)) {
            out.solved = true;
            out.reason = Termination::Goal;
            return out;
        }
        if (out.steps >= step_cap) {
            out.reason = Termination::StepCap;
            return out;
        }
        auto next = expand_state(problem, current);
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < next.states.size(); ++i)
            if (!visited.contains(next.states[i]))
                open.push_back(i);
        if (open.empty()) {
            out.reason = Termination::Stuck;
            return out;
        }
        const auto scores = score(current, std::span<const State>(next.states));
        std::size_t best = open.front();
        for (std::size_t i : open) {
            if (scores[i] > scores[best] + kTieEpsilon ||
                (std::abs(scores[i] - scores[best]) <= kTieEpsilon && next.states[i] < next.states[best]))
                best = i;
        }
        current = next.states[best];
        visited.insert(current);
        out.states.push_back(current);
        out.actions.push_back(next.actions[best]);
        ++out.steps;
    }
}

} // namespace detail

/// Samples s' ~ pi(.|s) at every step.
inline RunOutcome run_stochastic(const GroundedProblem& problem, const ProbabilityFn& policy,
                                 std::size_t step_cap = kDefaultStepCap, std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    RunOutcome out;
    State current = problem.initial_state();
    out.states.push_back(current);
    while (true) {
        if (problem.is_goal(current)) {
            out.solved = true;
            out.reason = Termination::Goal;
            return out;
        }
        if (out.steps >= step_cap) {
            out.reason = Termination::StepCap;
            return out;
        }
        auto next = detail::expand_state(problem, current);
        if (next.states.empty()) {
            out.reason = Termination::Stuck;
            return out;
        }
        const auto p = policy(current, next.states);
        std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
        const std::size_t i = pick(rng);
        current = next.states[i];
        out.states.push_back(current);
        out.actions.push_back(next.actions[i]);
        ++out.steps;
    }
}

/// Most likely unvisited successor at every step.
inline RunOutcome run_deterministic(const GroundedProblem& problem, const ProbabilityFn& policy,
                                    std::size_t step_cap = kDefaultStepCap) {
    return detail::run_closed_set(
        problem, [&](const State& s, std::span<const State> next) { return policy(s, next); }, step_cap);
}

/// Unvisited successor of lowest value at every step.
inline RunOutcome run_critic_greedy(const GroundedProblem& problem, const ValueFn& value,
                                    std::size_t step_cap = kDefaultStepCap) {
    return detail::run_closed_set(
        problem,
        [&](const State&, std::span<const State> next) {
            auto v = value(next);
            for (auto& x : v)
                x = -x;
            return v;
        },
        step_cap);
}

/// Policy of a trained model over states of one problem.
inline ProbabilityFn model_policy(const gnn::PolicyModel& model, const GroundedProblem& problem) {
    return [&model, &problem](const State& s, std::span<const State> next) {
        std::vector<gnn::RelationalState> succ;
        succ.reserve(next.size());
        for (const auto& t : next)
            succ.push_back(gnn::relational_state(problem, t));
        return model.policy_distribution(gnn::relational_state(problem, s), succ);
    };
}

/// Critic of a trained model over states of one problem.
inline ValueFn model_values(const gnn::PolicyModel& model, const GroundedProblem& problem) {
    return [&model, &problem](std::span<const State> states) {
        ad::Graph g;
        auto batch = model.make_batch();
        for (const auto& s : states)
            batch.add(gnn::relational_state(problem, s), model.signature());
        const auto v = model.values(g, model.embed(g, batch)).value();
        return std::vector<double>(v.values().begin(), v.values().end());
    };
}

} // namespace genplan::runtime
