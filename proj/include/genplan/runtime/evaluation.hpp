#pragma once

#include "genplan/error.hpp"
#include "genplan/gnn/model.hpp"
#include "genplan/state_space.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

namespace genplan::runtime {

/// pi(s'|s) for every state, aligned with TransitionSystem::successors.
/// Rows of goal states are ignored.
using PolicyTable = std::vector<std::vector<double>>;

inline constexpr double kTieTolerance = 1e-12;

namespace detail {

inline void require_expanded(const TransitionSystem& ts) {
    if (ts.states.empty() || ts.successors.size() != ts.states.size() || ts.goal_flags.size() != ts.states.size() ||
        ts.goal_distance.size() != ts.states.size())
        throw Error(ErrorCode::NotExpanded, "the transition system is not fully expanded");
}

inline void require_policy_shape(const TransitionSystem& ts, const PolicyTable& pi) {
    if (pi.size() != ts.states.size())
        throw Error(ErrorCode::DimensionMismatch, "policy table needs one row per state");
    for (StateId s = 0; s < ts.states.size(); ++s)
        if (!ts.is_goal(s) && pi[s].size() != ts.successors[s].size())
            throw Error(ErrorCode::DimensionMismatch,
                        "policy row " + std::to_string(s) + " does not match the successor list");
}

inline double dead_end_value(double gamma) {
    return gamma < 1 ? 1.0 / (1.0 - gamma) : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Largest |V(s) - (1 + gamma sum pi V)| over non-goal states, with empty
/// successor lists read as unit-cost self-loops. Infinite values are skipped.
inline double bellman_residual(const TransitionSystem& ts, const PolicyTable& pi, double gamma,
                               std::span<const double> v) {
    double worst = 0;
    for (StateId s = 0; s < ts.states.size(); ++s) {
        if (ts.is_goal(s)) {
            worst = std::max(worst, std::abs(v[s]));
            continue;
        }
        if (!std::isfinite(v[s]))
            continue;
        double target = 1;
        if (ts.successors[s].empty()) {
            target += gamma * v[s];
        } else {
            for (std::size_t i = 0; i < ts.successors[s].size(); ++i)
                target += gamma * pi[s][i] * v[ts.successors[s][i].target];
        }
        worst = std::max(worst, std::abs(v[s] - target));
    }
    return worst;
}

struct EvaluationOptions {
    double tolerance = 1e-9;
    std::size_t max_sweeps = 100000;
};

/// V^pi from V(s) = 1 + gamma sum_{s'} pi(s'|s) V(s'), V = 0 at goals.
/// States without a path to a goal get 1/(1-gamma) exactly. The remaining
/// system is solved directly and then refined by Gauss-Seidel sweeps until
/// the Bellman residual is below the tolerance.
inline std::vector<double> tabular_policy_evaluation(const TransitionSystem& ts, const PolicyTable& pi, double gamma,
                                                     const EvaluationOptions& opt = {}) {
    detail::require_expanded(ts);
    detail::require_policy_shape(ts, pi);
    if (!(gamma > 0 && gamma <= 1))
        throw Error(ErrorCode::InvalidArgument, "discount must lie in (0, 1]");
    const std::size_t n = ts.states.size();
    std::vector<double> v(n, 0.0);
    std::vector<char> fixed(n, 0);
    for (StateId s = 0; s < n; ++s) {
        if (ts.is_goal(s)) {
            fixed[s] = 1;
        } else if (ts.is_dead_end(s)) {
            v[s] = detail::dead_end_value(gamma);
            fixed[s] = 1;
        }
    }
    if (gamma >= 1) {
        // Undiscounted: anything that can fall into a dead end costs infinity.
        bool changed = true;
        while (changed) {
            changed = false;
            for (StateId s = 0; s < n; ++s) {
                if (fixed[s])
                    continue;
                for (std::size_t i = 0; i < ts.successors[s].size(); ++i)
                    if (pi[s][i] > 0 && std::isinf(v[ts.successors[s][i].target])) {
                        v[s] = std::numeric_limits<double>::infinity();
                        fixed[s] = 1;
                        changed = true;
                        break;
                    }
            }
        }
    }
    std::vector<std::int64_t> row(n, -1);
    std::vector<StateId> free_states;
    for (StateId s = 0; s < n; ++s)
        if (!fixed[s]) {
            row[s] = static_cast<std::int64_t>(free_states.size());
            free_states.push_back(s);
        }
    if (!free_states.empty()) {
        const auto m = static_cast<Eigen::Index>(free_states.size());
        std::vector<Eigen::Triplet<double>> entries;
        Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            const StateId s = free_states[r];
            double diag = 1;
            for (std::size_t i = 0; i < ts.successors[s].size(); ++i) {
                const StateId t = ts.successors[s][i].target;
                const double w = gamma * pi[s][i];
                if (row[t] < 0)
                    rhs[r] += w * v[t];
                else if (row[t] == r)
                    diag -= w;
                else
                    entries.emplace_back(r, row[t], -w);
            }
            entries.emplace_back(r, r, diag);
        }
        Eigen::SparseMatrix<double> a(m, m);
        a.setFromTriplets(entries.begin(), entries.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(a);
        if (lu.info() == Eigen::Success) {
            Eigen::VectorXd x = lu.solve(rhs);
            if (lu.info() == Eigen::Success)
                for (Eigen::Index r = 0; r < m; ++r)
                    if (std::isfinite(x[r]))
                        v[free_states[r]] = x[r];
        }
    }
    for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        if (bellman_residual(ts, pi, gamma, v) < opt.tolerance)
            return v;
        for (StateId s : free_states) {
            double target = 1;
            for (std::size_t i = 0; i < ts.successors[s].size(); ++i)
                target += gamma * pi[s][i] * v[ts.successors[s][i].target];
            v[s] = target;
        }
    }
    if (bellman_residual(ts, pi, gamma, v) >= opt.tolerance)
        throw Error(ErrorCode::InvalidArgument, "policy evaluation did not converge");
    return v;
}

struct ValueIterationResult {
    std::vector<double> values;
    std::size_t iterations = 0;
    double residual = 0;
};

/// V(s) <- min_{s' in N(s)} 1 + gamma V(s'), from V = 0, with dead ends at
/// their closed-form value 1/(1-gamma).
inline ValueIterationResult value_iteration(const TransitionSystem& ts, double gamma, double tolerance = 1e-12,
                                            std::size_t max_iterations = 1000000) {
    detail::require_expanded(ts);
    if (!(gamma > 0 && gamma <= 1))
        throw Error(ErrorCode::InvalidArgument, "discount must lie in (0, 1]");
    ValueIterationResult r;
    r.values.assign(ts.states.size(), 0.0);
    auto& v = r.values;
    for (StateId s = 0; s < ts.states.size(); ++s)
        if (!ts.is_goal(s) && ts.is_dead_end(s))
            v[s] = detail::dead_end_value(gamma);
    while (r.iterations < max_iterations) {
        ++r.iterations;
        double change = 0;
        for (StateId s = 0; s < ts.states.size(); ++s) {
            if (ts.is_goal(s) || ts.is_dead_end(s))
                continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& t : ts.successors[s])
                best = std::min(best, 1 + gamma * v[t.target]);
            change = std::max(change, std::abs(best - v[s]));
            v[s] = best;
        }
        r.residual = change;
        if (change <= tolerance)
            break;
    }
    return r;
}

/// Index into N(s) minimizing 1 + gamma V(s'); ties within 1e-12 go to the
/// lexicographically smallest successor state. -1 for goals and empty N(s).
inline std::vector<int> greedy_policy(const TransitionSystem& ts, std::span<const double> v, double gamma) {
    std::vector<int> choice(ts.states.size(), -1);
    for (StateId s = 0; s < ts.states.size(); ++s) {
        if (ts.is_goal(s))
            continue;
        const auto& succ = ts.successors[s];
        for (std::size_t i = 0; i < succ.size(); ++i) {
            if (choice[s] < 0) {
                choice[s] = static_cast<int>(i);
                continue;
            }
            const double a = 1 + gamma * v[succ[i].target];
            const double b = 1 + gamma * v[succ[choice[s]].target];
            if (a < b - kTieTolerance ||
                (std::abs(a - b) <= kTieTolerance && ts.states[succ[i].target] < ts.states[succ[choice[s]].target]))
                choice[s] = static_cast<int>(i);
        }
    }
    return choice;
}

/// One-hot policy table for a choice vector.
inline PolicyTable deterministic_policy(const TransitionSystem& ts, std::span<const int> choice) {
    PolicyTable pi(ts.states.size());
    for (StateId s = 0; s < ts.states.size(); ++s) {
        pi[s].assign(ts.successors[s].size(), 0.0);
        if (choice[s] >= 0)
            pi[s][choice[s]] = 1.0;
    }
    return pi;
}

/// Mean of V over the non-goal states.
inline double average_non_goal(const TransitionSystem& ts, std::span<const double> v) {
    double total = 0;
    std::size_t count = 0;
    for (StateId s = 0; s < ts.states.size(); ++s)
        if (!ts.is_goal(s)) {
            total += v[s];
            ++count;
        }
    if (count == 0)
        throw Error(ErrorCode::NoNonGoalStates, "every state is a goal state");
    return total / static_cast<double>(count);
}

/// pi(.|s) of a model over every non-goal state, evaluated in chunks.
inline PolicyTable model_policy_table(const gnn::PolicyModel& model, const TransitionSystem& ts,
                                      std::span<const gnn::RelationalState> states, std::size_t chunk = 64) {
    detail::require_expanded(ts);
    if (states.size() != ts.states.size())
        throw Error(ErrorCode::DimensionMismatch, "one relational state per system state is required");
    PolicyTable pi(ts.states.size());
    std::vector<StateId> parents;
    for (StateId s = 0; s < ts.states.size(); ++s)
        if (!ts.is_goal(s) && !ts.successors[s].empty())
            parents.push_back(s);
    for (std::size_t begin = 0; begin < parents.size(); begin += chunk) {
        const std::size_t end = std::min(parents.size(), begin + chunk);
        ad::Graph g;
        auto batch = model.make_batch();
        std::unordered_map<StateId, std::uint32_t> slot;
        auto add = [&](StateId s) {
            auto [it, inserted] = slot.try_emplace(s, 0);
            if (inserted)
                it->second = static_cast<std::uint32_t>(batch.add(states[s], model.signature()));
            return it->second;
        };
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (std::size_t i = begin; i < end; ++i) {
            const auto from = add(parents[i]);
            for (const auto& t : ts.successors[parents[i]])
                pairs.emplace_back(from, add(t.target));
        }
        const auto logits = model.transition_logits(g, model.embed(g, batch), pairs).value();
        std::size_t at = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const auto n = ts.successors[parents[i]].size();
            auto& row = pi[parents[i]];
            row.resize(n);
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                mx = std::max(mx, static_cast<double>(logits[at + j]));
            double total = 0;
            for (std::size_t j = 0; j < n; ++j)
                total += row[j] = std::exp(static_cast<double>(logits[at + j]) - mx);
            for (auto& p : row)
                p /= total;
            at += n;
        }
    }
    return pi;
}

/// Expected policy cost of a model: mean V^pi over non-goal states.
inline double expected_policy_cost(const gnn::PolicyModel& model, const TransitionSystem& ts,
                                   std::span<const gnn::RelationalState> states, double gamma) {
    const auto pi = model_policy_table(model, ts, states);
    return average_non_goal(ts, tabular_policy_evaluation(ts, pi, gamma));
}

} // namespace genplan::runtime
