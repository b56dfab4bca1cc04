#pragma once

#include "genplan/error.hpp"
#include "genplan/pddl/grounder.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <deque>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace genplan {

using pddl::ActionId;
using pddl::AtomId;
using pddl::GroundedProblem;
using pddl::State;

using StateId = std::uint32_t;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct StateHash {
    std::size_t operator()(const State& s) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (AtomId a : s) {
            h ^= a;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct Transition {
    ActionId action = 0;
    StateId target = 0;
    bool operator==(const Transition&) const = default;
};

struct ExpansionLimits {
    std::size_t max_states = 1'000'000;
    std::size_t max_transitions = 10'000'000;
};

/// The reachable state space of one instance. States are goal-augmented and
/// derived-closed, in breadth-first discovery order; successor lists are N(s)
/// in canonical action order.
struct TransitionSystem {
    std::vector<State> states;
    std::vector<std::vector<Transition>> successors;
    StateId init = 0;
    std::vector<char> goal_flags;
    std::vector<std::uint32_t> goal_distance;

    std::size_t state_count() const { return states.size(); }
    std::size_t transition_count() const {
        std::size_t n = 0;
        for (const auto& s : successors)
            n += s.size();
        return n;
    }
    bool is_goal(StateId s) const { return goal_flags[s] != 0; }
    bool is_dead_end(StateId s) const { return goal_distance[s] == kUnreachable; }

    std::vector<StateId> non_goal_states() const {
        std::vector<StateId> out;
        for (StateId s = 0; s < states.size(); ++s)
            if (!goal_flags[s])
                out.push_back(s);
        return out;
    }

    bool operator==(const TransitionSystem&) const = default;
};

/// Backward breadth-first search from all goal states over reversed edges.
inline std::vector<std::uint32_t> goal_distances(const TransitionSystem& ts) {
    const std::size_t n = ts.states.size();
    std::vector<std::vector<StateId>> preds(n);
    for (StateId s = 0; s < n; ++s)
        for (const auto& t : ts.successors[s])
            preds[t.target].push_back(s);
    std::vector<std::uint32_t> dist(n, kUnreachable);
    std::deque<StateId> queue;
    for (StateId s = 0; s < n; ++s) {
        if (ts.goal_flags[s]) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (StateId p : preds[s]) {
            if (dist[p] == kUnreachable) {
                dist[p] = dist[s] + 1;
                queue.push_back(p);
            }
        }
    }
    return dist;
}

/// Breadth-first expansion from the initial state.
inline TransitionSystem expand(const GroundedProblem& problem, const ExpansionLimits& limits = {}) {
    TransitionSystem ts;
    std::unordered_map<State, StateId, StateHash> index;
    auto intern = [&](State s) -> StateId {
        auto [it, inserted] = index.try_emplace(s, static_cast<StateId>(ts.states.size()));
        if (inserted) {
            if (ts.states.size() >= limits.max_states)
                throw Error(ErrorCode::CapacityExceeded,
                            "more than " + std::to_string(limits.max_states) + " reachable states");
            ts.states.push_back(std::move(s));
        }
        return it->second;
    };
    ts.init = intern(problem.initial_state());
    std::size_t transitions = 0;
    for (StateId s = 0; s < ts.states.size(); ++s) {
        std::vector<Transition> succ;
        for (auto& [action, next] : problem.successors(ts.states[s])) {
            succ.push_back({action, intern(std::move(next))});
            if (++transitions > limits.max_transitions)
                throw Error(ErrorCode::CapacityExceeded,
                            "more than " + std::to_string(limits.max_transitions) + " transitions");
        }
        ts.successors.push_back(std::move(succ));
    }
    ts.goal_flags.resize(ts.states.size());
    for (StateId s = 0; s < ts.states.size(); ++s)
        ts.goal_flags[s] = problem.is_goal(ts.states[s]) ? 1 : 0;
    ts.goal_distance = goal_distances(ts);
    return ts;
}

/// Optimal plan length from the initial state, via exhaustive expansion.
inline std::uint32_t optimal_plan_length(const GroundedProblem& problem, const ExpansionLimits& limits = {}) {
    auto ts = expand(problem, limits);
    auto d = ts.goal_distance[ts.init];
    if (d == kUnreachable)
        throw Error(ErrorCode::Unsolvable, "no goal state is reachable from the initial state");
    return d;
}

// Binary cache container:
//   "GPTS" magic, version byte, atom table, state bitsets, adjacency.
// All integers are little-endian u32.
namespace detail {

inline constexpr char kTsMagic[4] = {'G', 'P', 'T', 'S'};
inline constexpr std::uint8_t kTsVersion = 1;

inline void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw Error(ErrorCode::FormatError, "truncated binary file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

} // namespace detail

inline void write_transition_system(std::ostream& out, const TransitionSystem& ts, const GroundedProblem& problem) {
    using detail::put_u32;
    out.write(detail::kTsMagic, 4);
    out.put(static_cast<char>(detail::kTsVersion));
    const auto n_atoms = static_cast<std::uint32_t>(problem.atom_count());
    put_u32(out, n_atoms);
    for (AtomId a = 0; a < n_atoms; ++a) {
        auto g = problem.atom(a);
        put_u32(out, g.predicate);
        put_u32(out, static_cast<std::uint32_t>(g.args.size()));
        for (auto o : g.args)
            put_u32(out, o);
    }
    put_u32(out, static_cast<std::uint32_t>(ts.states.size()));
    put_u32(out, ts.init);
    const std::size_t bytes = (n_atoms + 7) / 8;
    std::vector<unsigned char> bits(bytes);
    for (StateId s = 0; s < ts.states.size(); ++s) {
        std::fill(bits.begin(), bits.end(), 0);
        for (AtomId a : ts.states[s])
            bits[a / 8] |= static_cast<unsigned char>(1u << (a % 8));
        out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bytes));
        out.put(ts.goal_flags[s] ? 1 : 0);
        put_u32(out, ts.goal_distance[s]);
    }
    for (const auto& succ : ts.successors) {
        put_u32(out, static_cast<std::uint32_t>(succ.size()));
        for (const auto& t : succ) {
            put_u32(out, t.action);
            put_u32(out, t.target);
        }
    }
    if (!out)
        throw Error(ErrorCode::IoError, "failed writing transition system");
}

/// Reads a cached system. When a problem is given, its atom table must match
/// the stored one.
inline TransitionSystem read_transition_system(std::istream& in, const GroundedProblem* problem = nullptr) {
    using detail::get_u32;
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, detail::kTsMagic, 4) != 0)
        throw Error(ErrorCode::FormatError, "not a transition-system file");
    int version = in.get();
    if (version != detail::kTsVersion)
        throw Error(ErrorCode::FormatError, "unsupported transition-system version " + std::to_string(version));
    const std::uint32_t n_atoms = get_u32(in);
    for (AtomId a = 0; a < n_atoms; ++a) {
        pddl::GroundAtom g;
        g.predicate = get_u32(in);
        std::uint32_t arity = get_u32(in);
        for (std::uint32_t j = 0; j < arity; ++j)
            g.args.push_back(get_u32(in));
        if (problem && (a >= problem->atom_count() || problem->atom(a) != g))
            throw Error(ErrorCode::SignatureMismatch, "cached atom table does not match the instance");
    }
    if (problem && problem->atom_count() != n_atoms)
        throw Error(ErrorCode::SignatureMismatch, "cached atom table does not match the instance");
    TransitionSystem ts;
    const std::uint32_t n_states = get_u32(in);
    ts.init = get_u32(in);
    const std::size_t bytes = (n_atoms + 7) / 8;
    std::vector<unsigned char> bits(bytes);
    for (StateId s = 0; s < n_states; ++s) {
        if (!in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bytes)))
            throw Error(ErrorCode::FormatError, "truncated state bitset");
        State st;
        for (AtomId a = 0; a < n_atoms; ++a)
            if (bits[a / 8] & (1u << (a % 8)))
                st.push_back(a);
        ts.states.push_back(std::move(st));
        ts.goal_flags.push_back(static_cast<char>(in.get()));
        ts.goal_distance.push_back(get_u32(in));
    }
    ts.successors.resize(n_states);
    for (StateId s = 0; s < n_states; ++s) {
        std::uint32_t count = get_u32(in);
        for (std::uint32_t i = 0; i < count; ++i) {
            Transition t;
            t.action = get_u32(in);
            t.target = get_u32(in);
            if (t.target >= n_states)
                throw Error(ErrorCode::FormatError, "successor index out of range");
            ts.successors[s].push_back(t);
        }
    }
    return ts;
}

/// Histogram of goal distances; key kUnreachable counts dead ends.
inline std::map<std::uint32_t, std::size_t> distance_histogram(const TransitionSystem& ts) {
    std::map<std::uint32_t, std::size_t> h;
    for (auto d : ts.goal_distance)
        ++h[d];
    return h;
}

} // namespace genplan
