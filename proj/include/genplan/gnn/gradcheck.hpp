#pragma once

#include "genplan/gnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

// Central finite-difference checks of the analytic gradients of the model
// heads with respect to every parameter scalar that can reach the head.
namespace genplan::gnn {

enum class Head { Value, LogPolicy, Descent };

inline std::string_view to_string(Head h) {
    switch (h) {
    case Head::Value: return "V";
    case Head::LogPolicy: return "log pi";
    case Head::Descent: return "D";
    }
    return "?";
}

struct GradientCheck {
    double max_relative_error = 0;
    double max_abs_gradient = 0;
    std::size_t checked = 0;
};

/// |a - b| / max(|a|, |b|, floor)
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

namespace detail {

// Scalar of one head for `state`; for the policy head, log pi of successor
// `pick` among `successors`.
inline Var head_output(Graph& g, const PolicyModel& m, Head head, const RelationalState& state,
                       std::span<const RelationalState> successors, std::uint32_t pick) {
    auto batch = m.make_batch();
    batch.add(state, m.signature());
    if (head == Head::LogPolicy)
        for (const auto& s : successors)
            batch.add(s, m.signature());
    // The embedding keeps a pointer to the batch, so it must not outlive it.
    const auto e = m.embed(g, batch);
    switch (head) {
    case Head::Value: return g.gather_rows(m.values(g, e), {0});
    case Head::Descent: return g.gather_rows(m.descent(g, e), {0});
    case Head::LogPolicy: {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (std::uint32_t i = 0; i < successors.size(); ++i)
            pairs.emplace_back(0, i + 1);
        return g.log(g.gather_rows(g.softmax(m.transition_logits(g, e, pairs)), {pick}));
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown head");
}

inline bool feeds(Group group, Head head) {
    switch (group) {
    case Group::Trunk: return true;
    case Group::Critic: return head == Head::Value;
    case Group::Actor: return head == Head::LogPolicy;
    case Group::Descent: return head == Head::Descent;
    }
    return true;
}

} // namespace detail

/// Compares backward() with (f(x+h) - f(x-h)) / 2h for every parameter of
/// the trunk and of the head's own readout. Other readouts cannot change the
/// head, so their analytic gradient must be exactly zero.
inline GradientCheck check_gradients(PolicyModel& model, Head head, const RelationalState& state,
                                     std::span<const RelationalState> successors = {}, std::uint32_t pick = 0,
                                     double h = 1e-5) {
    if (head == Head::LogPolicy && pick >= successors.size())
        throw Error(ErrorCode::EmptySuccessorSet, "policy check needs the picked successor");
    auto& store = model.parameters();
    store.zero_grad();
    {
        Graph g;
        g.backward(detail::head_output(g, model, head, state, successors, pick));
    }
    auto eval = [&] {
        Graph g;
        return static_cast<double>(detail::head_output(g, model, head, state, successors, pick).item());
    };
    GradientCheck r;
    for (std::size_t i = 0; i < store.size(); ++i) {
        auto& p = store[i];
        if (!detail::feeds(p.group, head)) {
            for (auto g : p.grad.values())
                if (g != 0)
                    r.max_relative_error = 1;
            continue;
        }
        for (std::size_t j = 0; j < p.value.size(); ++j) {
            const auto old = p.value[j];
            p.value[j] = static_cast<ad::real>(old + h);
            const double up = eval();
            p.value[j] = static_cast<ad::real>(old - h);
            const double down = eval();
            p.value[j] = old;
            const double numeric = (up - down) / (2 * h);
            const double analytic = p.grad[j];
            r.max_relative_error = std::max(r.max_relative_error, relative_error(analytic, numeric));
            r.max_abs_gradient = std::max(r.max_abs_gradient, std::abs(analytic));
            ++r.checked;
        }
    }
    store.zero_grad();
    return r;
}

} // namespace genplan::gnn
