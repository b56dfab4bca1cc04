#pragma once

#include "genplan/ad/graph.hpp"
#include "genplan/ad/params.hpp"

#include <random>
#include <string>

namespace genplan::ad {

/// y = x W + b with W of shape [in, out].
struct Linear {
    Parameter* weight = nullptr;
    Parameter* bias = nullptr;

    Linear() = default;
    Linear(ParameterStore& store, const std::string& name, Group group, std::size_t in, std::size_t out,
           std::mt19937_64& rng) {
        weight = &store.add(name + ".w", group, uniform_init(in, out, in, rng));
        bias = &store.add(name + ".b", group, uniform_init(1, out, in, rng));
    }

    std::size_t in() const { return weight->value.rows(); }
    std::size_t out() const { return weight->value.cols(); }

    Var operator()(Graph& g, Var x) const { return g.linear(x, g.param(*weight), g.param(*bias)); }

    void zero() {
        weight->value.fill(0);
        bias->value.fill(0);
    }
};

/// x + L2(mish(L1(x))), hidden width given at construction.
struct ResidualBlock {
    Linear l1;
    Linear l2;

    ResidualBlock() = default;
    ResidualBlock(ParameterStore& store, const std::string& name, Group group, std::size_t dim, std::size_t hidden,
                  std::mt19937_64& rng)
        : l1(store, name + ".l1", group, dim, hidden, rng), l2(store, name + ".l2", group, hidden, dim, rng) {}

    Var operator()(Graph& g, Var x) const {
        if (x.cols() != l1.in())
            throw Error(ErrorCode::ShapeMismatch, "residual block expects width " + std::to_string(l1.in()) +
                                                      ", got " + std::to_string(x.cols()));
        return g.add(x, l2(g, g.mish(l1(g, x))));
    }
};

/// A residual block followed by a linear layer: in -> out.
struct Mlp {
    ResidualBlock block;
    Linear head;

    Mlp() = default;
    Mlp(ParameterStore& store, const std::string& name, Group group, std::size_t in, std::size_t hidden,
        std::size_t out, std::mt19937_64& rng)
        : block(store, name + ".res", group, in, hidden, rng), head(store, name + ".out", group, in, out, rng) {}

    Var operator()(Graph& g, Var x) const { return head(g, block(g, x)); }
};

} // namespace genplan::ad
