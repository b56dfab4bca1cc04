#pragma once

#include "genplan/ad/tensor.hpp"
#include "genplan/error.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace genplan::ad {

/// Parameter groups. The message-passing trunk is shared by every readout and
/// has its own group; the readouts are critic (value), actor (transition
/// logits) and descent (the D head of the suboptimal trainer).
enum class Group : std::uint8_t { Trunk = 0, Critic = 1, Actor = 2, Descent = 3 };

inline constexpr std::size_t kGroupCount = 4;

inline std::string_view to_string(Group g) {
    switch (g) {
    case Group::Trunk: return "trunk";
    case Group::Critic: return "critic";
    case Group::Actor: return "actor";
    case Group::Descent: return "descent";
    }
    return "?";
}

struct Parameter {
    std::string name;
    Group group = Group::Trunk;
    Tensor value;
    Tensor grad;
    // Adam moments and step counter.
    Tensor first_moment;
    Tensor second_moment;
    std::uint64_t steps = 0;
    bool has_grad = false;
};

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Default learning rate of the optimizer.
inline constexpr double kDefaultLearningRate = 0.0002;

/// Owns all trainable tensors. Parameter addresses are stable.
class ParameterStore {
public:
    ParameterStore() = default;
    ParameterStore(const ParameterStore& other) { *this = other; }
    ParameterStore& operator=(const ParameterStore& other) {
        if (this == &other)
            return *this;
        params_.clear();
        for (const auto& p : other.params_)
            params_.push_back(std::make_unique<Parameter>(*p));
        return *this;
    }
    ParameterStore(ParameterStore&&) noexcept = default;
    ParameterStore& operator=(ParameterStore&&) noexcept = default;

    Parameter& add(std::string name, Group group, Tensor init) {
        if (find(name))
            throw Error(ErrorCode::DuplicateName, "parameter " + name + " already exists");
        auto p = std::make_unique<Parameter>();
        p->name = std::move(name);
        p->group = group;
        p->grad = Tensor(init.rows(), init.cols());
        p->first_moment = Tensor(init.rows(), init.cols());
        p->second_moment = Tensor(init.rows(), init.cols());
        p->value = std::move(init);
        params_.push_back(std::move(p));
        return *params_.back();
    }

    Parameter* find(std::string_view name) {
        for (auto& p : params_)
            if (p->name == name)
                return p.get();
        return nullptr;
    }
    const Parameter* find(std::string_view name) const {
        for (const auto& p : params_)
            if (p->name == name)
                return p.get();
        return nullptr;
    }

    std::size_t size() const { return params_.size(); }
    Parameter& operator[](std::size_t i) { return *params_[i]; }
    const Parameter& operator[](std::size_t i) const { return *params_[i]; }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const auto& p : params_)
            n += p->value.size();
        return n;
    }

    void zero_grad() {
        for (auto& p : params_) {
            p->grad.fill(0);
            p->has_grad = false;
        }
    }

    void zero_grad(Group g) {
        for (auto& p : params_) {
            if (p->group != g)
                continue;
            p->grad.fill(0);
            p->has_grad = false;
        }
    }

    bool has_gradients(Group g) const {
        for (const auto& p : params_)
            if (p->group == g && p->has_grad)
                return true;
        return false;
    }

    /// Euclidean norm over all gradient entries (optionally one group).
    double grad_norm() const {
        double s = 0;
        for (const auto& p : params_)
            for (real v : p->grad.values())
                s += double(v) * double(v);
        return std::sqrt(s);
    }
    double grad_norm(Group g) const {
        double s = 0;
        for (const auto& p : params_)
            if (p->group == g)
                for (real v : p->grad.values())
                    s += double(v) * double(v);
        return std::sqrt(s);
    }

    /// Flattened copy of all values, in registration order.
    std::vector<real> flat_values() const {
        std::vector<real> out;
        for (const auto& p : params_)
            out.insert(out.end(), p->value.values().begin(), p->value.values().end());
        return out;
    }
    std::vector<real> flat_grads() const {
        std::vector<real> out;
        for (const auto& p : params_)
            out.insert(out.end(), p->grad.values().begin(), p->grad.values().end());
        return out;
    }

    /// Copies values (not optimizer state) from a store with the same layout.
    void copy_values_from(const ParameterStore& other) {
        if (other.size() != size())
            throw Error(ErrorCode::ShapeMismatch, "parameter stores differ in layout");
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (!params_[i]->value.same_shape(other[i].value) || params_[i]->name != other[i].name)
                throw Error(ErrorCode::ShapeMismatch, "parameter " + params_[i]->name + " differs in layout");
            params_[i]->value = other[i].value;
        }
    }

    /// One Adam update with bias correction on every parameter of the group
    /// that received a gradient, then zeroes those gradients. Parameters with
    /// an all-zero gradient are left untouched, moments included.
    void adam_step(Group group, double learning_rate, const AdamConfig& cfg = {}) {
        if (!has_gradients(group))
            throw Error(ErrorCode::MissingGradients,
                        "no gradients recorded for group " + std::string(to_string(group)));
        for (auto& p : params_) {
            if (p->group != group || !p->has_grad)
                continue;
            auto g = p->grad.values();
            bool any = false;
            for (real v : g)
                any = any || v != 0;
            if (any) {
                ++p->steps;
                const double c1 = 1.0 - std::pow(cfg.beta1, double(p->steps));
                const double c2 = 1.0 - std::pow(cfg.beta2, double(p->steps));
                auto m = p->first_moment.values();
                auto v = p->second_moment.values();
                auto w = p->value.values();
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double gi = g[i];
                    m[i] = static_cast<real>(cfg.beta1 * m[i] + (1 - cfg.beta1) * gi);
                    v[i] = static_cast<real>(cfg.beta2 * v[i] + (1 - cfg.beta2) * gi * gi);
                    const double mhat = m[i] / c1;
                    const double vhat = v[i] / c2;
                    w[i] = static_cast<real>(w[i] - learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon));
                }
            }
            p->grad.fill(0);
            p->has_grad = false;
        }
    }

private:
    std::vector<std::unique_ptr<Parameter>> params_;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
inline Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, std::mt19937_64& rng) {
    Tensor t(rows, cols);
    const double bound = 1.0 / std::sqrt(double(std::max<std::size_t>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : t.values())
        v = static_cast<real>(dist(rng));
    return t;
}

} // namespace genplan::ad
