#pragma once

#include "genplan/ad/params.hpp"
#include "genplan/ad/tensor.hpp"
#include "genplan/error.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace genplan::ad {

class Graph;

enum class Op : std::uint8_t {
    Constant,
    Parameter,
    Linear,
    Add,
    Sub,
    Mul,
    Scale,
    Mish,
    Sigmoid,
    Log,
    ConcatCols,
    ConcatRows,
    GatherRows,
    Reshape,
    SegmentSum,
    SegmentMax,
    SegmentSmoothMax,
    Softmax,
    Sum,
    WeightedSum,
    HalfSquare,
    BinaryCrossEntropy,
};

enum class Aggregation : std::uint8_t { Sum = 0, Max = 1, SmoothMax = 2 };

/// Lower clamp for probabilities inside binary cross-entropy.
inline constexpr double kBceClamp = 1e-7;

/// Handle to a node of a Graph.
class Var {
public:
    Var() = default;
    Var(Graph* g, std::uint32_t id) : graph_(g), id_(id) {}

    std::uint32_t id() const { return id_; }
    Graph* graph() const { return graph_; }
    const Tensor& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    real item() const { return value().item(); }
    real operator[](std::size_t i) const { return value()[i]; }

private:
    Graph* graph_ = nullptr;
    std::uint32_t id_ = 0;
};

/// Records a computation as it is evaluated, so that backward() can replay it
/// in reverse. Nodes are appended in evaluation order, which is a topological
/// order; backward visits them in reverse, each once.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    std::size_t node_count() const { return nodes_.size(); }

    void clear() {
        nodes_.clear();
        param_nodes_.clear();
    }

    const Tensor& value(std::uint32_t id) const {
        const auto& n = nodes_[id];
        return n.external ? *n.external : n.value;
    }
    const Tensor& grad(Var v) const { return nodes_[v.id()].grad; }

    Var constant(Tensor t) {
        Node n;
        n.op = Op::Constant;
        n.value = std::move(t);
        return push(std::move(n));
    }

    /// Leaf for a trainable tensor; repeated uses share one node.
    Var param(Parameter& p) {
        auto it = param_nodes_.find(&p);
        if (it != param_nodes_.end())
            return Var(this, it->second);
        Node n;
        n.op = Op::Parameter;
        n.param = &p;
        n.external = &p.value;
        n.needs_grad = true;
        Var v = push(std::move(n));
        param_nodes_.emplace(&p, v.id());
        return v;
    }

    /// x[n,in] * w[in,out] + b[1,out]
    Var linear(Var x, Var w, Var b) {
        const auto& X = x.value();
        const auto& W = w.value();
        const auto& B = b.value();
        if (X.cols() != W.rows() || B.rows() != 1 || B.cols() != W.cols())
            throw Error(ErrorCode::ShapeMismatch, "linear: input " + dims(X) + ", weight " + dims(W) + ", bias " +
                                                      dims(B));
        const std::size_t n = X.rows(), in = X.cols(), out = W.cols();
        Tensor Y(n, out);
        for (std::size_t i = 0; i < n; ++i) {
            real* y = Y.data() + i * out;
            for (std::size_t j = 0; j < out; ++j)
                y[j] = B[j];
            const real* xr = X.data() + i * in;
            for (std::size_t k = 0; k < in; ++k) {
                const real xk = xr[k];
                if (xk == 0)
                    continue;
                const real* wr = W.data() + k * out;
                for (std::size_t j = 0; j < out; ++j)
                    y[j] += xk * wr[j];
            }
        }
        return make(Op::Linear, std::move(Y), {x, w, b});
    }

    Var add(Var a, Var b) {
        require_same(a, b, "add");
        Tensor y = a.value();
        y += b.value();
        return make(Op::Add, std::move(y), {a, b});
    }

    Var sub(Var a, Var b) {
        require_same(a, b, "sub");
        Tensor y = a.value();
        const auto& B = b.value();
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] -= B[i];
        return make(Op::Sub, std::move(y), {a, b});
    }

    /// Elementwise product.
    Var mul(Var a, Var b) {
        require_same(a, b, "mul");
        Tensor y = a.value();
        const auto& B = b.value();
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] *= B[i];
        return make(Op::Mul, std::move(y), {a, b});
    }

    Var scale(Var a, real c) {
        Tensor y = a.value();
        for (auto& v : y.values())
            v *= c;
        Var out = make(Op::Scale, std::move(y), {a});
        nodes_[out.id()].scalar = c;
        return out;
    }

    /// x * tanh(softplus(x)), elementwise.
    Var mish(Var x) {
        const auto& X = x.value();
        Tensor y(X.rows(), X.cols());
        for (std::size_t i = 0; i < X.size(); ++i)
            y[i] = X[i] * std::tanh(softplus(X[i]));
        return make(Op::Mish, std::move(y), {x});
    }

    Var sigmoid(Var x) {
        const auto& X = x.value();
        Tensor y(X.rows(), X.cols());
        for (std::size_t i = 0; i < X.size(); ++i)
            y[i] = logistic(X[i]);
        return make(Op::Sigmoid, std::move(y), {x});
    }

    Var log(Var x) {
        const auto& X = x.value();
        Tensor y(X.rows(), X.cols());
        for (std::size_t i = 0; i < X.size(); ++i)
            y[i] = std::log(X[i]);
        return make(Op::Log, std::move(y), {x});
    }

    Var concat_cols(Var a, Var b) {
        const auto& A = a.value();
        const auto& B = b.value();
        if (A.rows() != B.rows())
            throw Error(ErrorCode::ShapeMismatch, "concat_cols: " + dims(A) + " and " + dims(B));
        Tensor y(A.rows(), A.cols() + B.cols());
        for (std::size_t r = 0; r < A.rows(); ++r) {
            std::copy_n(A.data() + r * A.cols(), A.cols(), y.data() + r * y.cols());
            std::copy_n(B.data() + r * B.cols(), B.cols(), y.data() + r * y.cols() + A.cols());
        }
        return make(Op::ConcatCols, std::move(y), {a, b});
    }

    Var concat_rows(std::span<const Var> parts) {
        if (parts.empty())
            throw Error(ErrorCode::EmptyInput, "concat_rows of nothing");
        const std::size_t cols = parts.front().cols();
        std::size_t rows = 0;
        for (const auto& p : parts) {
            if (p.cols() != cols)
                throw Error(ErrorCode::ShapeMismatch, "concat_rows: column counts differ");
            rows += p.rows();
        }
        Tensor y(rows, cols);
        std::size_t at = 0;
        for (const auto& p : parts) {
            std::copy_n(p.value().data(), p.value().size(), y.data() + at);
            at += p.value().size();
        }
        return make(Op::ConcatRows, std::move(y), parts);
    }

    /// Rows of x selected (with repetition) by index.
    Var gather_rows(Var x, std::vector<std::uint32_t> index) {
        const auto& X = x.value();
        Tensor y(index.size(), X.cols());
        for (std::size_t r = 0; r < index.size(); ++r) {
            if (index[r] >= X.rows())
                throw Error(ErrorCode::ShapeMismatch, "gather_rows: index out of range");
            std::copy_n(X.data() + index[r] * X.cols(), X.cols(), y.data() + r * X.cols());
        }
        Var out = make(Op::GatherRows, std::move(y), {x});
        nodes_[out.id()].index = std::move(index);
        return out;
    }

    Var reshape(Var x, std::size_t rows, std::size_t cols) {
        Tensor y = x.value();
        y.reshape(rows, cols);
        return make(Op::Reshape, std::move(y), {x});
    }

    /// Aggregates the rows of x into `segments` rows; row r goes to segment[r].
    /// Segments that receive no row are zero.
    Var segment_aggregate(Var x, std::vector<std::uint32_t> segment, std::size_t segments, Aggregation mode,
                          real temperature = 1) {
        const auto& X = x.value();
        if (segment.size() != X.rows())
            throw Error(ErrorCode::DimensionMismatch, "segment_aggregate: one segment id per row is required");
        const std::size_t cols = X.cols();
        Tensor y(segments, cols);
        Tensor aux;
        for (auto s : segment)
            if (s >= segments)
                throw Error(ErrorCode::DimensionMismatch, "segment_aggregate: segment id out of range");
        Op op = Op::SegmentSum;
        if (mode == Aggregation::Sum) {
            for (std::size_t r = 0; r < X.rows(); ++r) {
                real* dst = y.data() + segment[r] * cols;
                const real* src = X.data() + r * cols;
                for (std::size_t c = 0; c < cols; ++c)
                    dst[c] += src[c];
            }
        } else if (mode == Aggregation::Max) {
            op = Op::SegmentMax;
            // aux holds the winning row per output entry (or -1).
            aux = Tensor(segments, cols, -1);
            for (std::size_t r = 0; r < X.rows(); ++r) {
                const std::size_t s = segment[r];
                for (std::size_t c = 0; c < cols; ++c) {
                    const real v = X(r, c);
                    if (aux(s, c) < 0 || v > y(s, c)) {
                        y(s, c) = v;
                        aux(s, c) = static_cast<real>(r);
                    }
                }
            }
        } else {
            op = Op::SegmentSmoothMax;
            if (!(temperature > 0))
                throw Error(ErrorCode::InvalidArgument, "smooth-max temperature must be positive");
            // temperature * log(sum exp(x / temperature)), shifted by the max.
            Tensor mx(segments, cols, -std::numeric_limits<real>::infinity());
            for (std::size_t r = 0; r < X.rows(); ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    mx(segment[r], c) = std::max(mx(segment[r], c), X(r, c));
            Tensor sum(segments, cols);
            for (std::size_t r = 0; r < X.rows(); ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    sum(segment[r], c) += std::exp((X(r, c) - mx(segment[r], c)) / temperature);
            for (std::size_t s = 0; s < segments; ++s)
                for (std::size_t c = 0; c < cols; ++c)
                    y(s, c) = sum(s, c) > 0 ? mx(s, c) + temperature * std::log(sum(s, c)) : 0;
        }
        Var out = make(op, std::move(y), {x});
        auto& n = nodes_[out.id()];
        n.index = std::move(segment);
        n.aux = std::move(aux);
        n.scalar = temperature;
        return out;
    }

    /// Softmax over all entries, with max subtraction.
    Var softmax(Var x) {
        const auto& X = x.value();
        if (X.empty())
            throw Error(ErrorCode::EmptyInput, "softmax of an empty vector");
        real mx = -std::numeric_limits<real>::infinity();
        for (real v : X.values()) {
            if (!std::isfinite(v))
                throw Error(ErrorCode::NonFiniteInput, "softmax input is not finite");
            mx = std::max(mx, v);
        }
        Tensor y(X.rows(), X.cols());
        real total = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            y[i] = std::exp(X[i] - mx);
            total += y[i];
        }
        for (auto& v : y.values())
            v /= total;
        return make(Op::Softmax, std::move(y), {x});
    }

    Var sum(Var x) {
        real s = 0;
        for (real v : x.value().values())
            s += v;
        return make(Op::Sum, Tensor::scalar(s), {x});
    }

    /// sum_i c_i x_i with constant coefficients.
    Var weighted_sum(Var x, std::vector<real> coeffs) {
        if (coeffs.size() != x.value().size())
            throw Error(ErrorCode::DimensionMismatch, "weighted_sum: one coefficient per entry is required");
        real s = 0;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            s += coeffs[i] * x.value()[i];
        Var out = make(Op::WeightedSum, Tensor::scalar(s), {x});
        const std::size_t n = coeffs.size();
        nodes_[out.id()].aux = Tensor(1, n, std::move(coeffs));
        return out;
    }

    /// sum_i x_i^2 / 2
    Var half_square(Var x) {
        real s = 0;
        for (real v : x.value().values())
            s += v * v / 2;
        return make(Op::HalfSquare, Tensor::scalar(s), {x});
    }

    /// sum_i -(t_i log p_i + (1 - t_i) log(1 - p_i)), p clamped to [1e-7, 1 - 1e-7].
    Var binary_cross_entropy(Var p, std::vector<real> targets) {
        const auto& P = p.value();
        if (targets.size() != P.size())
            throw Error(ErrorCode::DimensionMismatch, "binary_cross_entropy: one target per prediction");
        real s = 0;
        for (std::size_t i = 0; i < P.size(); ++i) {
            const real q = clamp_probability(P[i]);
            s -= targets[i] * std::log(q) + (1 - targets[i]) * std::log(1 - q);
        }
        Var out = make(Op::BinaryCrossEntropy, Tensor::scalar(s), {p});
        const std::size_t n = targets.size();
        nodes_[out.id()].aux = Tensor(1, n, std::move(targets));
        return out;
    }

    /// Reverse pass from a 1x1 root. Gradients of parameter leaves are added
    /// to Parameter::grad.
    void backward(Var root) {
        auto& r = nodes_.at(root.id());
        if (value(root.id()).size() != 1)
            throw Error(ErrorCode::NonScalarRoot, "backward needs a scalar root, got " + dims(value(root.id())));
        for (auto& n : nodes_)
            n.grad = Tensor();
        r.grad = Tensor(1, 1, real(1));
        for (std::size_t i = root.id() + 1; i-- > 0;) {
            auto& n = nodes_[i];
            if (!n.needs_grad || n.grad.empty())
                continue;
            backward_node(static_cast<std::uint32_t>(i));
        }
        for (auto& [p, id] : param_nodes_) {
            const auto& g = nodes_[id].grad;
            if (g.empty())
                continue;
            p->grad += g;
            p->has_grad = true;
        }
    }

    static real softplus(real x) { return x > 20 ? x : std::log1p(std::exp(x)); }
    static real logistic(real x) {
        if (x >= 0)
            return 1 / (1 + std::exp(-x));
        const real e = std::exp(x);
        return e / (1 + e);
    }
    static real clamp_probability(real p) {
        return std::clamp<real>(p, static_cast<real>(kBceClamp), static_cast<real>(1 - kBceClamp));
    }

private:
    struct Node {
        Op op = Op::Constant;
        Tensor value;
        const Tensor* external = nullptr;
        Tensor grad;
        std::vector<std::uint32_t> inputs;
        std::vector<std::uint32_t> index;
        Tensor aux;
        real scalar = 0;
        Parameter* param = nullptr;
        bool needs_grad = false;
    };

    static std::string dims(const Tensor& t) { return "[" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "]"; }

    static void require_same(Var a, Var b, const char* what) {
        if (!a.value().same_shape(b.value()))
            throw Error(ErrorCode::ShapeMismatch,
                        std::string(what) + ": " + dims(a.value()) + " and " + dims(b.value()));
    }

    Var push(Node n) {
        nodes_.push_back(std::move(n));
        return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
    }

    Var make(Op op, Tensor value, std::initializer_list<Var> inputs) {
        return make(op, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()));
    }

    Var make(Op op, Tensor value, std::span<const Var> inputs) {
        Node n;
        n.op = op;
        n.value = std::move(value);
        for (const auto& v : inputs) {
            if (v.graph() != this)
                throw Error(ErrorCode::InvalidArgument, "operands belong to a different graph");
            n.inputs.push_back(v.id());
            n.needs_grad = n.needs_grad || nodes_[v.id()].needs_grad;
        }
        return push(std::move(n));
    }

    /// Gradient buffer of input k of node, allocated on first use; null if
    /// that input does not need a gradient.
    Tensor* input_grad(const Node& n, std::size_t k) {
        auto& in = nodes_[n.inputs[k]];
        if (!in.needs_grad)
            return nullptr;
        if (in.grad.empty()) {
            const auto& v = value(n.inputs[k]);
            in.grad = Tensor(v.rows(), v.cols());
        }
        return &in.grad;
    }

    void backward_node(std::uint32_t id) {
        // Copy what we need: input_grad may reallocate nothing, but keep the
        // references local for clarity.
        Node& n = nodes_[id];
        const Tensor& G = n.grad;
        const Tensor& Y = n.value;
        switch (n.op) {
        case Op::Constant:
        case Op::Parameter:
            return;
        case Op::Linear: {
            const auto& X = value(n.inputs[0]);
            const auto& W = value(n.inputs[1]);
            const std::size_t rows = X.rows(), in = X.cols(), out = W.cols();
            if (Tensor* dX = input_grad(n, 0)) {
                for (std::size_t i = 0; i < rows; ++i) {
                    const real* g = G.data() + i * out;
                    real* dx = dX->data() + i * in;
                    for (std::size_t k = 0; k < in; ++k) {
                        const real* w = W.data() + k * out;
                        real s = 0;
                        for (std::size_t j = 0; j < out; ++j)
                            s += g[j] * w[j];
                        dx[k] += s;
                    }
                }
            }
            if (Tensor* dW = input_grad(n, 1)) {
                for (std::size_t i = 0; i < rows; ++i) {
                    const real* g = G.data() + i * out;
                    const real* x = X.data() + i * in;
                    for (std::size_t k = 0; k < in; ++k) {
                        const real xk = x[k];
                        if (xk == 0)
                            continue;
                        real* dw = dW->data() + k * out;
                        for (std::size_t j = 0; j < out; ++j)
                            dw[j] += xk * g[j];
                    }
                }
            }
            if (Tensor* dB = input_grad(n, 2)) {
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < out; ++j)
                        (*dB)[j] += G[i * out + j];
            }
            return;
        }
        case Op::Add:
        case Op::Sub: {
            const real sign = n.op == Op::Add ? 1 : -1;
            if (Tensor* dA = input_grad(n, 0))
                *dA += G;
            if (Tensor* dB = input_grad(n, 1))
                for (std::size_t i = 0; i < G.size(); ++i)
                    (*dB)[i] += sign * G[i];
            return;
        }
        case Op::Mul: {
            const auto& A = value(n.inputs[0]);
            const auto& B = value(n.inputs[1]);
            if (Tensor* dA = input_grad(n, 0))
                for (std::size_t i = 0; i < G.size(); ++i)
                    (*dA)[i] += G[i] * B[i];
            if (Tensor* dB = input_grad(n, 1))
                for (std::size_t i = 0; i < G.size(); ++i)
                    (*dB)[i] += G[i] * A[i];
            return;
        }
        case Op::Scale: {
            if (Tensor* dA = input_grad(n, 0))
                for (std::size_t i = 0; i < G.size(); ++i)
                    (*dA)[i] += n.scalar * G[i];
            return;
        }
        case Op::Mish: {
            const auto& X = value(n.inputs[0]);
            if (Tensor* dX = input_grad(n, 0)) {
                for (std::size_t i = 0; i < G.size(); ++i) {
                    const real x = X[i];
                    const real t = std::tanh(softplus(x));
                    (*dX)[i] += G[i] * (t + x * (1 - t * t) * logistic(x));
                }
            }
            return;
        }
        case Op::Sigmoid: {
            if (Tensor* dX = input_grad(n, 0))
                for (std::size_t i = 0; i < G.size(); ++i)
                    (*dX)[i] += G[i] * Y[i] * (1 - Y[i]);
            return;
        }
        case Op::Log: {
            const auto& X = value(n.inputs[0]);
            if (Tensor* dX = input_grad(n, 0))
                for (std::size_t i = 0; i < G.size(); ++i)
                    (*dX)[i] += G[i] / X[i];
            return;
        }
        case Op::ConcatCols: {
            const std::size_t ca = value(n.inputs[0]).cols();
            const std::size_t cb = value(n.inputs[1]).cols();
            const std::size_t cols = ca + cb;
            if (Tensor* dA = input_grad(n, 0))
                for (std::size_t r = 0; r < dA->rows(); ++r)
                    for (std::size_t c = 0; c < ca; ++c)
                        (*dA)(r, c) += G[r * cols + c];
            if (Tensor* dB = input_grad(n, 1))
                for (std::size_t r = 0; r < dB->rows(); ++r)
                    for (std::size_t c = 0; c < cb; ++c)
                        (*dB)(r, c) += G[r * cols + ca + c];
            return;
        }
        case Op::ConcatRows: {
            std::size_t at = 0;
            for (std::size_t k = 0; k < n.inputs.size(); ++k) {
                const std::size_t size = value(n.inputs[k]).size();
                if (Tensor* d = input_grad(n, k))
                    for (std::size_t i = 0; i < size; ++i)
                        (*d)[i] += G[at + i];
                at += size;
            }
            return;
        }
        case Op::GatherRows: {
            if (Tensor* dX = input_grad(n, 0)) {
                const std::size_t cols = dX->cols();
                for (std::size_t r = 0; r < n.index.size(); ++r) {
                    real* dst = dX->data() + n.index[r] * cols;
                    const real* src = G.data() + r * cols;
                    for (std::size_t c = 0; c < cols; ++c)
                        dst[c] += src[c];
                }
            }
            return;
        }
        case Op::Reshape: {
            if (Tensor* dX = input_grad(n, 0))
                for (std::size_t i = 0; i < G.size(); ++i)
                    (*dX)[i] += G[i];
            return;
        }
        case Op::SegmentSum: {
            if (Tensor* dX = input_grad(n, 0)) {
                const std::size_t cols = dX->cols();
                for (std::size_t r = 0; r < n.index.size(); ++r) {
                    const real* src = G.data() + n.index[r] * cols;
                    real* dst = dX->data() + r * cols;
                    for (std::size_t c = 0; c < cols; ++c)
                        dst[c] += src[c];
                }
            }
            return;
        }
        case Op::SegmentMax: {
            if (Tensor* dX = input_grad(n, 0)) {
                const std::size_t cols = dX->cols();
                for (std::size_t s = 0; s < n.aux.rows(); ++s)
                    for (std::size_t c = 0; c < cols; ++c)
                        if (n.aux(s, c) >= 0)
                            (*dX)(static_cast<std::size_t>(n.aux(s, c)), c) += G(s, c);
            }
            return;
        }
        case Op::SegmentSmoothMax: {
            const auto& X = value(n.inputs[0]);
            if (Tensor* dX = input_grad(n, 0)) {
                const std::size_t cols = dX->cols();
                for (std::size_t r = 0; r < n.index.size(); ++r) {
                    const std::size_t s = n.index[r];
                    for (std::size_t c = 0; c < cols; ++c)
                        (*dX)(r, c) += G(s, c) * std::exp((X(r, c) - Y(s, c)) / n.scalar);
                }
            }
            return;
        }
        case Op::Softmax: {
            if (Tensor* dX = input_grad(n, 0)) {
                real dot = 0;
                for (std::size_t i = 0; i < Y.size(); ++i)
                    dot += G[i] * Y[i];
                for (std::size_t i = 0; i < Y.size(); ++i)
                    (*dX)[i] += Y[i] * (G[i] - dot);
            }
            return;
        }
        case Op::Sum: {
            if (Tensor* dX = input_grad(n, 0))
                for (auto& v : dX->values())
                    v += G[0];
            return;
        }
        case Op::WeightedSum: {
            if (Tensor* dX = input_grad(n, 0))
                for (std::size_t i = 0; i < dX->size(); ++i)
                    (*dX)[i] += G[0] * n.aux[i];
            return;
        }
        case Op::HalfSquare: {
            const auto& X = value(n.inputs[0]);
            if (Tensor* dX = input_grad(n, 0))
                for (std::size_t i = 0; i < dX->size(); ++i)
                    (*dX)[i] += G[0] * X[i];
            return;
        }
        case Op::BinaryCrossEntropy: {
            const auto& P = value(n.inputs[0]);
            if (Tensor* dP = input_grad(n, 0)) {
                for (std::size_t i = 0; i < dP->size(); ++i) {
                    const real q = clamp_probability(P[i]);
                    const real t = n.aux[i];
                    (*dP)[i] += G[0] * (-t / q + (1 - t) / (1 - q));
                }
            }
            return;
        }
        }
    }

    // A deque keeps value references valid while the tape grows.
    std::deque<Node> nodes_;
    std::unordered_map<Parameter*, std::uint32_t> param_nodes_;
};

inline const Tensor& Var::value() const { return graph_->value(id_); }

} // namespace genplan::ad
