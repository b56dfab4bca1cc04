#pragma once

#include "genplan/ad/graph.hpp"
#include "genplan/ad/layers.hpp"
#include "genplan/ad/params.hpp"
#include "genplan/error.hpp"
#include "genplan/pddl/grounder.hpp"
#include "genplan/pddl/model.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace genplan::gnn {

using ad::Aggregation;
using ad::Graph;
using ad::Group;
using ad::real;
using ad::Tensor;
using ad::Var;

struct GnnConfig {
    std::size_t k = 16;
    std::size_t layers = 4;
    Aggregation aggregation = Aggregation::Sum;
    double smooth_temperature = 1.0;
    std::uint64_t seed = 0;
};

inline std::string_view to_string(Aggregation a) {
    switch (a) {
    case Aggregation::Sum: return "sum";
    case Aggregation::Max: return "max";
    case Aggregation::SmoothMax: return "smooth_max";
    }
    return "?";
}

inline Aggregation parse_aggregation(std::string_view s) {
    if (s == "sum")
        return Aggregation::Sum;
    if (s == "max")
        return Aggregation::Max;
    if (s == "smooth_max" || s == "smooth-max")
        return Aggregation::SmoothMax;
    throw Error(ErrorCode::InvalidArgument, "unknown aggregator " + std::string(s));
}

struct PredicateSignature {
    std::string name;
    std::uint32_t arity = 0;
    pddl::PredicateKind kind = pddl::PredicateKind::Base;
    bool operator==(const PredicateSignature&) const = default;
};

using DomainSignature = std::vector<PredicateSignature>;

inline DomainSignature signature_of(const pddl::DomainModel& d) {
    DomainSignature sig;
    for (const auto& p : d.predicates)
        sig.push_back({p.name, p.arity, p.kind});
    return sig;
}

/// A state as the network sees it: an object count and the true atoms.
struct RelationalState {
    std::uint32_t object_count = 0;
    std::vector<pddl::GroundAtom> atoms;
    bool operator==(const RelationalState&) const = default;
};

inline RelationalState relational_state(const pddl::GroundedProblem& problem, const pddl::State& s) {
    RelationalState r;
    r.object_count = static_cast<std::uint32_t>(problem.object_count());
    r.atoms.reserve(s.size());
    for (auto a : s)
        r.atoms.push_back(problem.atom(a));
    return r;
}

/// Several states packed into one disjoint union of object sets.
class GraphBatch {
public:
    explicit GraphBatch(std::size_t predicate_count) : predicate_objects_(predicate_count) {}

    std::size_t add(const RelationalState& s, const DomainSignature& sig) {
        const auto offset = static_cast<std::uint32_t>(object_total_);
        for (const auto& atom : s.atoms) {
            if (atom.predicate >= sig.size())
                throw Error(ErrorCode::SignatureMismatch,
                            "atom predicate " + std::to_string(atom.predicate) + " is not in the model signature");
            if (atom.args.size() != sig[atom.predicate].arity)
                throw Error(ErrorCode::ArityMismatch, "atom of " + sig[atom.predicate].name + " has wrong arity");
            for (auto o : atom.args)
                if (o >= s.object_count)
                    throw Error(ErrorCode::UnknownObjectInAtom,
                                "object " + std::to_string(o) + " in an atom of " + sig[atom.predicate].name +
                                    " exceeds the object count " + std::to_string(s.object_count));
            auto& dst = predicate_objects_[atom.predicate];
            for (auto o : atom.args)
                dst.push_back(offset + o);
        }
        offsets_.push_back(offset);
        counts_.push_back(s.object_count);
        for (std::uint32_t i = 0; i < s.object_count; ++i)
            object_state_.push_back(static_cast<std::uint32_t>(offsets_.size() - 1));
        object_total_ += s.object_count;
        return offsets_.size() - 1;
    }

    std::size_t state_count() const { return offsets_.size(); }
    std::size_t object_total() const { return object_total_; }
    std::uint32_t offset(std::size_t state) const { return offsets_[state]; }
    std::uint32_t object_count(std::size_t state) const { return counts_[state]; }
    const std::vector<std::uint32_t>& object_state() const { return object_state_; }
    /// Flat global object indices of every atom of predicate p, atom after atom.
    const std::vector<std::uint32_t>& predicate_objects(std::size_t p) const { return predicate_objects_[p]; }

private:
    std::size_t object_total_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> object_state_;
    std::vector<std::vector<std::uint32_t>> predicate_objects_;
};

/// Object embeddings of a batch, [object_total, k].
struct Embedding {
    Var objects;
    const GraphBatch* batch = nullptr;
};

class PolicyModel {
public:
    PolicyModel(DomainSignature signature, GnnConfig config) : signature_(std::move(signature)), config_(config) {
        if (config_.k < 1 || config_.layers < 1)
            throw Error(ErrorCode::InvalidArgument, "k and L must be at least 1");
        build();
    }
    PolicyModel(const pddl::DomainModel& domain, GnnConfig config) : PolicyModel(signature_of(domain), config) {}

    PolicyModel(const PolicyModel& o) : signature_(o.signature_), config_(o.config_) {
        build();
        store_.copy_values_from(o.store_);
    }
    PolicyModel& operator=(const PolicyModel& o) {
        if (this != &o) {
            if (o.signature_ != signature_ || o.config_.k != config_.k || o.config_.layers != config_.layers)
                throw Error(ErrorCode::SignatureMismatch, "assigning a model with a different layout");
            config_ = o.config_;
            store_.copy_values_from(o.store_);
        }
        return *this;
    }
    PolicyModel(PolicyModel&&) noexcept = default;
    PolicyModel& operator=(PolicyModel&&) noexcept = default;

    const DomainSignature& signature() const { return signature_; }
    const GnnConfig& config() const { return config_; }
    ad::ParameterStore& parameters() { return store_; }
    const ad::ParameterStore& parameters() const { return store_; }

    GraphBatch make_batch() const { return GraphBatch(signature_.size()); }

    Embedding embed(Graph& g, const GraphBatch& batch) const {
        const std::size_t k = config_.k;
        const std::size_t n = batch.object_total();
        Var f = g.constant(Tensor(n, k));
        // Message targets do not change across layers.
        std::vector<std::uint32_t> targets;
        for (std::size_t p = 0; p < signature_.size(); ++p)
            if (signature_[p].arity > 0) {
                const auto& idx = batch.predicate_objects(p);
                targets.insert(targets.end(), idx.begin(), idx.end());
            }
        for (std::size_t layer = 0; layer < config_.layers; ++layer) {
            std::vector<Var> parts;
            for (std::size_t p = 0; p < signature_.size(); ++p) {
                const std::size_t m = signature_[p].arity;
                const auto& idx = batch.predicate_objects(p);
                if (m == 0 || idx.empty())
                    continue;
                const std::size_t atoms = idx.size() / m;
                Var x = g.reshape(g.gather_rows(f, idx), atoms, m * k);
                Var y = messages_[p](g, x);
                parts.push_back(g.reshape(y, atoms * m, k));
            }
            Var aggregated = parts.empty()
                                 ? g.constant(Tensor(n, k))
                                 : g.segment_aggregate(g.concat_rows(parts), targets, n, config_.aggregation,
                                                       static_cast<real>(config_.smooth_temperature));
            f = update_(g, g.concat_cols(f, aggregated));
        }
        return {f, &batch};
    }

    /// Sum of object embeddings per state, [states, k].
    Var pooled(Graph& g, const Embedding& e) const {
        return g.segment_aggregate(e.objects, e.batch->object_state(), e.batch->state_count(), Aggregation::Sum);
    }

    /// V per state, [states, 1].
    Var values(Graph& g, const Embedding& e) const { return value_readout_(g, pooled(g, e)); }

    /// D per state, [states, 1], in (0, 1).
    Var descent(Graph& g, const Embedding& e) const { return g.sigmoid(descent_readout_(g, pooled(g, e))); }

    /// Logit per (state, successor) pair of batch indices, [pairs, 1].
    Var transition_logits(Graph& g, const Embedding& e, std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs)
        const {
        const auto& b = *e.batch;
        std::vector<std::uint32_t> from, to, seg;
        for (std::uint32_t i = 0; i < pairs.size(); ++i) {
            auto [s, t] = pairs[i];
            if (b.object_count(s) != b.object_count(t))
                throw Error(ErrorCode::ShapeMismatch, "a transition must keep the object set");
            for (std::uint32_t o = 0; o < b.object_count(s); ++o) {
                from.push_back(b.offset(s) + o);
                to.push_back(b.offset(t) + o);
                seg.push_back(i);
            }
        }
        Var joint = g.concat_cols(g.gather_rows(e.objects, std::move(from)), g.gather_rows(e.objects, std::move(to)));
        Var features = transition_features_(g, joint);
        Var summed = g.segment_aggregate(features, std::move(seg), pairs.size(), Aggregation::Sum);
        return transition_readout_(g, summed);
    }

    // Single-state conveniences.

    double value(const RelationalState& s) const {
        Graph g;
        auto batch = make_batch();
        batch.add(s, signature_);
        return values(g, embed(g, batch)).item();
    }

    double descent_probability(const RelationalState& s) const {
        Graph g;
        auto batch = make_batch();
        batch.add(s, signature_);
        return descent(g, embed(g, batch)).item();
    }

    std::vector<double> policy_distribution(const RelationalState& s, std::span<const RelationalState> successors) const {
        if (successors.empty())
            throw Error(ErrorCode::EmptySuccessorSet, "a policy needs at least one successor");
        Graph g;
        auto batch = make_batch();
        batch.add(s, signature_);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (const auto& t : successors)
            pairs.emplace_back(0, static_cast<std::uint32_t>(batch.add(t, signature_)));
        Var p = g.softmax(transition_logits(g, embed(g, batch), pairs));
        return {p.value().values().begin(), p.value().values().end()};
    }

    /// Embeddings of a single state, one row per object.
    Tensor object_embeddings(const RelationalState& s) const {
        Graph g;
        auto batch = make_batch();
        batch.add(s, signature_);
        return embed(g, batch).objects.value();
    }

    /// Sets every readout weight of a group to zero.
    void zero_group(Group group) {
        for (std::size_t i = 0; i < store_.size(); ++i)
            if (store_[i].group == group)
                store_[i].value.fill(0);
    }

private:
    void build() {
        std::mt19937_64 rng(config_.seed);
        const std::size_t k = config_.k;
        messages_.resize(signature_.size());
        for (std::size_t p = 0; p < signature_.size(); ++p) {
            const std::size_t m = signature_[p].arity;
            if (m == 0)
                continue;
            messages_[p] = ad::Mlp(store_, "msg." + signature_[p].name, Group::Trunk, m * k, k, m * k, rng);
        }
        update_ = ad::Mlp(store_, "update", Group::Trunk, 2 * k, k, k, rng);
        value_readout_ = ad::Mlp(store_, "value", Group::Critic, k, k, 1, rng);
        transition_features_ = ad::Mlp(store_, "transition", Group::Actor, 2 * k, k, 2 * k, rng);
        transition_readout_ = ad::Mlp(store_, "logit", Group::Actor, 2 * k, k, 1, rng);
        descent_readout_ = ad::Mlp(store_, "descent", Group::Descent, k, k, 1, rng);
    }

    DomainSignature signature_;
    GnnConfig config_;
    ad::ParameterStore store_;
    std::vector<ad::Mlp> messages_;
    ad::Mlp update_;
    ad::Mlp value_readout_;
    ad::Mlp transition_features_;
    ad::Mlp transition_readout_;
    ad::Mlp descent_readout_;
};

// Checkpoint container: "GPCK", version byte, domain signature, k, L,
// aggregator, smooth-max temperature, seed, then named parameters with their
// group, shape and little-endian 64-bit values.
namespace detail {

inline constexpr char kCkptMagic[4] = {'G', 'P', 'C', 'K'};
inline constexpr std::uint8_t kCkptVersion = 1;

inline void put_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::ostream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
inline void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint64_t get_uint(std::istream& in, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        int c = in.get();
        if (c == std::char_traits<char>::eof())
            throw Error(ErrorCode::FormatError, "truncated checkpoint");
        v |= std::uint64_t(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}
inline std::uint32_t get_u32(std::istream& in) { return static_cast<std::uint32_t>(get_uint(in, 4)); }
inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_uint(in, 8)); }
inline std::string get_string(std::istream& in) {
    const auto n = get_u32(in);
    if (n > (1u << 20))
        throw Error(ErrorCode::FormatError, "implausible string length in checkpoint");
    std::string s(n, '\0');
    if (!in.read(s.data(), n))
        throw Error(ErrorCode::FormatError, "truncated checkpoint");
    return s;
}

} // namespace detail

inline void write_checkpoint(std::ostream& out, const PolicyModel& model) {
    using namespace detail;
    out.write(kCkptMagic, 4);
    out.put(static_cast<char>(kCkptVersion));
    const auto& sig = model.signature();
    put_u32(out, static_cast<std::uint32_t>(sig.size()));
    for (const auto& p : sig) {
        put_string(out, p.name);
        put_u32(out, p.arity);
        out.put(static_cast<char>(p.kind));
    }
    const auto& c = model.config();
    put_u32(out, static_cast<std::uint32_t>(c.k));
    put_u32(out, static_cast<std::uint32_t>(c.layers));
    out.put(static_cast<char>(c.aggregation));
    put_f64(out, c.smooth_temperature);
    put_u64(out, c.seed);
    const auto& store = model.parameters();
    put_u32(out, static_cast<std::uint32_t>(store.size()));
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& p = store[i];
        put_string(out, p.name);
        out.put(static_cast<char>(p.group));
        put_u32(out, static_cast<std::uint32_t>(p.value.rows()));
        put_u32(out, static_cast<std::uint32_t>(p.value.cols()));
        for (real v : p.value.values())
            put_f64(out, static_cast<double>(v));
    }
    if (!out)
        throw Error(ErrorCode::IoError, "failed writing checkpoint");
}

/// Reads a checkpoint. When an expected signature is given it must match.
inline PolicyModel read_checkpoint(std::istream& in, const DomainSignature* expected = nullptr) {
    using namespace detail;
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kCkptMagic, 4) != 0)
        throw Error(ErrorCode::FormatError, "not a checkpoint file");
    const int version = in.get();
    if (version != kCkptVersion)
        throw Error(ErrorCode::FormatError, "unsupported checkpoint version " + std::to_string(version));
    DomainSignature sig(get_u32(in));
    for (auto& p : sig) {
        p.name = get_string(in);
        p.arity = get_u32(in);
        p.kind = static_cast<pddl::PredicateKind>(get_uint(in, 1));
    }
    if (expected && *expected != sig)
        throw Error(ErrorCode::SignatureMismatch, "checkpoint was trained on a different domain signature");
    GnnConfig c;
    c.k = get_u32(in);
    c.layers = get_u32(in);
    c.aggregation = static_cast<Aggregation>(get_uint(in, 1));
    c.smooth_temperature = get_f64(in);
    c.seed = get_uint(in, 8);
    PolicyModel model(std::move(sig), c);
    auto& store = model.parameters();
    const auto count = get_u32(in);
    if (count != store.size())
        throw Error(ErrorCode::FormatError, "checkpoint parameter count does not match the architecture");
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name = get_string(in);
        const auto group = static_cast<Group>(get_uint(in, 1));
        const auto rows = get_u32(in), cols = get_u32(in);
        auto* p = store.find(name);
        if (!p || p->group != group || p->value.rows() != rows || p->value.cols() != cols)
            throw Error(ErrorCode::FormatError, "checkpoint parameter " + name + " does not match the architecture");
        for (auto& v : p->value.values())
            v = static_cast<real>(get_f64(in));
    }
    return model;
}

inline void save_checkpoint(const std::string& path, const PolicyModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    write_checkpoint(out, model);
}

inline PolicyModel load_checkpoint(const std::string& path, const DomainSignature* expected = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    return read_checkpoint(in, expected);
}

} // namespace genplan::gnn
