#include "genplan/gnn/gradcheck.hpp"
#include "genplan/gnn/model.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace genplan;
using namespace genplan::gnn;

namespace {

DomainSignature tiny_signature() {
    return {{"p", 1, pddl::PredicateKind::Base}, {"q", 2, pddl::PredicateKind::Base},
            {"r", 3, pddl::PredicateKind::Base}, {"z", 0, pddl::PredicateKind::Base}};
}

GnnConfig small(std::uint64_t seed, Aggregation agg = Aggregation::Sum) {
    GnnConfig c;
    c.k = 8;
    c.layers = 2;
    c.seed = seed;
    c.aggregation = agg;
    return c;
}

RelationalState random_state(std::uint32_t objects, std::mt19937_64& rng) {
    RelationalState s{objects, {}};
    for (std::uint32_t a = 0; a < objects; ++a) {
        if (rng() % 2)
            s.atoms.push_back({0, {a}});
        for (std::uint32_t b = 0; b < objects; ++b) {
            if (rng() % 3 == 0)
                s.atoms.push_back({1, {a, b}});
            if (rng() % 5 == 0)
                s.atoms.push_back({2, {a, b, (a + b) % objects}});
        }
    }
    return s;
}

RelationalState rename(const RelationalState& s, const std::vector<std::uint32_t>& sigma) {
    RelationalState out{s.object_count, {}};
    for (auto a : s.atoms) {
        for (auto& o : a.args)
            o = sigma[o];
        out.atoms.push_back(std::move(a));
    }
    // Atom order must not matter either.
    std::reverse(out.atoms.begin(), out.atoms.end());
    return out;
}

} // namespace

TEST(Embedding, ZeroAtomStateGivesIdenticalObjects) {
    PolicyModel m(tiny_signature(), small(1));
    const auto e = m.object_embeddings({4, {}});
    for (std::size_t o = 1; o < 4; ++o)
        for (std::size_t j = 0; j < e.cols(); ++j)
            EXPECT_EQ(e(o, j), e(0, j));
}

TEST(Embedding, AutomorphicObjectsAreEqual) {
    PolicyModel m(tiny_signature(), small(2));
    const auto e = m.object_embeddings({3, {{0, {0}}, {0, {1}}}});
    bool differs_from_c = false;
    for (std::size_t j = 0; j < e.cols(); ++j) {
        EXPECT_EQ(e(0, j), e(1, j));
        differs_from_c = differs_from_c || e(0, j) != e(2, j);
    }
    EXPECT_TRUE(differs_from_c);
}

TEST(Embedding, RenamingPermutesEmbeddings) {
    std::mt19937_64 rng(3);
    for (auto agg : {Aggregation::Sum, Aggregation::Max, Aggregation::SmoothMax}) {
        PolicyModel m(tiny_signature(), small(4, agg));
        for (int trial = 0; trial < 10; ++trial) {
            const auto s = random_state(5, rng);
            std::vector<std::uint32_t> sigma(5);
            std::iota(sigma.begin(), sigma.end(), 0);
            std::shuffle(sigma.begin(), sigma.end(), rng);
            const auto a = m.object_embeddings(s);
            const auto b = m.object_embeddings(rename(s, sigma));
            for (std::uint32_t o = 0; o < 5; ++o)
                for (std::size_t j = 0; j < a.cols(); ++j)
                    EXPECT_NEAR(a(o, j), b(sigma[o], j), 1e-9);
        }
    }
}

TEST(Invariance, ValuePolicyAndDescentUnderRenaming) {
    std::mt19937_64 rng(5);
    for (auto agg : {Aggregation::Sum, Aggregation::Max}) {
        PolicyModel m(tiny_signature(), small(6, agg));
        const double tol = agg == Aggregation::Max ? 0.0 : 1e-9;
        for (int trial = 0; trial < 10; ++trial) {
            const auto s = random_state(4, rng);
            std::vector<RelationalState> next{random_state(4, rng), random_state(4, rng), random_state(4, rng)};
            std::vector<std::uint32_t> sigma(4);
            std::iota(sigma.begin(), sigma.end(), 0);
            std::shuffle(sigma.begin(), sigma.end(), rng);
            std::vector<RelationalState> renamed_next;
            for (const auto& t : next)
                renamed_next.push_back(rename(t, sigma));
            const auto rs = rename(s, sigma);
            // Max aggregation is exact up to the order of floating-point sums
            // in the readouts, so compare with a tiny slack.
            EXPECT_NEAR(m.value(s), m.value(rs), std::max(tol, 1e-12));
            EXPECT_NEAR(m.descent_probability(s), m.descent_probability(rs), std::max(tol, 1e-12));
            const auto p = m.policy_distribution(s, next);
            const auto q = m.policy_distribution(rs, renamed_next);
            for (std::size_t i = 0; i < p.size(); ++i)
                EXPECT_NEAR(p[i], q[i], std::max(tol, 1e-12));
        }
    }
}

TEST(Invariance, GripperStatesUnderRenaming) {
    auto problem = support::gripper(3);
    const auto ts = expand(problem);
    PolicyModel m(problem.domain(), small(7));
    std::vector<std::uint32_t> sigma(problem.object_count());
    std::iota(sigma.begin(), sigma.end(), 0);
    std::mt19937_64 rng(8);
    for (StateId s = 0; s < ts.state_count(); s += 7) {
        std::shuffle(sigma.begin(), sigma.end(), rng);
        const auto r = relational_state(problem, ts.states[s]);
        EXPECT_NEAR(m.value(r), m.value(rename(r, sigma)), 1e-9);
    }
}

TEST(Readouts, ZeroWeightsGiveZeroValueAndHalfDescent) {
    std::mt19937_64 rng(9);
    PolicyModel m(tiny_signature(), small(10));
    m.zero_group(Group::Critic);
    m.zero_group(Group::Descent);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = random_state(3, rng);
        EXPECT_EQ(m.value(s), 0.0);
        EXPECT_EQ(m.descent_probability(s), 0.5);
    }
}

TEST(Policy, SingleSuccessorHasProbabilityOne) {
    PolicyModel m(tiny_signature(), small(11));
    std::mt19937_64 rng(12);
    const std::vector<RelationalState> one{random_state(3, rng)};
    EXPECT_DOUBLE_EQ(m.policy_distribution(random_state(3, rng), one)[0], 1.0);
}

TEST(Policy, SymmetricSuccessorsAreEquallyLikely) {
    PolicyModel m(tiny_signature(), small(13));
    // a and b are interchangeable in s; the two successors differ by a <-> b.
    const RelationalState s{3, {{0, {0}}, {0, {1}}, {1, {2, 2}}}};
    const std::vector<RelationalState> next{{3, {{0, {0}}, {1, {2, 2}}}}, {3, {{0, {1}}, {1, {2, 2}}}}};
    const auto p = m.policy_distribution(s, next);
    EXPECT_NEAR(p[0], 0.5, 1e-6);
    EXPECT_NEAR(p[1], 0.5, 1e-6);
}

TEST(Policy, NormalizedAndRejectsEmptySuccessorSet) {
    PolicyModel m(tiny_signature(), small(14));
    std::mt19937_64 rng(15);
    const auto s = random_state(4, rng);
    std::vector<RelationalState> next;
    for (int i = 0; i < 6; ++i)
        next.push_back(random_state(4, rng));
    const auto p = m.policy_distribution(s, next);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    try {
        m.policy_distribution(s, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptySuccessorSet);
    }
}

TEST(GraphBatch, RejectsMalformedStates) {
    const auto sig = tiny_signature();
    auto expect_code = [&](const RelationalState& s, ErrorCode code) {
        GraphBatch b(sig.size());
        try {
            b.add(s, sig);
            ADD_FAILURE() << "no error";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), code);
        }
    };
    expect_code({2, {{9, {0}}}}, ErrorCode::SignatureMismatch);
    expect_code({2, {{1, {0}}}}, ErrorCode::ArityMismatch);
    expect_code({2, {{0, {2}}}}, ErrorCode::UnknownObjectInAtom);
}

TEST(GradientCheck, AllHeads) {
    std::mt19937_64 rng(16);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        for (auto agg : {Aggregation::Sum, Aggregation::SmoothMax}) {
            PolicyModel m(tiny_signature(), small(seed, agg));
            const auto s = random_state(3, rng);
            const std::vector<RelationalState> next{random_state(3, rng), random_state(3, rng)};
            for (auto head : {Head::Value, Head::LogPolicy, Head::Descent})
                EXPECT_LT(check_gradients(m, head, s, next, 1).max_relative_error, 1e-3) << to_string(head);
        }
    }
}

TEST(Checkpoint, RoundTripPreservesOutputs) {
    std::mt19937_64 rng(17);
    PolicyModel m(tiny_signature(), small(18, Aggregation::SmoothMax));
    std::stringstream buf;
    write_checkpoint(buf, m);
    const auto sig = tiny_signature();
    const auto back = read_checkpoint(buf, &sig);
    EXPECT_EQ(back.config().k, m.config().k);
    EXPECT_EQ(back.config().aggregation, Aggregation::SmoothMax);
    EXPECT_EQ(back.parameters().flat_values(), m.parameters().flat_values());
    const auto s = random_state(3, rng);
    EXPECT_EQ(back.value(s), m.value(s));
}

TEST(Checkpoint, SignatureMismatchAndBadMagic) {
    PolicyModel m(tiny_signature(), small(19));
    std::stringstream buf;
    write_checkpoint(buf, m);
    auto other = tiny_signature();
    other[1].arity = 3;
    try {
        read_checkpoint(buf, &other);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SignatureMismatch);
    }
    std::stringstream junk("GPXX");
    EXPECT_THROW(read_checkpoint(junk), Error);
}

TEST(PolicyModel, CopyIsDeepAndSeedsReproduce) {
    PolicyModel a(tiny_signature(), small(20));
    PolicyModel b(tiny_signature(), small(20));
    EXPECT_EQ(a.parameters().flat_values(), b.parameters().flat_values());
    PolicyModel c = a;
    c.parameters()[0].value.fill(0);
    EXPECT_NE(a.parameters().flat_values(), c.parameters().flat_values());
    PolicyModel d(tiny_signature(), small(21));
    EXPECT_NE(a.parameters().flat_values(), d.parameters().flat_values());
}

TEST(PolicyModel, ParameterGroups) {
    PolicyModel m(tiny_signature(), small(22));
    const auto& store = m.parameters();
    EXPECT_NE(store.find("msg.q.res.l1.w"), nullptr);
    EXPECT_EQ(store.find("msg.z.res.l1.w"), nullptr);
    EXPECT_EQ(store.find("value.out.w")->group, Group::Critic);
    EXPECT_EQ(store.find("logit.out.w")->group, Group::Actor);
    EXPECT_EQ(store.find("descent.out.w")->group, Group::Descent);
    EXPECT_EQ(store.find("update.res.l1.w")->group, Group::Trunk);
}
