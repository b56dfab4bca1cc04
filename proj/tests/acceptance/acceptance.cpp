// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "../support.hpp"

#include "genplan/gnn/gradcheck.hpp"
#include "genplan/runtime/evaluation.hpp"
#include "genplan/runtime/execution.hpp"
#include "genplan/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace genplan;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t) {
    return std::chrono::duration<double>(clock_type::now() - t).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

class Checklist {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            if (failures_++ < 5)
                notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
        }
    }
    Verdict verdict(const std::string& summary) const {
        return {pass_, pass_ ? summary : summary + " | " + notes_.str()};
    }

private:
    bool pass_ = true;
    int failures_ = 0;
    std::ostringstream notes_;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::vector<gnn::RelationalState> relational_states(const GroundedProblem& p, const TransitionSystem& ts) {
    std::vector<gnn::RelationalState> out;
    for (const auto& s : ts.states)
        out.push_back(gnn::relational_state(p, s));
    return out;
}

gnn::RelationalState rename(const gnn::RelationalState& s, const std::vector<std::uint32_t>& sigma) {
    gnn::RelationalState out{s.object_count, {}};
    for (auto a : s.atoms) {
        for (auto& o : a.args)
            o = sigma[o];
        out.atoms.push_back(std::move(a));
    }
    std::reverse(out.atoms.begin(), out.atoms.end());
    return out;
}

// One-way corridor over the given objects and links; the goal is (at goal).
GroundedProblem corridor(const std::string& objects, const std::string& links, const std::string& goal) {
    auto d = support::domain_from_text(R"((define (domain corridor) (:predicates (at ?x) (next ?x ?y))
        (:action step :parameters (?x ?y) :precondition (and (at ?x) (next ?x ?y))
                      :effect (and (at ?y) (not (at ?x))))))");
    return support::problem(d, "(define (problem c) (:domain corridor) (:objects " + objects + ") (:init (at l0) " +
                                   links + ") (:goal (at " + goal + ")))");
}

Verdict gradient_fidelity() {
    const auto start = clock_type::now();
    auto problem = support::problem(support::domain("blocks"), gen::blocks(3, 4, false));
    const auto ts = expand(problem);
    const auto states = relational_states(problem, ts);
    std::vector<StateId> candidates;
    for (StateId s = 0; s < ts.state_count(); ++s)
        if (!ts.is_goal(s) && !ts.successors[s].empty())
            candidates.push_back(s);

    double worst = 0;
    std::size_t scalars = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        gnn::GnnConfig cfg;
        cfg.k = 8;
        cfg.layers = 2;
        cfg.seed = seed;
        gnn::PolicyModel model(problem.domain(), cfg);
        std::mt19937_64 rng(seed);
        const StateId s = candidates[rng() % candidates.size()];
        std::vector<gnn::RelationalState> next;
        for (const auto& t : ts.successors[s])
            next.push_back(states[t.target]);
        const std::size_t pick = rng() % next.size();
        for (auto head : {gnn::Head::Value, gnn::Head::LogPolicy, gnn::Head::Descent}) {
            const auto r = gnn::check_gradients(model, head, states[s], next, pick, 1e-5);
            worst = std::max(worst, r.max_relative_error);
            scalars += r.checked;
        }
    }
    const double secs = seconds_since(start);
    Checklist c;
    c.expect(worst < 1e-3, "max relative error " + fmt("%.3g", worst));
    c.expect(secs < 60, "runtime " + fmt("%.1f s", secs));
    return c.verdict("20 seeds, k=8, L=2, 3 blocks, " + std::to_string(scalars) + " scalars, max rel err " +
                     fmt("%.2e", worst) + " < 1e-3, " + fmt("%.1f s", secs) + " < 60 s");
}

Verdict invariance_suite() {
    const auto start = clock_type::now();
    Checklist c;
    double worst_v = 0, worst_d = 0, worst_pi = 0, worst_norm = 0, worst_zero = 0;
    for (const auto& [domain, text] : std::vector<std::pair<std::string, std::string>>{
             {"gripper", gen::gripper(3)}, {"blocks", gen::blocks(4, 2, false)}}) {
        auto problem = support::problem(support::domain(domain), text);
        const auto ts = expand(problem);
        const auto states = relational_states(problem, ts);
        gnn::GnnConfig cfg;
        cfg.k = 8;
        cfg.layers = 2;
        cfg.seed = 11;
        gnn::PolicyModel model(problem.domain(), cfg);
        std::mt19937_64 rng(12);
        std::vector<std::uint32_t> sigma(problem.object_count());
        for (int trial = 0; trial < 25; ++trial) {
            const StateId s = rng() % ts.state_count();
            std::iota(sigma.begin(), sigma.end(), 0);
            std::shuffle(sigma.begin(), sigma.end(), rng);
            const auto rs = rename(states[s], sigma);
            worst_v = std::max(worst_v, std::abs(model.value(states[s]) - model.value(rs)));
            worst_d = std::max(worst_d, std::abs(model.descent_probability(states[s]) - model.descent_probability(rs)));
            if (ts.successors[s].empty())
                continue;
            std::vector<gnn::RelationalState> next, renamed;
            for (const auto& t : ts.successors[s]) {
                next.push_back(states[t.target]);
                renamed.push_back(rename(states[t.target], sigma));
            }
            const auto p = model.policy_distribution(states[s], next);
            const auto q = model.policy_distribution(rs, renamed);
            double total = 0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                worst_pi = std::max(worst_pi, std::abs(p[i] - q[i]));
                total += p[i];
            }
            worst_norm = std::max(worst_norm, std::abs(total - 1));
        }
        const auto e = model.object_embeddings({problem.object_count(), {}});
        for (std::size_t o = 1; o < e.rows(); ++o)
            for (std::size_t j = 0; j < e.cols(); ++j)
                worst_zero = std::max(worst_zero, std::abs(double(e(o, j) - e(0, j))));
    }
    const double secs = seconds_since(start);
    c.expect(worst_v <= 1e-9, "V deviation " + fmt("%.3g", worst_v));
    c.expect(worst_d <= 1e-9, "D deviation " + fmt("%.3g", worst_d));
    c.expect(worst_pi <= 1e-9, "pi deviation " + fmt("%.3g", worst_pi));
    c.expect(worst_norm <= 1e-9, "softmax sum off by " + fmt("%.3g", worst_norm));
    c.expect(worst_zero == 0, "zero-atom embeddings differ by " + fmt("%.3g", worst_zero));
    c.expect(secs < 60, "runtime " + fmt("%.1f s", secs));
    return c.verdict("renaming |dV| " + fmt("%.1e", worst_v) + ", |dD| " + fmt("%.1e", worst_d) + ", |dpi| " +
                     fmt("%.1e", worst_pi) + " <= 1e-9; softmax " + fmt("%.1e", worst_norm) +
                     "; zero-atom spread " + fmt("%.1e", worst_zero) + "; " + fmt("%.1f s", secs));
}

Verdict dp_oracle() {
    const auto start = clock_type::now();
    const double gamma = 0.999;
    Checklist c;
    auto problem = support::gripper(1);
    const auto ts = expand(problem);
    c.expect(ts.state_count() == 8, "state count " + std::to_string(ts.state_count()));
    const auto vi = runtime::value_iteration(ts, gamma);
    // Residual of the optimality operator, recomputed here.
    double residual = 0;
    for (StateId s = 0; s < ts.state_count(); ++s) {
        if (ts.is_goal(s))
            continue;
        double best = INFINITY;
        for (const auto& t : ts.successors[s])
            best = std::min(best, 1 + gamma * vi.values[t.target]);
        residual = std::max(residual, std::abs(best - vi.values[s]));
    }
    c.expect(residual < 1e-9, "Bellman residual " + fmt("%.3g", residual));
    const auto choice = runtime::greedy_policy(ts, vi.values, gamma);
    StateId s = ts.init;
    std::size_t steps = 0;
    while (!ts.is_goal(s) && steps < 100) {
        s = ts.successors[s][choice[s]].target;
        ++steps;
    }
    const auto oracle = optimal_plan_length(problem);
    c.expect(steps == 3 && oracle == 3, "greedy " + std::to_string(steps) + " vs BFS " + std::to_string(oracle));

    // A corridor with a pit: l0 -> l1 -> l2 (goal), l0 -> pit (no way out).
    auto pit_problem = corridor("l0 l1 l2 pit", "(next l0 l1) (next l1 l2) (next l0 pit)", "l2");
    const auto pit_ts = expand(pit_problem);
    runtime::PolicyTable uniform(pit_ts.state_count());
    for (StateId x = 0; x < pit_ts.state_count(); ++x)
        uniform[x].assign(pit_ts.successors[x].size(), 1.0 / std::max<std::size_t>(1, pit_ts.successors[x].size()));
    const auto v = runtime::tabular_policy_evaluation(pit_ts, uniform, gamma);
    double dead_end = NAN;
    for (StateId x = 0; x < pit_ts.state_count(); ++x)
        if (pit_ts.is_dead_end(x))
            dead_end = v[x];
    c.expect(std::abs(dead_end - 1000.0) <= 1e-6, "dead-end value " + fmt("%.12g", dead_end));
    const double secs = seconds_since(start);
    c.expect(secs < 10, "runtime " + fmt("%.1f s", secs));
    return c.verdict("1-ball Gripper: 8 states, residual " + fmt("%.1e", residual) + " < 1e-9, greedy " +
                     std::to_string(steps) + " steps = BFS " + std::to_string(oracle) + "; dead end " +
                     fmt("%.9f", dead_end) + " (1000 +- 1e-6); " + fmt("%.2f s", secs) + " < 10 s");
}

// Shared Gripper setup of the training criteria: standard 1- and 2-ball
// instances train; a 3-ball instance with a scrambled initial state validates.
struct GripperSetup {
    std::shared_ptr<const pddl::DomainModel> domain = support::domain("gripper");
    std::vector<train::TrainingInstance> training;
    std::vector<train::TrainingInstance> validation;

    GripperSetup() {
        auto make = [&](const std::string& name, const std::string& text) {
            auto p = std::make_shared<const GroundedProblem>(support::problem(domain, text));
            return train::make_training_instance(name, p);
        };
        training.push_back(make("gripper-1", gen::gripper(1)));
        training.push_back(make("gripper-2", gen::gripper(2)));
        validation.push_back(make("gripper-3-r7", gen::gripper_random(3, 7, false)));
    }

    static gnn::GnnConfig gnn_config() {
        gnn::GnnConfig g;
        g.k = 16;
        g.layers = 3;
        g.aggregation = gnn::Aggregation::Sum;
        return g;
    }

    static train::TrainerConfig trainer_config() {
        train::TrainerConfig cfg;
        cfg.algorithm = train::Algorithm::ACM;
        cfg.gamma = 0.999;
        cfg.trajectory_length = 1;
        cfg.batch_size = 32;
        cfg.eval_period = 100;
        cfg.seeds = {0, 1, 2};
        return cfg;
    }
};

Verdict training_convergence() {
    GripperSetup setup;
    auto cfg = GripperSetup::trainer_config();
    cfg.max_steps = 2400;
    cfg.max_seconds = 550;
    const auto start = clock_type::now();
    const auto result =
        train::train(cfg, gnn::signature_of(*setup.domain), GripperSetup::gnn_config(), setup.training, setup.validation);
    const double secs = seconds_since(start);

    Checklist c;
    c.expect(secs < 1800, "training took " + fmt("%.0f s", secs));
    std::size_t solved = 0, policy_length = 0, optimal_length = 0;
    std::string lengths;
    for (int balls : {3, 4}) {
        auto problem = support::gripper(balls);
        const auto out = runtime::run_deterministic(problem, runtime::model_policy(result.best, problem));
        const auto opt = optimal_plan_length(problem);
        lengths += (lengths.empty() ? "" : ", ") + std::to_string(balls) + " balls " +
                   (out.solved ? std::to_string(out.steps) : std::string("unsolved")) + "/" + std::to_string(opt);
        if (!out.solved) {
            c.expect(false, std::to_string(balls) + " balls not solved (" + std::string(to_string(out.reason)) + ")");
            continue;
        }
        ++solved;
        policy_length += out.steps;
        optimal_length += opt;
        c.expect(out.steps == opt, std::to_string(balls) + " balls: length " + std::to_string(out.steps) +
                                       " vs optimum " + std::to_string(opt));
    }
    return c.verdict("acm T=1 lr 2e-4 on 1-2 balls, best seed " + std::to_string(result.best_seed) +
                     "; coverage " + std::to_string(solved) + "/2, PQ " + std::to_string(policy_length) + "/" +
                     std::to_string(optimal_length) + " (" + lengths + "); " + fmt("%.0f s", secs) + " < 1800 s");
}

Verdict trajectory_ordering() {
    GripperSetup setup;
    const double target = 1.1 * train::optimal_validation_cost(setup.validation, 0.999);
    auto run = [&](std::size_t T) {
        auto cfg = GripperSetup::trainer_config();
        cfg.trajectory_length = T;
        cfg.max_steps = 3000;
        cfg.target_validation_cost = target;
        return train::train(cfg, gnn::signature_of(*setup.domain), GripperSetup::gnn_config(), setup.training,
                            setup.validation);
    };
    const auto short_runs = run(1);
    const auto long_runs = run(8);
    int wins = 0;
    std::string detail;
    for (std::size_t i = 0; i < short_runs.seeds.size(); ++i) {
        const auto t1 = short_runs.seeds[i].seconds_to_target;
        const auto t8 = long_runs.seeds[i].seconds_to_target;
        if (t1 && (!t8 || *t1 < *t8))
            ++wins;
        auto show = [](const std::optional<double>& t) { return t ? fmt("%.0fs", *t) : std::string("never"); };
        detail += (detail.empty() ? "" : ", ") + ("seed " + std::to_string(short_runs.seeds[i].seed) + " T1 " +
                                                   show(t1) + " vs T8 " + show(t8));
    }
    Checklist c;
    c.expect(2 * wins > static_cast<int>(short_runs.seeds.size()), "T=1 earlier on only " + std::to_string(wins));
    return c.verdict("time to within 10% of V* (" + fmt("%.3f", target) + "): " + detail + "; T=1 earlier on " +
                     std::to_string(wins) + "/3");
}

// Gradient norm of an actor surrogate built on the model's own softmax over
// the successors of one state.
double actor_gradient_norm(gnn::PolicyModel& model, const gnn::RelationalState& state,
                           std::span<const gnn::RelationalState> next,
                           const std::function<ad::Var(ad::Graph&, ad::Var)>& loss) {
    auto& store = model.parameters();
    store.zero_grad();
    ad::Graph g;
    auto batch = model.make_batch();
    const auto self = static_cast<std::uint32_t>(batch.add(state, model.signature()));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (const auto& t : next)
        pairs.emplace_back(self, static_cast<std::uint32_t>(batch.add(t, model.signature())));
    const auto embedding = model.embed(g, batch);
    const auto probs = g.softmax(model.transition_logits(g, embedding, pairs));
    g.backward(loss(g, probs));
    const double norm = store.grad_norm();
    store.zero_grad();
    return norm;
}

Verdict degenerate_updates() {
    auto problem = support::gripper(2);
    const auto ts = expand(problem);
    const auto states = relational_states(problem, ts);
    gnn::GnnConfig cfg;
    cfg.k = 8;
    cfg.layers = 2;
    gnn::PolicyModel model(problem.domain(), cfg);
    Checklist c;
    double equal = 0, single = 0, empty = 0, sanity = 0;
    for (StateId s = 0; s < ts.state_count(); ++s) {
        if (ts.is_goal(s) || ts.successors[s].size() < 2)
            continue;
        std::vector<gnn::RelationalState> next;
        for (const auto& t : ts.successors[s])
            next.push_back(states[t.target]);
        const auto pi = model.policy_distribution(states[s], next);
        const std::vector<double> same(next.size(), 4.2);
        for (double gamma : {0.999, 1.0}) {
            const double baseline = train::all_actions_target(pi, same, gamma) - 1;
            equal = std::max(equal, actor_gradient_norm(model, states[s], next, [&](ad::Graph& g, ad::Var p) {
                                return train::all_actions_actor_loss(g, p, same, baseline);
                            }));
        }
        const std::vector<gnn::RelationalState> one{next.front()};
        const std::vector<double> v_one{3.7};
        const std::vector<double> p_one{1.0};
        const double baseline_one = train::all_actions_target(p_one, v_one, 1.0) - 1;
        single = std::max(single, actor_gradient_norm(model, states[s], one, [&](ad::Graph& g, ad::Var p) {
                              return train::all_actions_actor_loss(g, p, v_one, baseline_one);
                          }));
        // V(S) below every successor value: the descent set is empty.
        std::vector<double> v_next(next.size());
        for (std::size_t i = 0; i < next.size(); ++i)
            v_next[i] = 5.0 + double(i);
        const auto set = train::descent_set(1.0, v_next, 0.75);
        c.expect(set.empty(), "descent set not empty");
        const std::vector<double> d_next(next.size(), 0.3);
        empty = std::max(empty, actor_gradient_norm(model, states[s], next, [&](ad::Graph& g, ad::Var p) {
                             return train::descent_actor_loss(g, p, d_next, 0.0, set);
                         }));
        // Unequal values must move the actor, so the zeros above are not vacuous.
        const double baseline = train::all_actions_target(pi, v_next, 0.999) - 1;
        sanity = std::max(sanity, actor_gradient_norm(model, states[s], next, [&](ad::Graph& g, ad::Var p) {
                              return train::all_actions_actor_loss(g, p, v_next, baseline);
                          }));
    }
    c.expect(equal <= 1e-9, "equal-value norm " + fmt("%.3g", equal));
    c.expect(single <= 1e-9, "single-successor norm " + fmt("%.3g", single));
    c.expect(empty <= 1e-9, "empty descent set norm " + fmt("%.3g", empty));
    c.expect(sanity > 1e-6, "unequal values gave no gradient");
    return c.verdict("acm equal values " + fmt("%.1e", equal) + ", single successor at gamma 1 " +
                     fmt("%.1e", single) + ", subopt empty N_D " + fmt("%.1e", empty) + " <= 1e-9 (unequal " +
                     fmt("%.1e", sanity) + ")");
}

Verdict descent_filter() {
    Checklist c;
    const std::vector<double> v{4.5, 3.9};
    c.expect(train::descent_set(5.0, v, 0.75) == std::vector<std::size_t>{1}, "V=5, {4.5, 3.9} should give {1}");
    const std::vector<double> edge{4.25, 4.2499};
    c.expect(train::descent_set(5.0, edge, 0.75) == std::vector<std::size_t>{1}, "boundary 4.25 must be excluded");
    const std::vector<double> pi{0.25, 0.75}, d{0.8, 0.4};
    const std::vector<std::size_t> set{1};
    c.expect(std::abs(train::descent_target(pi, d, set) - 0.3) < 1e-15, "D' over {1}");
    c.expect(train::descent_target(pi, d, std::vector<std::size_t>{}) == 0.0, "empty set must give D' = 0");
    c.expect(train::TrainerConfig{}.epsilon == 0.75, "default margin");

    // Goal successors are trained towards D = 1. In a two-cell corridor the
    // only non-goal state leads straight to the goal.
    auto problem = std::make_shared<const GroundedProblem>(corridor("l0 l1", "(next l0 l1)", "l1"));
    const std::vector<train::TrainingInstance> inst{train::make_training_instance("corridor", problem)};
    gnn::GnnConfig gcfg;
    gcfg.k = 8;
    gcfg.layers = 2;
    gnn::PolicyModel model(problem->domain(), gcfg);
    model.zero_group(ad::Group::Descent);
    StateId goal = 0;
    while (!inst[0].ts.is_goal(goal))
        ++goal;
    const double before = model.descent_probability(inst[0].states[goal]);
    train::TrainerConfig cfg;
    cfg.algorithm = train::Algorithm::Subopt;
    cfg.batch_size = 16;
    cfg.descent_lr = 1e-3;
    train::Trainer trainer(model, inst, cfg, 0);
    for (int i = 0; i < 1000; ++i)
        trainer.step();
    const double after = model.descent_probability(inst[0].states[goal]);
    c.expect(before == 0.5, "zeroed head reads " + fmt("%.6f", before));
    c.expect(after > 0.95, "D(goal) after 1000 subopt steps " + fmt("%.4f", after));
    return c.verdict("eps 0.75: V=5 {4.5, 3.9} -> {1}, 4.25 excluded, empty N_D -> D' = 0; D(goal) 0.5 -> " +
                     fmt("%.4f", after) + " after 1000 corridor steps under target 1");
}

Verdict execution_contracts() {
    Checklist c;
    std::size_t runs = 0, longest = 0;
    for (int balls = 1; balls <= 4; ++balls) {
        auto problem = support::gripper(balls);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            gnn::GnnConfig cfg;
            cfg.k = 8;
            cfg.layers = 2;
            cfg.seed = seed;
            gnn::PolicyModel model(problem.domain(), cfg);
            const auto policy = runtime::model_policy(model, problem);
            const auto det = runtime::run_deterministic(problem, policy);
            const std::set<State> distinct(det.states.begin(), det.states.end());
            c.expect(distinct.size() == det.states.size(), "deterministic run revisited a state");
            c.expect(det.steps <= runtime::kDefaultStepCap, "deterministic run exceeded the cap");
            const auto critic = runtime::run_critic_greedy(problem, runtime::model_values(model, problem));
            const std::set<State> distinct_critic(critic.states.begin(), critic.states.end());
            c.expect(distinct_critic.size() == critic.states.size(), "critic-greedy run revisited a state");
            const auto a = runtime::run_stochastic(problem, policy, runtime::kDefaultStepCap, 100 + seed);
            const auto b = runtime::run_stochastic(problem, policy, runtime::kDefaultStepCap, 100 + seed);
            c.expect(a.states == b.states && a.actions == b.actions, "stochastic run not reproducible");
            c.expect(a.steps <= runtime::kDefaultStepCap, "stochastic run exceeded the cap");
            longest = std::max({longest, det.steps, a.steps});
            runs += 4;
        }
    }
    c.expect(runtime::kDefaultStepCap == 10000, "step cap");
    return c.verdict(std::to_string(runs) + " runs on 1-4 balls: no revisits in closed-set modes, cap 10000 held "
                                            "(longest " +
                     std::to_string(longest) + "), stochastic replays identical");
}

Verdict frontend_correctness() {
    Checklist c;
    struct Expected {
        const char* name;
        std::size_t base, types, schemas;
    };
    const Expected table[] = {{"gripper", 7, 0, 3}, {"blocks", 5, 0, 4},   {"delivery", 4, 4, 3},
                              {"spanner", 6, 5, 3}, {"visitall", 3, 1, 1}, {"logistics", 3, 9, 6}};
    for (const auto& e : table) {
        const auto d = support::domain(e.name);
        c.expect(d->base_predicate_count() == e.base && d->count(pddl::PredicateKind::Goal) == e.base &&
                     d->count(pddl::PredicateKind::Type) == e.types && d->schemas.size() == e.schemas,
                 std::string(e.name) + " counts");
    }
    const auto d = support::domain_from_text(R"((define (domain x) (:predicates (p ?x ?y) (u ?x) (t ?x ?y ?z))
        (:action a :parameters (?x ?y) :precondition (p ?x ?y) :effect (u ?x))))");
    for (int n = 1; n <= 5; ++n) {
        std::string objects;
        for (int i = 0; i < n; ++i)
            objects += " o" + std::to_string(i);
        auto p = support::problem(d, "(define (problem q) (:domain x) (:objects" + objects +
                                         ") (:init (p o0 o0)) (:goal (u o0)))");
        c.expect(p.atom_count(*d->find_predicate("p")) == std::size_t(n * n) &&
                     p.atom_count(*d->find_predicate("u")) == std::size_t(n) &&
                     p.atom_count(*d->find_predicate("t")) == std::size_t(n * n * n) &&
                     p.unpruned_action_count() == std::size_t(n * n),
                 "closed-form counts at n=" + std::to_string(n));
    }
    auto blocks = support::problem(support::domain("blocks"), R"((define (problem two) (:domain blocks)
        (:objects a b) (:init (ontable a) (ontable b) (clear a) (clear b) (handempty)) (:goal (on a b))))");
    std::set<std::string> names;
    for (ActionId a = 0; a < blocks.actions().size(); ++a)
        if (blocks.applicable(blocks.actions()[a], blocks.initial_state()))
            names.insert(blocks.action_name(a));
    c.expect(names == std::set<std::string>{"(pick-up a)", "(pick-up b)"}, "2-block applicable actions");
    return c.verdict("6 fixtures match recorded counts; n^m atoms for n=1..5; 2-block init: " +
                     std::to_string(names.size()) + " applicable actions");
}

Verdict derived_predicates() {
    auto d = pddl::parse_domain(R"((define (domain rel) (:predicates (q ?x ?y) (r ?x ?y))
        (:action flip :parameters (?x ?y) :precondition (q ?x ?y) :effect (and (r ?x ?y) (not (q ?x ?y))))))");
    pddl::add_derived_predicates(d, "(:derived (p ?x ?y) (exists (?z) (and (q ?x ?z) (r ?z ?y))))");
    auto domain = std::make_shared<const pddl::DomainModel>(std::move(d));
    constexpr pddl::ObjectId n = 4;
    auto problem =
        support::problem(domain, "(define (problem d) (:domain rel) (:objects o0 o1 o2 o3) (:init) (:goal (r o0 o0)))");
    const auto q = *domain->find_predicate("q");
    const auto r = *domain->find_predicate("r");
    const auto head = *domain->find_predicate("p");
    Checklist c;
    std::mt19937_64 rng(10);
    std::size_t heads = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<AtomId> atoms;
        bool holds[2][n][n] = {};
        for (pddl::ObjectId x = 0; x < n; ++x)
            for (pddl::ObjectId y = 0; y < n; ++y)
                for (int k = 0; k < 2; ++k)
                    if (rng() % 4 == 0) {
                        holds[k][x][y] = true;
                        atoms.push_back(*problem.atom_id({k == 0 ? q : r, {x, y}}));
                    }
        const auto out = problem.apply_derived(support::state_of(atoms));
        std::set<std::pair<pddl::ObjectId, pddl::ObjectId>> expected, got;
        for (pddl::ObjectId x = 0; x < n; ++x)
            for (pddl::ObjectId z = 0; z < n; ++z)
                for (pddl::ObjectId y = 0; y < n; ++y)
                    if (holds[0][x][z] && holds[1][z][y])
                        expected.insert({x, y});
        std::size_t others = 0;
        for (auto a : out) {
            const auto g = problem.atom(a);
            if (g.predicate == head)
                got.insert({g.args[0], g.args[1]});
            else
                ++others;
        }
        c.expect(got == expected, "trial " + std::to_string(trial) + " head atoms differ");
        c.expect(others == support::state_of(atoms).size(), "trial " + std::to_string(trial) + " base atoms changed");
        heads += got.size();
    }
    return c.verdict("500 random states over 4 objects, " + std::to_string(heads) +
                     " head atoms, all equal to the brute-force triple oracle");
}

} // namespace

// Optional arguments select criteria by number; the default runs all.
int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"gradient fidelity", gradient_fidelity},
        {"invariance suite", invariance_suite},
        {"DP oracle exactness", dp_oracle},
        {"training convergence (Gripper)", training_convergence},
        {"trajectory-length ordering", trajectory_ordering},
        {"degenerate actor updates", degenerate_updates},
        {"descent filter", descent_filter},
        {"execution contracts", execution_contracts},
        {"frontend correctness", frontend_correctness},
        {"derived predicates", derived_predicates},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        if (!only.empty() && !only.contains(index))
            continue;
        const auto start = clock_type::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str(),
                    seconds_since(start));
        std::fflush(stdout);
    }
    const int ran = only.empty() ? index : static_cast<int>(only.size());
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
