#pragma once

#include "genplan/ad/graph.hpp"
#include "genplan/error.hpp"
#include "genplan/gnn/model.hpp"
#include "genplan/runtime/evaluation.hpp"
#include "genplan/state_space.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace genplan::train {

using ad::Graph;
using ad::Group;
using ad::Tensor;
using ad::Var;
using gnn::PolicyModel;
using gnn::RelationalState;

enum class Algorithm { AC1, ACM, Subopt };

inline std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::AC1: return "ac1";
    case Algorithm::ACM: return "acm";
    case Algorithm::Subopt: return "subopt";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "ac1")
        return Algorithm::AC1;
    if (s == "acm")
        return Algorithm::ACM;
    if (s == "subopt")
        return Algorithm::Subopt;
    throw Error(ErrorCode::InvalidArgument, "unknown algorithm " + std::string(s));
}

struct TrainerConfig {
    Algorithm algorithm = Algorithm::ACM;
    /// Step sizes: actor (alpha), critic (beta), descent head, shared trunk.
    double actor_lr = ad::kDefaultLearningRate;
    double critic_lr = ad::kDefaultLearningRate;
    double descent_lr = ad::kDefaultLearningRate;
    double trunk_lr = ad::kDefaultLearningRate;
    double gamma = 0.999;
    /// Margin of the descent set of the suboptimal variant.
    double epsilon = 0.75;
    std::size_t trajectory_length = 1;
    std::size_t batch_size = 32;
    std::size_t max_steps = 20000;
    /// Per seed; zero means no limit.
    double max_seconds = 0;
    std::size_t eval_period = 100;
    std::vector<std::uint64_t> seeds{0};
    /// Stop a seed early once its validation cost is at or below this value.
    std::optional<double> target_validation_cost;

    void validate() const {
        auto positive = [](double x, const char* what) {
            if (!(x > 0))
                throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
        };
        positive(actor_lr, "actor step size");
        positive(critic_lr, "critic step size");
        positive(descent_lr, "descent step size");
        positive(trunk_lr, "trunk step size");
        if (!(gamma > 0 && gamma < 1))
            throw Error(ErrorCode::InvalidArgument, "discount must lie in (0, 1)");
        if (!(epsilon >= 0))
            throw Error(ErrorCode::InvalidArgument, "descent margin must be non-negative");
        if (trajectory_length < 1 || batch_size < 1 || eval_period < 1)
            throw Error(ErrorCode::InvalidArgument, "trajectory length, batch size and eval period must be >= 1");
        if (seeds.empty())
            throw Error(ErrorCode::InvalidArgument, "at least one seed is required");
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"algorithm", to_string(algorithm)},
                         {"actor_lr", actor_lr},
                         {"critic_lr", critic_lr},
                         {"descent_lr", descent_lr},
                         {"trunk_lr", trunk_lr},
                         {"gamma", gamma},
                         {"epsilon", epsilon},
                         {"trajectory_length", trajectory_length},
                         {"batch_size", batch_size},
                         {"max_steps", max_steps},
                         {"max_seconds", max_seconds},
                         {"eval_period", eval_period},
                         {"seeds", seeds}};
        if (target_validation_cost)
            j["target_validation_cost"] = *target_validation_cost;
        return j;
    }

    /// Overrides fields present in j.
    void update_from_json(const nlohmann::json& j) {
        try {
            if (j.contains("algorithm"))
                algorithm = parse_algorithm(j["algorithm"].get<std::string>());
            if (j.contains("lr")) {
                const double lr = j["lr"].get<double>();
                actor_lr = critic_lr = descent_lr = trunk_lr = lr;
            }
            actor_lr = j.value("actor_lr", actor_lr);
            critic_lr = j.value("critic_lr", critic_lr);
            descent_lr = j.value("descent_lr", descent_lr);
            trunk_lr = j.value("trunk_lr", trunk_lr);
            gamma = j.value("gamma", gamma);
            epsilon = j.value("epsilon", epsilon);
            trajectory_length = j.value("trajectory_length", trajectory_length);
            batch_size = j.value("batch_size", batch_size);
            max_steps = j.value("max_steps", max_steps);
            max_seconds = j.value("max_seconds", max_seconds);
            eval_period = j.value("eval_period", eval_period);
            if (j.contains("seeds"))
                seeds = j["seeds"].get<std::vector<std::uint64_t>>();
            if (j.contains("target_validation_cost"))
                target_validation_cost = j["target_validation_cost"].get<double>();
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::FormatError, std::string("malformed training config: ") + ex.what());
        }
    }
};

/// An expanded instance ready for training or validation.
struct TrainingInstance {
    std::string name;
    std::shared_ptr<const GroundedProblem> problem;
    TransitionSystem ts;
    std::vector<RelationalState> states;
    std::vector<StateId> non_goal;
};

inline TrainingInstance make_training_instance(std::string name, std::shared_ptr<const GroundedProblem> problem,
                                               TransitionSystem ts) {
    TrainingInstance t;
    t.name = std::move(name);
    t.states.reserve(ts.states.size());
    for (const auto& s : ts.states)
        t.states.push_back(gnn::relational_state(*problem, s));
    t.non_goal = ts.non_goal_states();
    t.problem = std::move(problem);
    t.ts = std::move(ts);
    return t;
}

inline TrainingInstance make_training_instance(std::string name, std::shared_ptr<const GroundedProblem> problem,
                                               const ExpansionLimits& limits = {}) {
    auto ts = expand(*problem, limits);
    return make_training_instance(std::move(name), std::move(problem), std::move(ts));
}

// Update rules on plain numbers. The trainer uses them on detached forward
// values; they are exposed for direct testing.

/// 1 + gamma V(S') - V(S)
inline double td_error(double v_state, double v_next, double gamma) { return 1 + gamma * v_next - v_state; }

/// V' = 1 + gamma sum pi(s') V(s')
inline double all_actions_target(std::span<const double> pi, std::span<const double> v_next, double gamma) {
    double s = 0;
    for (std::size_t i = 0; i < pi.size(); ++i)
        s += pi[i] * v_next[i];
    return 1 + gamma * s;
}

/// Indices of successors whose value undercuts V(S) by more than epsilon.
inline std::vector<std::size_t> descent_set(double v_state, std::span<const double> v_next, double epsilon) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v_next.size(); ++i)
        if (v_next[i] + epsilon < v_state)
            out.push_back(i);
    return out;
}

/// D' = sum over the descent set of D(s') pi(s'); zero for an empty set.
inline double descent_target(std::span<const double> pi, std::span<const double> d_next,
                             std::span<const std::size_t> set) {
    double s = 0;
    for (auto i : set)
        s += d_next[i] * pi[i];
    return s;
}

/// Actor surrogate of the all-actions update: sum_i (V(s'_i) - b) pi_i.
/// Its gradient is sum_i (V(s'_i) - b) grad pi_i.
inline Var all_actions_actor_loss(Graph& g, Var probabilities, std::span<const double> v_next, double baseline) {
    std::vector<ad::real> coeff;
    for (double v : v_next)
        coeff.push_back(static_cast<ad::real>(v - baseline));
    return g.weighted_sum(probabilities, std::move(coeff));
}

/// Actor surrogate of the suboptimal variant (reconstruction): the negated
/// sum over the descent set of (D(s') - D') pi(s'), so that descent on it
/// raises the probability of successors more likely to reach the goal.
inline Var descent_actor_loss(Graph& g, Var probabilities, std::span<const double> d_next, double target,
                              std::span<const std::size_t> set) {
    std::vector<ad::real> coeff(d_next.size(), 0);
    for (auto i : set)
        coeff[i] = static_cast<ad::real>(-(d_next[i] - target));
    return g.weighted_sum(probabilities, std::move(coeff));
}

/// Follows pi from a seed for at most T transitions, stopping at goals.
inline std::vector<std::pair<StateId, StateId>>
sample_trajectory(const TransitionSystem& ts, StateId seed, const std::function<std::vector<double>(StateId)>& pi,
                  std::size_t T, std::mt19937_64& rng) {
    if (T < 1)
        throw Error(ErrorCode::InvalidArgument, "trajectory length must be at least 1");
    std::vector<std::pair<StateId, StateId>> out;
    StateId s = seed;
    while (out.size() < T && !ts.is_goal(s) && !ts.successors[s].empty()) {
        const auto p = pi(s);
        std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
        const StateId next = ts.successors[s][pick(rng)].target;
        out.emplace_back(s, next);
        s = next;
    }
    return out;
}

struct StepStats {
    double critic_loss = 0;
    double actor_loss = 0;
    double anchor_loss = 0;
    double descent_loss = 0;
    /// Mean TD error (ac1) or mean V' - V(S) (all-actions forms).
    double mean_delta = 0;
};

/// Runs batched updates of one algorithm on a set of training instances.
/// Each batch slot is a rollout that advances one transition per update and
/// restarts from a uniformly drawn non-goal state after reaching a goal or
/// T transitions.
class Trainer {
public:
    Trainer(PolicyModel& model, std::span<const TrainingInstance> instances, TrainerConfig config,
            std::uint64_t seed)
        : model_(model), config_(std::move(config)), rng_(seed) {
        config_.validate();
        for (const auto& inst : instances)
            if (!inst.non_goal.empty())
                instances_.push_back(&inst);
        if (instances_.empty())
            throw Error(ErrorCode::NoNonGoalStates, "no training instance has a non-goal state");
        slots_.resize(config_.batch_size);
    }

    const TrainerConfig& config() const { return config_; }
    std::size_t steps() const { return steps_; }

    StepStats step() {
        for (auto& slot : slots_)
            if (slot.fresh)
                reseed(slot);

        Graph g;
        auto batch = model_.make_batch();
        std::map<std::pair<const TrainingInstance*, StateId>, std::uint32_t> index;
        auto add = [&](const TrainingInstance* inst, StateId s) {
            auto [it, inserted] = index.try_emplace({inst, s}, 0);
            if (inserted)
                it->second = static_cast<std::uint32_t>(batch.add(inst->states[s], model_.signature()));
            return it->second;
        };
        struct SlotView {
            std::uint32_t self = 0;
            std::vector<std::uint32_t> next;
            std::size_t first_pair = 0;
        };
        std::vector<SlotView> views(slots_.size());
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (std::size_t b = 0; b < slots_.size(); ++b) {
            const auto& slot = slots_[b];
            views[b].self = add(slot.instance, slot.state);
            views[b].first_pair = pairs.size();
            for (const auto& t : slot.instance->ts.successors[slot.state]) {
                views[b].next.push_back(add(slot.instance, t.target));
                pairs.emplace_back(views[b].self, views[b].next.back());
            }
        }

        const auto embedding = model_.embed(g, batch);
        const Var values = model_.values(g, embedding);
        const Var logits = pairs.empty() ? Var() : model_.transition_logits(g, embedding, pairs);
        const bool subopt = config_.algorithm == Algorithm::Subopt;
        const Var descent = subopt ? model_.descent(g, embedding) : Var();
        const auto& v = values.value();

        const double gamma = config_.gamma;
        const double scale = 1.0 / static_cast<double>(slots_.size());
        StepStats stats;
        std::vector<Var> terms;
        std::vector<std::uint32_t> critic_rows, anchor_rows, descent_rows, goal_descent_rows;
        std::vector<ad::real> critic_coeff, critic_target, descent_targets;
        std::vector<std::optional<std::size_t>> chosen(slots_.size());

        for (std::size_t b = 0; b < slots_.size(); ++b) {
            const auto& slot = slots_[b];
            const auto& view = views[b];
            const auto& succ = slot.instance->ts.successors[slot.state];
            const double v_s = v[view.self];
            if (succ.empty()) {
                // No successor: a unit-cost self-loop.
                const double target = 1 + gamma * v_s;
                critic_rows.push_back(view.self);
                critic_target.push_back(static_cast<ad::real>(target));
                critic_coeff.push_back(static_cast<ad::real>(-(target - v_s)));
                stats.mean_delta += target - v_s;
                if (subopt) {
                    descent_rows.push_back(view.self);
                    descent_targets.push_back(0);
                }
                continue;
            }
            std::vector<std::uint32_t> rows(succ.size());
            for (std::size_t i = 0; i < succ.size(); ++i)
                rows[i] = static_cast<std::uint32_t>(view.first_pair + i);
            const Var probs = g.softmax(g.gather_rows(logits, rows));
            std::vector<double> pi(probs.value().values().begin(), probs.value().values().end());
            std::vector<double> v_next(succ.size());
            for (std::size_t i = 0; i < succ.size(); ++i)
                v_next[i] = v[view.next[i]];
            std::discrete_distribution<std::size_t> pick(pi.begin(), pi.end());
            chosen[b] = pick(rng_);

            if (config_.algorithm == Algorithm::AC1) {
                const std::size_t j = *chosen[b];
                const double delta = td_error(v_s, v_next[j], gamma);
                stats.mean_delta += delta;
                critic_rows.push_back(view.self);
                critic_coeff.push_back(static_cast<ad::real>(-delta));
                terms.push_back(g.scale(g.log(g.gather_rows(probs, {static_cast<std::uint32_t>(j)})),
                                        static_cast<ad::real>(delta)));
                if (slot.instance->ts.is_goal(succ[j].target))
                    anchor_rows.push_back(view.next[j]);
                continue;
            }

            const double target = all_actions_target(pi, v_next, gamma);
            const double baseline = target - 1;
            stats.mean_delta += target - v_s;
            critic_rows.push_back(view.self);
            critic_target.push_back(static_cast<ad::real>(target));
            for (std::size_t i = 0; i < succ.size(); ++i)
                if (slot.instance->ts.is_goal(succ[i].target))
                    anchor_rows.push_back(view.next[i]);

            if (!subopt) {
                terms.push_back(all_actions_actor_loss(g, probs, v_next, baseline));
                continue;
            }
            const auto& d = descent.value();
            std::vector<double> d_next(succ.size());
            for (std::size_t i = 0; i < succ.size(); ++i)
                d_next[i] = d[view.next[i]];
            const auto set = descent_set(v_s, v_next, config_.epsilon);
            const double d_target = descent_target(pi, d_next, set);
            descent_rows.push_back(view.self);
            descent_targets.push_back(static_cast<ad::real>(d_target));
            for (std::size_t i = 0; i < succ.size(); ++i)
                if (slot.instance->ts.is_goal(succ[i].target))
                    goal_descent_rows.push_back(view.next[i]);
            if (!set.empty())
                terms.push_back(descent_actor_loss(g, probs, d_next, d_target, set));
        }
        stats.mean_delta *= scale;

        Var actor_total;
        if (!terms.empty()) {
            actor_total = terms.front();
            for (std::size_t i = 1; i < terms.size(); ++i)
                actor_total = g.add(actor_total, terms[i]);
            actor_total = g.scale(actor_total, static_cast<ad::real>(scale));
            stats.actor_loss = actor_total.item();
        }
        Var critic_total;
        if (!critic_rows.empty()) {
            const Var vs = g.gather_rows(values, critic_rows);
            if (config_.algorithm == Algorithm::AC1) {
                critic_total = g.weighted_sum(vs, critic_coeff);
            } else {
                const Var diff = g.sub(vs, g.constant(Tensor::column(critic_target)));
                critic_total = g.half_square(diff);
            }
            critic_total = g.scale(critic_total, static_cast<ad::real>(scale));
            stats.critic_loss = critic_total.item();
        }
        Var anchor_total;
        if (!anchor_rows.empty()) {
            anchor_total = g.scale(g.half_square(g.gather_rows(values, anchor_rows)), static_cast<ad::real>(scale));
            stats.anchor_loss = anchor_total.item();
        }
        Var descent_total;
        if (subopt && !descent_rows.empty()) {
            descent_total = g.binary_cross_entropy(g.gather_rows(descent, descent_rows), descent_targets);
            if (!goal_descent_rows.empty()) {
                std::vector<ad::real> ones(goal_descent_rows.size(), 1);
                descent_total = g.add(descent_total,
                                      g.binary_cross_entropy(g.gather_rows(descent, goal_descent_rows), ones));
            }
            descent_total = g.scale(descent_total, static_cast<ad::real>(scale));
            stats.descent_loss = descent_total.item();
        }

        Var total;
        for (const Var& part : {actor_total, critic_total, anchor_total, descent_total}) {
            if (part.graph() == nullptr)
                continue;
            total = total.graph() == nullptr ? part : g.add(total, part);
        }
        auto& store = model_.parameters();
        if (total.graph() != nullptr) {
            g.backward(total);
            const std::pair<Group, double> groups[] = {{Group::Trunk, config_.trunk_lr},
                                                       {Group::Critic, config_.critic_lr},
                                                       {Group::Actor, config_.actor_lr},
                                                       {Group::Descent, config_.descent_lr}};
            for (const auto& [group, lr] : groups)
                if (store.has_gradients(group))
                    store.adam_step(group, lr);
        }
        store.zero_grad();

        for (std::size_t b = 0; b < slots_.size(); ++b) {
            auto& slot = slots_[b];
            const auto& succ = slot.instance->ts.successors[slot.state];
            if (!chosen[b]) {
                slot.fresh = true;
                continue;
            }
            slot.state = succ[*chosen[b]].target;
            ++slot.steps;
            slot.fresh = slot.instance->ts.is_goal(slot.state) || slot.steps >= config_.trajectory_length;
        }
        ++steps_;
        return stats;
    }

private:
    struct Slot {
        const TrainingInstance* instance = nullptr;
        StateId state = 0;
        std::size_t steps = 0;
        bool fresh = true;
    };

    void reseed(Slot& slot) {
        std::uniform_int_distribution<std::size_t> pick_instance(0, instances_.size() - 1);
        slot.instance = instances_[pick_instance(rng_)];
        std::uniform_int_distribution<std::size_t> pick_state(0, slot.instance->non_goal.size() - 1);
        slot.state = slot.instance->non_goal[pick_state(rng_)];
        slot.steps = 0;
        slot.fresh = false;
    }

    PolicyModel& model_;
    TrainerConfig config_;
    std::mt19937_64 rng_;
    std::vector<const TrainingInstance*> instances_;
    std::vector<Slot> slots_;
    std::size_t steps_ = 0;
};

/// Validation objective: mean over instances of the mean V^pi over
/// non-goal states.
inline double validation_cost(const PolicyModel& model, std::span<const TrainingInstance> instances, double gamma) {
    if (instances.empty())
        throw Error(ErrorCode::EmptyInput, "no validation instances");
    double total = 0;
    std::size_t count = 0;
    for (const auto& inst : instances) {
        if (inst.non_goal.empty())
            continue;
        total += runtime::expected_policy_cost(model, inst.ts, inst.states, gamma);
        ++count;
    }
    if (count == 0)
        throw Error(ErrorCode::NoNonGoalStates, "no validation instance has a non-goal state");
    return total / static_cast<double>(count);
}

/// Mean optimal value over the same states, the floor of validation_cost.
inline double optimal_validation_cost(std::span<const TrainingInstance> instances, double gamma) {
    double total = 0;
    std::size_t count = 0;
    for (const auto& inst : instances) {
        if (inst.non_goal.empty())
            continue;
        total += runtime::average_non_goal(inst.ts, runtime::value_iteration(inst.ts, gamma).values);
        ++count;
    }
    if (count == 0)
        throw Error(ErrorCode::NoNonGoalStates, "no instance has a non-goal state");
    return total / static_cast<double>(count);
}

struct MetricRecord {
    double seconds = 0;
    std::size_t step = 0;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0;
};

/// Time series written as one JSON object per line.
class MetricLog {
public:
    void add(MetricRecord r) {
        if (!records_.empty() && r.seconds < records_.back().seconds)
            r.seconds = records_.back().seconds;
        records_.push_back(std::move(r));
    }
    const std::vector<MetricRecord>& records() const { return records_; }

    void write(std::ostream& out) const {
        for (const auto& r : records_)
            out << nlohmann::json{{"seconds", r.seconds},
                                  {"step", r.step},
                                  {"seed", r.seed},
                                  {"metric", r.metric},
                                  {"value", r.value}}
                       .dump()
                << '\n';
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + path);
        write(out);
    }

private:
    std::vector<MetricRecord> records_;
};

struct SeedResult {
    std::uint64_t seed = 0;
    double best_validation = std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    double seconds = 0;
    bool wall_clock_exceeded = false;
    /// Seconds until the validation cost first reached the target, if set.
    std::optional<double> seconds_to_target;
};

struct TrainingResult {
    PolicyModel best;
    double best_validation = std::numeric_limits<double>::infinity();
    std::uint64_t best_seed = 0;
    std::vector<SeedResult> seeds;
    MetricLog log;
};

/// Trains one model per seed and keeps the one with the lowest validation
/// cost, measured every eval_period updates and at the end of each run.
/// A non-finite validation cost never wins.
inline TrainingResult train(const TrainerConfig& config, const gnn::DomainSignature& signature,
                            const gnn::GnnConfig& gnn_config, std::span<const TrainingInstance> training,
                            std::span<const TrainingInstance> validation,
                            const std::function<void(const MetricRecord&)>& on_record = {}) {
    config.validate();
    if (training.empty())
        throw Error(ErrorCode::EmptyTrainingSplit, "no training instances");
    if (validation.empty())
        validation = training;
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed = [&](clock::time_point since) { return std::chrono::duration<double>(clock::now() - since).count(); };

    std::optional<PolicyModel> best;
    TrainingResult result{PolicyModel(signature, gnn_config), std::numeric_limits<double>::infinity(), 0, {}, {}};
    auto record = [&](MetricRecord r) {
        if (on_record)
            on_record(r);
        result.log.add(std::move(r));
    };

    for (auto seed : config.seeds) {
        auto cfg = gnn_config;
        cfg.seed = seed;
        PolicyModel model(signature, cfg);
        Trainer trainer(model, training, config, seed);
        SeedResult sr;
        sr.seed = seed;
        const auto seed_start = clock::now();

        auto evaluate = [&]() {
            const double cost = validation_cost(model, validation, config.gamma);
            record({elapsed(start), trainer.steps(), seed, "validation_cost", cost});
            if (std::isfinite(cost) && cost < sr.best_validation) {
                sr.best_validation = cost;
                if (cost < result.best_validation) {
                    result.best_validation = cost;
                    result.best_seed = seed;
                    best = model;
                }
            }
            if (config.target_validation_cost && cost <= *config.target_validation_cost && !sr.seconds_to_target)
                sr.seconds_to_target = elapsed(seed_start);
            return cost;
        };

        evaluate();
        while (trainer.steps() < config.max_steps) {
            if (config.max_seconds > 0 && elapsed(seed_start) > config.max_seconds) {
                sr.wall_clock_exceeded = true;
                break;
            }
            const auto stats = trainer.step();
            if (trainer.steps() % config.eval_period == 0) {
                const double t = elapsed(start);
                record({t, trainer.steps(), seed, "critic_loss", stats.critic_loss});
                record({t, trainer.steps(), seed, "actor_loss", stats.actor_loss});
                record({t, trainer.steps(), seed, "anchor_loss", stats.anchor_loss});
                if (config.algorithm == Algorithm::Subopt)
                    record({t, trainer.steps(), seed, "descent_loss", stats.descent_loss});
                evaluate();
                if (sr.seconds_to_target)
                    break;
            }
        }
        if (trainer.steps() % config.eval_period != 0)
            evaluate();
        sr.steps = trainer.steps();
        sr.seconds = elapsed(seed_start);
        result.seeds.push_back(sr);
    }
    if (best)
        result.best = std::move(*best);
    return result;
}

} // namespace genplan::train
