#include "genplan/dataset.hpp"
#include "genplan/generators.hpp"
#include "genplan/gnn/gradcheck.hpp"
#include "genplan/gnn/model.hpp"
#include "genplan/runtime/evaluation.hpp"
#include "genplan/runtime/execution.hpp"
#include "genplan/runtime/report.hpp"
#include "genplan/state_space.hpp"
#include "genplan/train/trainer.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using namespace genplan;

namespace {

struct CliConfig {
    std::string domain;
    std::string derived;
    std::string instance;
    std::vector<std::string> instances;
    std::string manifest;
    std::string checkpoint;
    std::string out_dir;
    std::string config_file;
    std::uint64_t seed = 0;
    int verbosity = 0;

    // expand
    std::size_t max_states = ExpansionLimits{}.max_states;
    bool distances = false;
    bool cache = false;

    // dataset
    std::size_t train_count = 1;
    std::size_t validation_count = 1;
    std::size_t max_train_transitions = DatasetLimits{}.max_train_transitions;

    // train
    std::string algorithm = "acm";
    double gamma = 0.999;
    double lr = ad::kDefaultLearningRate;
    std::size_t trajectory_len = 1;
    std::size_t batch = 32;
    std::size_t steps = 20000;
    double seconds = 0;
    std::size_t seeds = 1;
    std::size_t k = 16;
    std::size_t layers = 3;
    std::string aggregation = "sum";

    // eval
    std::string mode = "deterministic";
    std::size_t step_cap = runtime::kDefaultStepCap;
    std::size_t oracle_states = 200'000;

    // generate
    std::string family;
    int size = 1;
    bool single = false;
};

fs::path output_dir(const CliConfig& c) {
    fs::path dir = c.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("GENPLAN_OUT");
        dir = env && *env ? env : ".";
    }
    fs::create_directories(dir);
    return dir;
}

std::shared_ptr<const pddl::DomainModel> domain_of(const CliConfig& c) { return load_domain(c.domain, c.derived); }

int cmd_parse(const CliConfig& c) {
    auto domain = domain_of(c);
    std::cout << "domain     " << domain->name << '\n';
    std::cout << "predicates " << domain->base_predicate_count() << " base, " << domain->count(pddl::PredicateKind::Goal)
              << " goal, " << domain->count(pddl::PredicateKind::Type) << " type, "
              << domain->count(pddl::PredicateKind::Derived) << " derived\n";
    std::cout << "schemas    " << domain->schemas.size() << '\n';
    std::cout << "types      " << domain->types.size() << '\n';
    if (!c.instance.empty()) {
        auto problem = load_problem(domain, c.instance);
        std::cout << "problem    " << problem.instance().name << '\n';
        std::cout << "objects    " << problem.object_count() << '\n';
        std::cout << "atoms      " << problem.atom_count() << '\n';
        std::cout << "actions    " << problem.actions().size() << " (" << problem.unpruned_action_count()
                  << " before pruning)\n";
        std::cout << "goal atoms " << problem.goal_atoms().size() << '\n';
    }
    return 0;
}

int cmd_expand(const CliConfig& c) {
    auto domain = domain_of(c);
    auto problem = load_problem(domain, c.instance);
    ExpansionLimits limits;
    limits.max_states = c.max_states;
    const auto ts = expand(problem, limits);
    std::size_t goals = 0, dead = 0;
    for (StateId s = 0; s < ts.state_count(); ++s) {
        goals += ts.is_goal(s);
        dead += ts.is_dead_end(s);
    }
    std::cout << "states      " << ts.state_count() << '\n';
    std::cout << "transitions " << ts.transition_count() << '\n';
    std::cout << "goals       " << goals << '\n';
    std::cout << "dead ends   " << dead << '\n';
    const auto d0 = ts.goal_distance[ts.init];
    std::cout << "init dist   " << (d0 == kUnreachable ? std::string("unreachable") : std::to_string(d0)) << '\n';
    if (c.distances) {
        std::cout << "distance histogram\n";
        for (auto [d, n] : distance_histogram(ts))
            std::cout << "  " << (d == kUnreachable ? std::string("inf") : std::to_string(d)) << "  " << n << '\n';
    }
    if (c.cache) {
        const auto path = output_dir(c) / (problem.instance().name + ".gpts");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + path.string());
        write_transition_system(out, ts, problem);
        std::cout << "cache       " << path.string() << '\n';
    }
    return 0;
}

int cmd_dataset(const CliConfig& c) {
    auto domain = domain_of(c);
    std::vector<std::string> paths;
    for (const auto& p : c.instances)
        paths.push_back(fs::absolute(p).string());
    DatasetLimits limits;
    limits.max_train_transitions = c.max_train_transitions;
    limits.expansion.max_states = c.max_states;
    auto m = build_dataset(domain, paths, limits, SplitRule{c.train_count, c.validation_count});
    m.domain = fs::absolute(c.domain).string();
    if (!c.derived.empty())
        m.derived = fs::absolute(c.derived).string();
    for (const auto& w : m.warnings)
        std::cerr << "warning: " << w << '\n';
    const auto path = output_dir(c) / "manifest.json";
    write_manifest(path.string(), m);
    for (const auto& e : m.entries)
        std::cout << to_string(e.split) << "  " << e.path << "  "
                  << (e.states ? std::to_string(*e.states) + " states" : std::string("not expanded")) << '\n';
    std::cout << "manifest " << path.string() << '\n';
    return 0;
}

std::vector<train::TrainingInstance> load_split(const DatasetManifest& m,
                                                std::shared_ptr<const pddl::DomainModel> domain, Split split) {
    std::vector<train::TrainingInstance> out;
    for (const auto* e : m.split(split)) {
        auto problem = std::make_shared<const GroundedProblem>(load_problem(domain, e->path));
        out.push_back(train::make_training_instance(fs::path(e->path).stem().string(), problem));
    }
    return out;
}

int cmd_train(const CliConfig& c) {
    const auto manifest = read_manifest(c.manifest);
    auto domain = load_domain(manifest.domain, manifest.derived);

    train::TrainerConfig cfg;
    cfg.algorithm = train::parse_algorithm(c.algorithm);
    cfg.gamma = c.gamma;
    cfg.actor_lr = cfg.critic_lr = cfg.descent_lr = cfg.trunk_lr = c.lr;
    cfg.trajectory_length = c.trajectory_len;
    cfg.batch_size = c.batch;
    cfg.max_steps = c.steps;
    cfg.max_seconds = c.seconds;
    cfg.seeds.clear();
    for (std::size_t i = 0; i < c.seeds; ++i)
        cfg.seeds.push_back(c.seed + i);
    gnn::GnnConfig g;
    g.k = c.k;
    g.layers = c.layers;
    g.aggregation = gnn::parse_aggregation(c.aggregation);

    if (!c.config_file.empty()) {
        std::ifstream in(c.config_file);
        if (!in)
            throw Error(ErrorCode::IoError, "cannot open " + c.config_file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::FormatError, std::string("malformed config: ") + ex.what());
        }
        // Settings in the file override the flags.
        cfg.update_from_json(j);
        if (j.contains("gnn")) {
            const auto& n = j["gnn"];
            g.k = n.value("k", g.k);
            g.layers = n.value("layers", g.layers);
            if (n.contains("aggregation"))
                g.aggregation = gnn::parse_aggregation(n["aggregation"].get<std::string>());
        }
    }
    cfg.validate();

    auto training = load_split(manifest, domain, Split::Train);
    if (training.empty())
        throw Error(ErrorCode::EmptyTrainingSplit, "the manifest has no training instance");
    auto validation = load_split(manifest, domain, Split::Validation);

    const auto dir = output_dir(c);
    auto result = train::train(cfg, gnn::signature_of(*domain), g, training, validation, [&](const auto& r) {
        if (c.verbosity > 0 && r.metric == "validation_cost")
            std::cerr << "seed " << r.seed << " step " << r.step << " validation " << r.value << '\n';
    });
    const auto ckpt = dir / "model.gpck";
    gnn::save_checkpoint(ckpt.string(), result.best);
    result.log.save((dir / "metrics.jsonl").string());
    for (const auto& s : result.seeds)
        std::cout << "seed " << s.seed << "  steps " << s.steps << "  best validation " << s.best_validation << "  "
                  << s.seconds << " s\n";
    std::cout << "best seed " << result.best_seed << "  validation " << result.best_validation << '\n';
    std::cout << "checkpoint " << ckpt.string() << '\n';
    return 0;
}

int cmd_eval(const CliConfig& c) {
    std::shared_ptr<const pddl::DomainModel> domain;
    std::vector<std::string> paths = c.instances;
    if (!c.manifest.empty()) {
        const auto m = read_manifest(c.manifest);
        domain = load_domain(m.domain, m.derived);
        if (paths.empty())
            for (const auto* e : m.split(Split::Test))
                paths.push_back(e->path);
    } else {
        domain = domain_of(c);
    }
    if (paths.empty())
        throw Error(ErrorCode::EmptyInput, "no test instances");
    const auto signature = gnn::signature_of(*domain);
    const auto model = gnn::load_checkpoint(c.checkpoint, &signature);

    std::vector<runtime::InstanceResult> results;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto problem = load_problem(domain, paths[i]);
        runtime::RunOutcome out;
        const std::uint64_t seed = c.seed + i;
        if (c.mode == "stochastic")
            out = runtime::run_stochastic(problem, runtime::model_policy(model, problem), c.step_cap, seed);
        else if (c.mode == "deterministic")
            out = runtime::run_deterministic(problem, runtime::model_policy(model, problem), c.step_cap);
        else
            out = runtime::run_critic_greedy(problem, runtime::model_values(model, problem), c.step_cap);
        runtime::InstanceResult r;
        r.name = fs::path(paths[i]).stem().string();
        r.solved = out.solved;
        r.length = out.steps;
        r.termination = std::string(runtime::to_string(out.reason));
        r.seed = seed;
        try {
            ExpansionLimits limits;
            limits.max_states = c.oracle_states;
            r.optimal = optimal_plan_length(problem, limits);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CapacityExceeded && e.code() != ErrorCode::Unsolvable)
                throw;
        }
        results.push_back(std::move(r));
    }
    const auto report = runtime::quality_report(results, c.mode);
    std::cout << report.table();
    const auto path = output_dir(c) / ("report-" + c.mode + ".json");
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << report.to_json().dump(2) << '\n';
    return 0;
}

int cmd_selftest(const CliConfig& c) {
    bool ok = true;
    auto line = [&](bool pass, const std::string& what) {
        std::cout << (pass ? "PASS  " : "FAIL  ") << what << '\n';
        ok = ok && pass;
    };

    gnn::DomainSignature sig{{"p", 1, pddl::PredicateKind::Base}, {"q", 2, pddl::PredicateKind::Base}};
    gnn::GnnConfig g;
    g.k = 4;
    g.layers = 1;
    g.seed = c.seed;
    gnn::PolicyModel model(sig, g);
    gnn::RelationalState s{3, {{0, {0}}, {1, {0, 1}}, {1, {2, 1}}}};
    std::vector<gnn::RelationalState> next{{3, {{0, {1}}, {1, {0, 2}}}}, {3, {{1, {1, 1}}}}};
    double worst = 0;
    for (auto head : {gnn::Head::Value, gnn::Head::LogPolicy, gnn::Head::Descent})
        worst = std::max(worst, gnn::check_gradients(model, head, s, next, 1).max_relative_error);
    line(worst < 1e-3, "gradient check, max relative error " + std::to_string(worst));

    const auto pi = model.policy_distribution(s, next);
    double total = 0;
    for (double p : pi)
        total += p;
    line(std::abs(total - 1) < 1e-9, "softmax normalization");

    // Chain 0 -> 1 -> ... -> n-1 with the last state the goal.
    const std::size_t n = 6;
    const double gamma = 0.9;
    TransitionSystem chain;
    chain.states.resize(n);
    chain.successors.resize(n);
    chain.goal_flags.assign(n, 0);
    chain.goal_flags[n - 1] = 1;
    for (std::size_t i = 0; i < n; ++i) {
        chain.states[i] = {static_cast<AtomId>(i)};
        if (i + 1 < n)
            chain.successors[i].push_back({0, static_cast<StateId>(i + 1)});
    }
    chain.goal_distance = goal_distances(chain);
    const auto vi = runtime::value_iteration(chain, gamma);
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(n - 1 - i);
        err = std::max(err, std::abs(vi.values[i] - (1 - std::pow(gamma, d)) / (1 - gamma)));
    }
    line(err < 1e-9, "chain value iteration");
    return ok ? 0 : 1;
}

int cmd_generate(const CliConfig& c) {
    const int n = c.size;
    std::string text;
    if (c.family == "gripper")
        text = gen::gripper(n);
    else if (c.family == "blocks")
        text = gen::blocks(n, c.seed, c.single);
    else if (c.family == "delivery")
        text = gen::delivery(n, n, std::max(1, n - 1), c.seed);
    else if (c.family == "spanner")
        text = gen::spanner(n + 1, n, n, c.seed);
    else if (c.family == "visitall")
        text = gen::visitall(n, n);
    else if (c.family == "logistics")
        text = gen::logistics(std::max(1, n / 2), 2, 1, n, c.seed);
    else
        throw Error(ErrorCode::InvalidArgument, "unknown family " + c.family);
    const auto name = pddl::read_sexprs(text).front()[1][1].token;
    const auto path = output_dir(c) / (name + ".pddl");
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    std::cout << path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CliConfig c;
    CLI::App app{"Learn and run general policies for classical planning domains"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", c.out_dir, "Output directory (default: $GENPLAN_OUT or .)");
    app.add_option("--seed", c.seed, "Random seed");
    app.add_flag("-v,--verbose", c.verbosity, "More output");

    auto* parse = app.add_subcommand("parse", "Parse and validate a domain and optionally an instance");
    parse->add_option("--domain", c.domain)->required()->check(CLI::ExistingFile);
    parse->add_option("--instance", c.instance)->check(CLI::ExistingFile);
    parse->add_option("--derived", c.derived)->check(CLI::ExistingFile);

    auto* expand_cmd = app.add_subcommand("expand", "Expand the reachable state space of an instance");
    expand_cmd->add_option("--domain", c.domain)->required()->check(CLI::ExistingFile);
    expand_cmd->add_option("--instance", c.instance)->required()->check(CLI::ExistingFile);
    expand_cmd->add_option("--derived", c.derived)->check(CLI::ExistingFile);
    expand_cmd->add_option("--max-states", c.max_states, "Expansion cap");
    expand_cmd->add_flag("--distances", c.distances, "Print the goal-distance histogram");
    expand_cmd->add_flag("--cache", c.cache, "Write the transition system to the output directory");

    auto* dataset = app.add_subcommand("dataset", "Measure instances and write a split manifest");
    dataset->add_option("--domain", c.domain)->required()->check(CLI::ExistingFile);
    dataset->add_option("--derived", c.derived)->check(CLI::ExistingFile);
    dataset->add_option("--instances", c.instances)->required()->check(CLI::ExistingFile);
    dataset->add_option("--train", c.train_count, "Number of training instances");
    dataset->add_option("--validation", c.validation_count, "Number of validation instances");
    dataset->add_option("--max-train-transitions", c.max_train_transitions);
    dataset->add_option("--max-states", c.max_states, "Expansion cap");

    auto* train_cmd = app.add_subcommand("train", "Train a policy on a manifest");
    train_cmd->add_option("--manifest", c.manifest)->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--algorithm", c.algorithm)->check(CLI::IsMember({"ac1", "acm", "subopt"}));
    train_cmd->add_option("--gamma", c.gamma);
    train_cmd->add_option("--lr", c.lr);
    train_cmd->add_option("--trajectory-len", c.trajectory_len);
    train_cmd->add_option("--batch", c.batch);
    train_cmd->add_option("--steps", c.steps);
    train_cmd->add_option("--seconds", c.seconds, "Wall-clock limit per seed");
    train_cmd->add_option("--seeds", c.seeds, "Number of seeds, starting at --seed");
    train_cmd->add_option("--k", c.k, "Embedding size");
    train_cmd->add_option("--layers", c.layers);
    train_cmd->add_option("--aggregation", c.aggregation)->check(CLI::IsMember({"sum", "max", "smoothmax"}));
    train_cmd->add_option("--config", c.config_file, "JSON file with trainer settings")->check(CLI::ExistingFile);

    auto* eval = app.add_subcommand("eval", "Run a trained policy on test instances");
    eval->add_option("--checkpoint", c.checkpoint)->required()->check(CLI::ExistingFile);
    auto* eval_domain = eval->add_option("--domain", c.domain)->check(CLI::ExistingFile);
    eval->add_option("--derived", c.derived)->check(CLI::ExistingFile);
    eval->add_option("--instances", c.instances)->check(CLI::ExistingFile)->needs(eval_domain);
    auto* eval_manifest = eval->add_option("--manifest", c.manifest)->check(CLI::ExistingFile);
    eval_manifest->excludes(eval_domain);
    eval->add_option("--mode", c.mode)->check(CLI::IsMember({"stochastic", "deterministic", "critic-greedy"}));
    eval->add_option("--step-cap", c.step_cap);
    eval->add_option("--oracle-states", c.oracle_states, "Expansion cap for optimal plan lengths");

    auto* selftest = app.add_subcommand("selftest", "Run built-in numerical checks");

    auto* generate = app.add_subcommand("generate", "Write a generated instance");
    generate->add_option("family", c.family)
        ->required()
        ->check(CLI::IsMember({"gripper", "blocks", "delivery", "spanner", "visitall", "logistics"}));
    generate->add_option("--size", c.size)->check(CLI::PositiveNumber);
    generate->add_flag("--single", c.single, "Blocks: single-tower goal");

    try {
        app.parse(argc, argv);
        if (eval->parsed() && c.domain.empty() && c.manifest.empty())
            throw CLI::RequiredError("eval needs --domain or --manifest");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (parse->parsed())
            return cmd_parse(c);
        if (expand_cmd->parsed())
            return cmd_expand(c);
        if (dataset->parsed())
            return cmd_dataset(c);
        if (train_cmd->parsed())
            return cmd_train(c);
        if (eval->parsed())
            return cmd_eval(c);
        if (selftest->parsed())
            return cmd_selftest(c);
        if (generate->parsed())
            return cmd_generate(c);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
