#pragma once

#include "genplan/error.hpp"
#include "genplan/pddl/grounder.hpp"
#include "genplan/pddl/parser.hpp"
#include "genplan/state_space.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace genplan {

enum class Split { Train, Validation, Test };

inline std::string_view to_string(Split s) {
    switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
    }
    return "?";
}

inline Split parse_split(std::string_view s) {
    if (s == "train")
        return Split::Train;
    if (s == "validation")
        return Split::Validation;
    if (s == "test")
        return Split::Test;
    throw Error(ErrorCode::FormatError, "unknown split " + std::string(s));
}

struct ManifestEntry {
    std::string path;
    Split split = Split::Test;
    /// Unknown when the instance was too large to expand.
    std::optional<std::size_t> states;
    std::optional<std::size_t> transitions;
    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetLimits {
    /// Training instances above this transition count are left out of training.
    std::size_t max_train_transitions = 200'000;
    /// Expansion cap; larger instances become test-only.
    ExpansionLimits expansion{};
};

/// The smallest train_count instances train, the next validation_count
/// validate, the rest test.
struct SplitRule {
    std::size_t train_count = 1;
    std::size_t validation_count = 1;
};

struct DatasetManifest {
    std::string domain;
    std::string derived;
    std::size_t max_train_transitions = 200'000;
    std::vector<ManifestEntry> entries;
    std::vector<std::string> warnings;

    std::vector<const ManifestEntry*> split(Split s) const {
        std::vector<const ManifestEntry*> out;
        for (const auto& e : entries)
            if (e.split == s)
                out.push_back(&e);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["domain"] = domain;
        j["derived"] = derived;
        j["max_train_transitions"] = max_train_transitions;
        auto& list = j["instances"] = nlohmann::json::array();
        for (const auto& e : entries) {
            nlohmann::json x{{"path", e.path}, {"split", to_string(e.split)}};
            x["states"] = e.states ? nlohmann::json(*e.states) : nlohmann::json(nullptr);
            x["transitions"] = e.transitions ? nlohmann::json(*e.transitions) : nlohmann::json(nullptr);
            list.push_back(std::move(x));
        }
        return j;
    }

    static DatasetManifest from_json(const nlohmann::json& j) {
        try {
            DatasetManifest m;
            m.domain = j.at("domain").get<std::string>();
            m.derived = j.value("derived", std::string{});
            m.max_train_transitions = j.value("max_train_transitions", std::size_t{200'000});
            for (const auto& x : j.at("instances")) {
                ManifestEntry e;
                e.path = x.at("path").get<std::string>();
                e.split = parse_split(x.at("split").get<std::string>());
                if (x.contains("states") && !x["states"].is_null())
                    e.states = x["states"].get<std::size_t>();
                if (x.contains("transitions") && !x["transitions"].is_null())
                    e.transitions = x["transitions"].get<std::size_t>();
                m.entries.push_back(std::move(e));
            }
            return m;
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::FormatError, std::string("malformed manifest: ") + ex.what());
        }
    }
};

/// Parses a domain file and, when given, its derived-predicate side file.
inline std::shared_ptr<const pddl::DomainModel> load_domain(const std::string& domain_path,
                                                            const std::string& derived_path = {}) {
    auto d = pddl::parse_domain_file(domain_path);
    if (!derived_path.empty())
        pddl::add_derived_predicates_file(d, derived_path);
    return std::make_shared<const pddl::DomainModel>(std::move(d));
}

inline GroundedProblem load_problem(std::shared_ptr<const pddl::DomainModel> domain, const std::string& path) {
    auto instance = pddl::parse_instance_file(path, *domain);
    return pddl::ground(std::move(domain), std::move(instance));
}

/// Measures every instance and assigns splits by ascending state count.
inline DatasetManifest build_dataset(std::shared_ptr<const pddl::DomainModel> domain,
                                     const std::vector<std::string>& instance_paths, const DatasetLimits& limits = {},
                                     const SplitRule& rule = {}) {
    DatasetManifest m;
    m.max_train_transitions = limits.max_train_transitions;
    for (const auto& path : instance_paths) {
        ManifestEntry e;
        e.path = path;
        try {
            auto problem = load_problem(domain, path);
            auto ts = expand(problem, limits.expansion);
            e.states = ts.state_count();
            e.transitions = ts.transition_count();
        } catch (const Error& err) {
            if (err.code() != ErrorCode::CapacityExceeded)
                throw;
            m.warnings.push_back(path + ": too large to expand, test only");
        }
        m.entries.push_back(std::move(e));
    }
    // Measured instances first, by size; ties keep input order.
    std::stable_sort(m.entries.begin(), m.entries.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
        if (a.states.has_value() != b.states.has_value())
            return a.states.has_value();
        return a.states.value_or(0) < b.states.value_or(0);
    });
    std::size_t train = 0, validation = 0;
    for (auto& e : m.entries) {
        if (!e.states) {
            e.split = Split::Test;
        } else if (train < rule.train_count) {
            ++train;
            if (*e.transitions > limits.max_train_transitions) {
                m.warnings.push_back(e.path + ": " + std::to_string(*e.transitions) +
                                     " transitions exceed the training cap, moved to test");
                e.split = Split::Test;
            } else {
                e.split = Split::Train;
            }
        } else if (validation < rule.validation_count) {
            ++validation;
            e.split = Split::Validation;
        } else {
            e.split = Split::Test;
        }
    }
    if (m.split(Split::Train).empty())
        throw Error(ErrorCode::EmptyTrainingSplit, "no instance qualifies for training");
    return m;
}

inline void write_manifest(const std::string& path, const DatasetManifest& m) {
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out << m.to_json().dump(2) << '\n';
}

inline DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::FormatError, std::string("malformed manifest: ") + ex.what());
    }
    return DatasetManifest::from_json(j);
}

} // namespace genplan
