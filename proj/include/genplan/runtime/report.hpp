#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace genplan::runtime {

/// Result of running a policy on one test instance.
struct InstanceResult {
    std::string name;
    bool solved = false;
    std::size_t length = 0;
    /// Optimal plan length when the oracle could compute it.
    std::optional<std::uint32_t> optimal;
    std::string termination;
    std::uint64_t seed = 0;
};

struct QualityReport {
    std::string mode;
    std::size_t total = 0;
    std::size_t solved = 0;
    /// Summed plan lengths over all solved instances.
    std::size_t length_sum = 0;
    /// Plan-length and optimal-length sums over solved instances with a known optimum.
    std::size_t policy_length = 0;
    std::size_t optimal_length = 0;
    std::size_t oracle_count = 0;
    std::vector<InstanceResult> instances;

    double coverage_percent() const { return total == 0 ? 0.0 : 100.0 * double(solved) / double(total); }
    std::optional<double> plan_quality() const {
        if (oracle_count == 0 || optimal_length == 0)
            return std::nullopt;
        return double(policy_length) / double(optimal_length);
    }

    /// "N (P %)"
    std::string coverage_text() const {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu (%.0f %%)", solved, coverage_percent());
        return buf;
    }

    /// "PQ = PL / OL (#)"
    std::string quality_text() const {
        char buf[96];
        if (auto pq = plan_quality())
            std::snprintf(buf, sizeof buf, "%.2f = %zu / %zu (%zu)", *pq, policy_length, optimal_length, oracle_count);
        else
            std::snprintf(buf, sizeof buf, "- = %zu / %zu (%zu)", policy_length, optimal_length, oracle_count);
        return buf;
    }

    std::string table() const {
        std::ostringstream out;
        out << "mode      " << mode << '\n';
        out << "Coverage  " << coverage_text() << '\n';
        out << "L         " << length_sum << '\n';
        out << "PQ        " << quality_text() << '\n';
        out << '\n';
        for (const auto& r : instances) {
            out << "  " << r.name << "  " << (r.solved ? "solved" : "failed") << "  len " << r.length;
            if (r.optimal)
                out << "  opt " << *r.optimal;
            if (!r.termination.empty())
                out << "  (" << r.termination << ")";
            out << '\n';
        }
        return out.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["mode"] = mode;
        j["total"] = total;
        j["solved"] = solved;
        j["coverage_percent"] = coverage_percent();
        j["L"] = length_sum;
        j["PL"] = policy_length;
        j["OL"] = optimal_length;
        j["oracle_count"] = oracle_count;
        if (auto pq = plan_quality())
            j["PQ"] = *pq;
        else
            j["PQ"] = nullptr;
        auto& list = j["instances"] = nlohmann::json::array();
        for (const auto& r : instances) {
            nlohmann::json e{{"name", r.name},
                             {"solved", r.solved},
                             {"length", r.length},
                             {"termination", r.termination},
                             {"seed", r.seed}};
            e["optimal"] = r.optimal ? nlohmann::json(*r.optimal) : nlohmann::json(nullptr);
            list.push_back(std::move(e));
        }
        return j;
    }
};

/// Coverage counts every instance; PL and OL sum only over solved instances
/// whose optimal length is known.
inline QualityReport quality_report(std::span<const InstanceResult> results, std::string mode = {}) {
    QualityReport r;
    r.mode = std::move(mode);
    r.total = results.size();
    for (const auto& x : results) {
        r.instances.push_back(x);
        if (!x.solved)
            continue;
        ++r.solved;
        r.length_sum += x.length;
        if (x.optimal) {
            r.policy_length += x.length;
            r.optimal_length += *x.optimal;
            ++r.oracle_count;
        }
    }
    return r;
}

} // namespace genplan::runtime
