#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ocbau/core.hpp"
#include "ocbau/sequential.hpp"

namespace ocbau {

inline nlohmann::json instance_to_json(const ProblemInstance& inst) {
    return nlohmann::json{{"means", inst.means()}, {"variances", inst.variances()}};
}

inline ProblemInstance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("means") || !j.contains("variances"))
        throw ConfigError("instance JSON must be an object with 'means' and 'variances' arrays");
    try {
        return ProblemInstance(j.at("means").get<std::vector<double>>(),
                               j.at("variances").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed instance JSON: ") + e.what());
    }
}

/// One JSON-lines record per trajectory; checkpoints carry the full posterior
/// sufficient statistics so PFS can be recomputed offline.
inline nlohmann::json trajectory_to_json(const Trajectory& traj, const std::string& policy,
                                         int rep) {
    nlohmann::json j{{"policy", policy}, {"rep", rep}, {"decisions", traj.decisions}};
    nlohmann::json cks = nlohmann::json::array();
    for (const CheckpointRecord& ck : traj.checkpoints) {
        const SufficientStats& s = ck.posterior.stats();
        std::vector<long long> counts(s.k());
        std::vector<double> means(s.k()), ssds(s.k());
        for (int i = 0; i < s.k(); ++i) {
            counts[i] = s.count(i);
            means[i] = s.mean(i);
            ssds[i] = s.ssd(i);
        }
        cks.push_back(nlohmann::json{{"budget", ck.budget},
                                     {"selected_best", ck.selected_best + 1},
                                     {"counts", counts},
                                     {"means", means},
                                     {"ssd", ssds}});
    }
    j["checkpoints"] = std::move(cks);
    return j;
}

} // namespace ocbau
