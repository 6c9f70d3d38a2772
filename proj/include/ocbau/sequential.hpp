#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ocbau/core.hpp"
#include "ocbau/rate.hpp"
#include "ocbau/rng.hpp"
#include "ocbau/student_t.hpp"

namespace ocbau {

enum class PolicyKind { OcbaU, OcbaK, ExpectedImprovement, Equal };

inline const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::OcbaU: return "ocba-u";
        case PolicyKind::OcbaK: return "ocba-k";
        case PolicyKind::ExpectedImprovement: return "ei";
        case PolicyKind::Equal: return "equal";
    }
    throw ConfigError("unknown policy kind");
}

inline PolicyKind parse_policy(const std::string& name) {
    if (name == "ocba-u") return PolicyKind::OcbaU;
    if (name == "ocba-k") return PolicyKind::OcbaK;
    if (name == "ei") return PolicyKind::ExpectedImprovement;
    if (name == "equal") return PolicyKind::Equal;
    throw ConfigError("unknown policy '" + name + "' (expected ocba-u, ocba-k, ei, equal)");
}

/// Mutable state one policy run carries between steps. best/best_tied mirror
/// the estimated-best selection rule of select_best and are refreshed by the
/// run loop before each decision.
struct PolicyState {
    PosteriorState posterior;
    int best = 0;
    bool best_tied = false;

    explicit PolicyState(int k) : posterior(k) {}

    int k() const { return posterior.k(); }
    long long step() const { return posterior.stats().total(); }

    double alpha_hat(int i) const {
        return static_cast<double>(posterior.stats().count(i)) / static_cast<double>(step());
    }

    void refresh_best() {
        const BestSelection sel = select_best(posterior);
        best = sel.index;
        best_tied = sel.tied;
    }

    void add_observation(int design, double x) { posterior.stats().add(design, x); }
};

struct PlugInRate {
    double v_hat;
    double phi_hat; // smallest minimizer of the plug-in inner problem
};

/// Plug-in pairwise rate for non-best design i: the rate machinery evaluated
/// at the posterior means/variances and empirical proportions.
inline PlugInRate plug_in_rate(int i, const PolicyState& state) {
    const int b = state.best;
    if (i == b) throw EstimationError("plug_in_rate is defined for non-best designs only");
    const PosteriorState& post = state.posterior;
    if (post.stats().count(i) < 2 || post.stats().count(b) < 2)
        throw EstimationError("plug_in_rate needs at least 2 samples per design");
    const double var_i = post.variance(i);
    const double var_b = post.variance(b);
    if (!(var_i > 0.0) || !(var_b > 0.0))
        throw EstimationError("plug_in_rate: degenerate variance estimate");
    const PairParams p(post.mean(i), var_i, post.mean(b), var_b);
    const double a_b = state.alpha_hat(b);
    const MinimizerPair mp = phi_minimizers(state.alpha_hat(i) / a_b, p);
    return PlugInRate{0.5 * a_b * mp.w_value, mp.phi_min};
}

/// Per-step plug-in quantities for every non-best design (entries for the
/// best design are unused).
struct PlugInSnapshot {
    int best;
    std::vector<double> v_hat;
    std::vector<double> phi_hat;
    std::vector<double> u_hat;      // log(1 + (mu_hat_i - phi_hat_i)^2 / var_hat_i)
    std::vector<double> u_star_hat; // log(1 + (mu_hat_b - phi_hat_i)^2 / var_hat_b)
};

inline PlugInSnapshot plug_in_snapshot(const PolicyState& state) {
    const int k = state.k();
    const int b = state.best;
    PlugInSnapshot snap{b,
                        std::vector<double>(k, std::numeric_limits<double>::infinity()),
                        std::vector<double>(k, 0.0), std::vector<double>(k, 0.0),
                        std::vector<double>(k, 0.0)};
    const PosteriorState& post = state.posterior;
    for (int i = 0; i < k; ++i) {
        if (i == b) continue;
        const PlugInRate pr = plug_in_rate(i, state);
        snap.v_hat[i] = pr.v_hat;
        snap.phi_hat[i] = pr.phi_hat;
        const double di = post.mean(i) - pr.phi_hat;
        const double db = post.mean(b) - pr.phi_hat;
        snap.u_hat[i] = std::log1p(di * di / post.variance(i));
        snap.u_star_hat[i] = std::log1p(db * db / post.variance(b));
    }
    return snap;
}

/// One step of the unknown-variance OCBA rule. Ties in the estimated best
/// sample the tied design with the fewest samples; otherwise the budget-
/// balance sum sum_i U*_i/U_i decides between the estimated best (> 1) and
/// the non-best design with the smallest plug-in rate (ties to lowest index).
inline int ocba_u_step(const PolicyState& state) {
    if (state.best_tied) return state.best;
    const PlugInSnapshot snap = plug_in_snapshot(state);
    int j = -1;
    for (int i = 0; i < state.k(); ++i) {
        if (i == snap.best) continue;
        if (j < 0 || snap.v_hat[i] < snap.v_hat[j]) j = i;
    }
    double sum = 0.0;
    for (int i = 0; i < state.k(); ++i) {
        if (i == snap.best) continue;
        sum += (snap.u_hat[i] > 0.0) ? snap.u_star_hat[i] / snap.u_hat[i]
                                     : std::numeric_limits<double>::infinity();
    }
    return (sum > 1.0) ? snap.best : j;
}

/// Known-variance analog of ocba_u_step: plug-in total-balance sum
/// sum_i (var_b/alpha_b^2)/(var_i/alpha_i^2) decides for the estimated best,
/// otherwise the smallest plug-in known-variance pairwise rate is sampled.
inline int ocba_k_step(const PolicyState& state) {
    if (state.best_tied) return state.best;
    const int b = state.best;
    const PosteriorState& post = state.posterior;
    const double var_b = post.variance(b);
    const double a_b = state.alpha_hat(b);
    if (!(var_b > 0.0)) throw EstimationError("ocba_k_step: degenerate variance estimate");

    double sum = 0.0;
    int j = -1;
    double j_rate = std::numeric_limits<double>::infinity();
    for (int i = 0; i < state.k(); ++i) {
        if (i == b) continue;
        const double var_i = post.variance(i);
        if (!(var_i > 0.0)) throw EstimationError("ocba_k_step: degenerate variance estimate");
        const double a_i = state.alpha_hat(i);
        sum += (var_b / (a_b * a_b)) / (var_i / (a_i * a_i));
        const double gap = post.mean(b) - post.mean(i);
        const double rate = gap * gap / (2.0 * (var_b / a_b + var_i / a_i));
        if (rate < j_rate) {
            j_rate = rate;
            j = i;
        }
    }
    return (sum > 1.0) ? b : j;
}

/// Student-t expected improvement with nu_i = N_i - 1 and scale
/// sigma_hat_i / sqrt(N_i). Non-best designs measure the gap to the
/// estimated best; the estimated best measures the gap to the runner-up.
inline int ei_step(const PolicyState& state) {
    const int k = state.k();
    const int b = state.best;
    const PosteriorState& post = state.posterior;

    double second = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        if (i != b) second = std::max(second, post.mean(i));

    int pick = -1;
    double pick_ei = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        const long long n = post.stats().count(i);
        const double nu = static_cast<double>(n - 1);
        if (!(nu > 1.0)) throw EstimationError("ei_step requires at least 3 samples per design");
        const double s = std::sqrt(post.variance(i) / static_cast<double>(n));
        if (!(s > 0.0)) throw EstimationError("ei_step: degenerate scale estimate");
        const double gap = (i == b) ? post.mean(b) - second : post.mean(b) - post.mean(i);
        const double ei = s * ei_psi(nu, gap / s);
        if (ei > pick_ei) {
            pick_ei = ei;
            pick = i;
        }
    }
    return pick;
}

/// Round-robin: the design with the fewest samples, ties to lowest index.
inline int equal_step(const PolicyState& state) {
    int pick = 0;
    for (int i = 1; i < state.k(); ++i)
        if (state.posterior.stats().count(i) < state.posterior.stats().count(pick)) pick = i;
    return pick;
}

inline int policy_step(PolicyKind kind, const PolicyState& state) {
    switch (kind) {
        case PolicyKind::OcbaU: return ocba_u_step(state);
        case PolicyKind::OcbaK: return ocba_k_step(state);
        case PolicyKind::ExpectedImprovement: return ei_step(state);
        case PolicyKind::Equal: return equal_step(state);
    }
    throw ConfigError("unknown policy kind");
}

struct CheckpointRecord {
    long long budget;
    PosteriorState posterior; // deep snapshot, PFS estimation happens offline
    int selected_best;
};

struct Trajectory {
    std::vector<int> decisions; // one entry per post-initialization step
    std::vector<CheckpointRecord> checkpoints;
    PolicyState final_state;
};

/// Runs one policy to the given budget: n0 initial replications per design
/// (design-major order), then one policy-chosen observation per step.
/// Deterministic given (kind, inst, budget, n0, rng config).
inline Trajectory run_policy(PolicyKind kind, const ProblemInstance& inst, long long budget,
                             int n0, RngConfig rng_cfg, const std::vector<long long>& checkpoints = {}) {
    const int k = inst.k();
    if (n0 < 3) throw ConfigError("n0 must be at least 3");
    if (budget < static_cast<long long>(k) * n0)
        throw ConfigError("budget must cover n0 replications of every design");
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        if (checkpoints[c] < static_cast<long long>(k) * n0 || checkpoints[c] > budget)
            throw ConfigError("checkpoints must lie in [k*n0, budget]");
        if (c > 0 && checkpoints[c] <= checkpoints[c - 1])
            throw ConfigError("checkpoints must be strictly increasing");
    }

    Rng rng(rng_cfg);
    Trajectory traj{{}, {}, PolicyState(k)};
    PolicyState& state = traj.final_state;
    traj.decisions.reserve(static_cast<std::size_t>(budget - static_cast<long long>(k) * n0));

    for (int i = 0; i < k; ++i)
        for (int rep = 0; rep < n0; ++rep) state.add_observation(i, sample_observation(inst, i, rng));

    std::size_t next_ck = 0;
    const auto record_checkpoint = [&]() {
        while (next_ck < checkpoints.size() && checkpoints[next_ck] == state.step()) {
            traj.checkpoints.push_back(
                CheckpointRecord{state.step(), state.posterior, select_best(state.posterior).index});
            ++next_ck;
        }
    };
    record_checkpoint();

    while (state.step() < budget) {
        state.refresh_best();
        const int design = policy_step(kind, state);
        state.add_observation(design, sample_observation(inst, design, rng));
        traj.decisions.push_back(design);
        record_checkpoint();
    }
    state.refresh_best();
    return traj;
}

} // namespace ocbau
