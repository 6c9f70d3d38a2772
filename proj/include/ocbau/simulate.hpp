#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "ocbau/core.hpp"
#include "ocbau/rng.hpp"
#include "ocbau/sequential.hpp"

namespace ocbau {

namespace detail {
// Stream-purpose labels keeping observation and PFS-estimation streams apart.
inline constexpr std::uint64_t kObservationStream = 0x0b5e7a11;
inline constexpr std::uint64_t kPfsStream = 0x9f5e57a7;
} // namespace detail

struct ExperimentConfig {
    ProblemInstance instance;
    std::vector<PolicyKind> policies;
    long long budget = 0;
    int n0 = 3;
    std::vector<long long> checkpoints; // PFS is estimated only at these budgets
    int macroreps = 1000;
    long long pfs_samples = 250000;
    std::uint64_t seed = 0;
    int threads = 0;                    // 0 = hardware concurrency
    bool common_random_numbers = false; // share observation streams across policies

    void validate() const {
        if (policies.empty()) throw ConfigError("at least one policy is required");
        if (macroreps < 1) throw ConfigError("macroreps must be at least 1");
        if (pfs_samples < 1) throw ConfigError("pfs_samples must be at least 1");
        if (checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
        const long long lo = static_cast<long long>(instance.k()) * n0;
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            if (checkpoints[c] < lo || checkpoints[c] > budget)
                throw ConfigError("checkpoints must lie in [k*n0, budget]");
            if (c > 0 && checkpoints[c] <= checkpoints[c - 1])
                throw ConfigError("checkpoints must be strictly increasing");
        }
    }
};

struct MetricStats {
    double mean = 0.0;
    double se = 0.0;
};

struct MacroSummary {
    std::vector<PolicyKind> policies;
    std::vector<long long> checkpoints;
    // Indexed [policy][checkpoint].
    std::vector<std::vector<MetricStats>> pfs_bayes;
    std::vector<std::vector<MetricStats>> pfs_freq;
    // Final empirical proportions across replications, indexed [policy][design].
    std::vector<std::vector<MetricStats>> final_alpha;
};

/// Monte Carlo estimate of the posterior false-selection probability: the
/// fraction of joint posterior draws in which the design with the highest
/// posterior mean does not have the highest drawn value. Each design's mean
/// is drawn from its Student-t marginal (independent across designs).
inline double estimate_bayes_pfs(const PosteriorState& state, long long m_samples, Rng& rng) {
    if (m_samples < 1) throw EstimationError("estimate_bayes_pfs needs at least 1 sample");
    const int k = state.k();
    std::vector<StudentTMarginal> marginals;
    marginals.reserve(k);
    for (int i = 0; i < k; ++i) marginals.push_back(state.marginal(i));
    const int believed_best = select_best(state).index;

    std::vector<std::student_t_distribution<double>> tdists;
    tdists.reserve(k);
    for (int i = 0; i < k; ++i) tdists.emplace_back(marginals[i].df);

    long long wrong = 0;
    for (long long s = 0; s < m_samples; ++s) {
        int argmax = 0;
        double top = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) {
            const double draw = marginals[i].location + marginals[i].scale * tdists[i](rng.engine());
            if (draw > top) {
                top = draw;
                argmax = i;
            }
        }
        wrong += (argmax != believed_best);
    }
    return static_cast<double>(wrong) / static_cast<double>(m_samples);
}

/// True iff the design selected from the posterior coincides with the true best.
inline bool frequentist_correct(const PosteriorState& state, const ProblemInstance& inst) {
    return select_best(state).index == inst.best();
}

namespace detail {

struct RepResult {
    std::vector<double> pfs_bayes; // per checkpoint
    std::vector<double> pfs_freq;  // per checkpoint, 0/1 indicator
    std::vector<double> final_alpha;
};

inline MetricStats reduce_stats(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return MetricStats{mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return MetricStats{mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

} // namespace detail

/// Runs the full policy x macroreplication grid. Replications execute in
/// parallel on independent streams; the reduction is ordered by replication
/// index, so results are identical for any thread count. When trajectories
/// is non-null it receives every run, indexed [policy][rep].
inline MacroSummary run_macroreps(const ExperimentConfig& cfg,
                                  std::vector<std::vector<Trajectory>>* trajectories = nullptr) {
    cfg.validate();
    const int P = static_cast<int>(cfg.policies.size());
    const int R = cfg.macroreps;
    const int C = static_cast<int>(cfg.checkpoints.size());
    const int k = cfg.instance.k();

    std::vector<std::vector<detail::RepResult>> results(
        P, std::vector<detail::RepResult>(R));
    if (trajectories) trajectories->assign(P, std::vector<Trajectory>(R, Trajectory{{}, {}, PolicyState(k)}));

    const auto run_one = [&](int p, int rep) {
        const std::uint64_t obs_stream =
            cfg.common_random_numbers
                ? derive_stream({detail::kObservationStream, static_cast<std::uint64_t>(rep)})
                : derive_stream({detail::kObservationStream, static_cast<std::uint64_t>(p),
                                 static_cast<std::uint64_t>(rep)});
        Trajectory traj = run_policy(cfg.policies[p], cfg.instance, cfg.budget, cfg.n0,
                                     RngConfig{cfg.seed, obs_stream}, cfg.checkpoints);
        detail::RepResult out;
        out.pfs_bayes.resize(C);
        out.pfs_freq.resize(C);
        for (int c = 0; c < C; ++c) {
            const CheckpointRecord& ck = traj.checkpoints[c];
            Rng pfs_rng(cfg.seed,
                        derive_stream({detail::kPfsStream, static_cast<std::uint64_t>(p),
                                       static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(c)}));
            out.pfs_bayes[c] = estimate_bayes_pfs(ck.posterior, cfg.pfs_samples, pfs_rng);
            out.pfs_freq[c] = frequentist_correct(ck.posterior, cfg.instance) ? 0.0 : 1.0;
        }
        out.final_alpha.resize(k);
        const auto& stats = traj.final_state.posterior.stats();
        for (int i = 0; i < k; ++i)
            out.final_alpha[i] =
                static_cast<double>(stats.count(i)) / static_cast<double>(stats.total());
        results[p][rep] = std::move(out);
        if (trajectories) (*trajectories)[p][rep] = std::move(traj);
    };

    const int total = P * R;
    int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, total);
    if (workers == 1) {
        for (int idx = 0; idx < total; ++idx) run_one(idx / R, idx % R);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1))
                    run_one(idx / R, idx % R);
            });
        for (auto& t : pool) t.join();
    }

    MacroSummary summary;
    summary.policies = cfg.policies;
    summary.checkpoints = cfg.checkpoints;
    summary.pfs_bayes.assign(P, std::vector<MetricStats>(C));
    summary.pfs_freq.assign(P, std::vector<MetricStats>(C));
    summary.final_alpha.assign(P, std::vector<MetricStats>(k));
    std::vector<double> column(R);
    for (int p = 0; p < P; ++p) {
        for (int c = 0; c < C; ++c) {
            for (int rep = 0; rep < R; ++rep) column[rep] = results[p][rep].pfs_bayes[c];
            summary.pfs_bayes[p][c] = detail::reduce_stats(column);
            for (int rep = 0; rep < R; ++rep) column[rep] = results[p][rep].pfs_freq[c];
            summary.pfs_freq[p][c] = detail::reduce_stats(column);
        }
        for (int i = 0; i < k; ++i) {
            for (int rep = 0; rep < R; ++rep) column[rep] = results[p][rep].final_alpha[i];
            summary.final_alpha[p][i] = detail::reduce_stats(column);
        }
    }
    return summary;
}

} // namespace ocbau
