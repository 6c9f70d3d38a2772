#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ocbau/rng.hpp"

namespace ocbau {

/// Invalid ids, malformed allocations, bad experiment configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numerical solver failed to converge or bracket its root.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A statistic was requested from a state that cannot supply it
/// (e.g. a variance estimate with fewer than two observations).
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ground truth for a ranking-and-selection problem: k normal designs with
/// true means and variances. The best design (unique argmax of the means) is
/// resolved at construction.
class ProblemInstance {
  public:
    ProblemInstance(std::vector<double> means, std::vector<double> variances)
        : means_(std::move(means)), variances_(std::move(variances)) {
        if (means_.size() < 2) throw ConfigError("instance needs at least 2 designs");
        if (variances_.size() != means_.size())
            throw ConfigError("means/variances length mismatch");
        for (double v : variances_)
            if (!(v > 0.0)) throw ConfigError("variances must be strictly positive");
        best_ = 0;
        for (int i = 1; i < k(); ++i)
            if (means_[i] > means_[best_]) best_ = i;
        for (int i = 0; i < k(); ++i)
            if (i != best_ && means_[i] == means_[best_])
                throw ConfigError("best design must be the unique argmax of the means");
    }

    int k() const { return static_cast<int>(means_.size()); }
    int best() const { return best_; }
    double mean(int i) const { return means_.at(i); }
    double variance(int i) const { return variances_.at(i); }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& variances() const { return variances_; }

  private:
    std::vector<double> means_;
    std::vector<double> variances_;
    int best_ = 0;
};

/// A point on the k-simplex of sampling proportions.
class Allocation {
  public:
    explicit Allocation(std::vector<double> alphas) : alphas_(std::move(alphas)) {
        if (alphas_.size() < 2) throw ConfigError("allocation needs at least 2 entries");
        double sum = 0.0;
        for (double a : alphas_) {
            if (a < 0.0) throw ConfigError("allocation entries must be nonnegative");
            sum += a;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ConfigError("allocation must sum to 1 within 1e-12, got " + std::to_string(sum));
    }

    static Allocation equal(int k) {
        return Allocation(std::vector<double>(k, 1.0 / static_cast<double>(k)));
    }

    int k() const { return static_cast<int>(alphas_.size()); }
    double operator[](int i) const { return alphas_.at(i); }
    const std::vector<double>& values() const { return alphas_; }

  private:
    std::vector<double> alphas_;
};

/// Per-design running counts, sample means, and sums of squared deviations,
/// maintained with Welford's single-pass recurrence. The recurrence runs on
/// data shifted by the design's first observation, which keeps the deltas
/// exact even when all observations share a large offset.
class SufficientStats {
  public:
    explicit SufficientStats(int k)
        : n_(k, 0), pivot_(k, 0.0), shifted_mean_(k, 0.0), ssd_(k, 0.0) {
        if (k < 1) throw ConfigError("stats need at least one design");
    }

    void add(int design, double x) {
        auto i = static_cast<std::size_t>(design);
        n_.at(i) += 1;
        total_ += 1;
        if (n_[i] == 1) {
            pivot_[i] = x;
            return;
        }
        const double delta = (x - pivot_[i]) - shifted_mean_[i];
        shifted_mean_[i] += delta / static_cast<double>(n_[i]);
        ssd_[i] += delta * ((x - pivot_[i]) - shifted_mean_[i]);
    }

    int k() const { return static_cast<int>(n_.size()); }
    long long count(int i) const { return n_.at(i); }
    double mean(int i) const { return pivot_.at(i) + shifted_mean_.at(i); }
    double ssd(int i) const { return ssd_.at(i); }
    long long total() const { return total_; }

  private:
    std::vector<long long> n_;
    std::vector<double> pivot_;
    std::vector<double> shifted_mean_;
    std::vector<double> ssd_;
    long long total_ = 0;
};

/// Functional form of SufficientStats::add.
inline SufficientStats update_stats(SufficientStats stats, int design, double observation) {
    stats.add(design, observation);
    return stats;
}

/// Location-scale Student-t marginal for one design's unknown mean.
struct StudentTMarginal {
    double df;
    double location;
    double scale;
};

/// Posterior beliefs under the experimental normal-inverse-gamma prior with
/// a0 = 1/2, b0 = 0, mu0 = 0, lambda0 = 0. Conjugate updating with N
/// observations gives lambda_n = N, a_n = (N+1)/2, b_n = ssd/2, so
///   E[mu_i]     = sample mean,
///   E[sigma_i^2] = (ssd/2) / (a_n - 1) = ssd/(N-1)  (unbiased sample variance),
///   mu_i | data ~ t_{N+1}(sample mean, sqrt(b_n/(a_n lambda_n)))
///              = t_{N+1}(sample mean, sqrt(ssd/(N(N+1)))).
class PosteriorState {
  public:
    explicit PosteriorState(int k) : stats_(k) {}
    explicit PosteriorState(SufficientStats stats) : stats_(std::move(stats)) {}

    const SufficientStats& stats() const { return stats_; }
    SufficientStats& stats() { return stats_; }
    int k() const { return stats_.k(); }

    double mean(int i) const {
        if (stats_.count(i) < 1) throw EstimationError("posterior mean needs at least 1 sample");
        return stats_.mean(i);
    }

    double variance(int i) const {
        const long long n = stats_.count(i);
        if (n < 2) throw EstimationError("posterior variance needs at least 2 samples");
        return stats_.ssd(i) / static_cast<double>(n - 1);
    }

    /// Degrees of freedom of the Student-t marginal for design i's mean.
    double dof(int i) const {
        if (stats_.count(i) < 2) throw EstimationError("marginal needs at least 2 samples");
        return static_cast<double>(stats_.count(i) + 1);
    }

    StudentTMarginal marginal(int i) const {
        const long long n = stats_.count(i);
        if (n < 2) throw EstimationError("marginal needs at least 2 samples");
        const double nd = static_cast<double>(n);
        return StudentTMarginal{nd + 1.0, stats_.mean(i),
                                std::sqrt(stats_.ssd(i) / (nd * (nd + 1.0)))};
    }

  private:
    SufficientStats stats_;
};

struct BestSelection {
    int index;
    bool tied;
};

/// Argmax of the posterior means. Ties go to the tied design with the fewest
/// samples (then lowest index), matching the estimated-best convention used
/// by the sequential policies and the selection rule.
inline BestSelection select_best(const PosteriorState& state) {
    const auto& s = state.stats();
    int best = 0;
    for (int i = 1; i < s.k(); ++i)
        if (s.mean(i) > s.mean(best)) best = i;
    bool tied = false;
    for (int i = 0; i < s.k(); ++i) {
        if (i == best || s.mean(i) != s.mean(best)) continue;
        tied = true;
        if (s.count(i) < s.count(best)) best = i;
    }
    return BestSelection{best, tied};
}

/// One observation from design i's true sampling distribution N(mu_i, sigma_i^2).
inline double sample_observation(const ProblemInstance& inst, int design, Rng& rng) {
    return rng.normal(inst.mean(design), std::sqrt(inst.variance(design)));
}

/// Synthetic benchmark instances. Ids 1/2 use means -1.5(i-1), ids 3/4 use
/// -0.5(i-1); ids 1/3 have variance 4, ids 2/4 have variance 25. Design 1
/// is always the best.
inline ProblemInstance make_synthetic_instance(int id, int k = 10) {
    if (id < 1 || id > 4) throw ConfigError("synthetic instance id must be in 1..4");
    if (k < 2) throw ConfigError("instance needs at least 2 designs");
    const double slope = (id <= 2) ? -1.5 : -0.5;
    const double var = (id == 1 || id == 3) ? 4.0 : 25.0;
    std::vector<double> means(k), variances(k, var);
    for (int i = 0; i < k; ++i) means[i] = slope * static_cast<double>(i);
    return ProblemInstance(std::move(means), std::move(variances));
}

/// Dose-finding instances on the Brain-Cousens hormesis curve
///   mu_i = c1 + (c2 - c1 + 100 c3 i) / (1 + exp(c5 (log(100 i) - log(c4)))),
/// i = 1..10, with sigma_i = 0.1 mu_i. Id 5 uses c = (2, 80, 0.3, 600, 4)
/// (best dose 4), id 6 uses c = (2, 100, 0.2, 400, 5) (best dose 2).
inline ProblemInstance make_dose_instance(int id) {
    if (id < 5 || id > 6) throw ConfigError("dose instance id must be 5 or 6");
    const double c1 = 2.0;
    const double c2 = (id == 5) ? 80.0 : 100.0;
    const double c3 = (id == 5) ? 0.3 : 0.2;
    const double c4 = (id == 5) ? 600.0 : 400.0;
    const double c5 = (id == 5) ? 4.0 : 5.0;
    const int k = 10;
    std::vector<double> means(k), variances(k);
    for (int i = 1; i <= k; ++i) {
        const double dose = 100.0 * static_cast<double>(i);
        const double mu = c1 + (c2 - c1 + c3 * dose) / (1.0 + std::exp(c5 * (std::log(dose) - std::log(c4))));
        means[i - 1] = mu;
        variances[i - 1] = (0.1 * mu) * (0.1 * mu);
    }
    return ProblemInstance(std::move(means), std::move(variances));
}

/// Dispatch over all built-in instance ids 1..6. k applies to ids 1..4; the
/// dose instances are fixed at k = 10.
inline ProblemInstance make_builtin_instance(int id, int k = 10) {
    if (id >= 1 && id <= 4) return make_synthetic_instance(id, k);
    if (id == 5 || id == 6) return make_dose_instance(id);
    throw ConfigError("built-in instance id must be in 1..6");
}

} // namespace ocbau
