// Independent oracles used only by the test suites: brute-force grid
// minimization, two-pass statistics, and quadrature for the posterior
// comparison probability. These deliberately avoid the library's solution
// paths so they can serve as cross-checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ocbau/core.hpp"
#include "ocbau/rate.hpp"
#include "ocbau/student_t.hpp"

namespace testing_oracles {

struct GridMin {
    double g;
    double phi;
};

// Brute-force minimization of g(., r) over a uniform grid on [mu_i, mu_star].
inline GridMin grid_min_g(double r, const ocbau::PairParams& p, int points = 100000) {
    GridMin best{std::numeric_limits<double>::infinity(), p.mu_i};
    for (int s = 0; s <= points; ++s) {
        const double phi =
            p.mu_i + p.gap() * static_cast<double>(s) / static_cast<double>(points);
        const double g = ocbau::g_value(phi, r, p);
        if (g < best.g) best = GridMin{g, phi};
    }
    return best;
}

// Two-term objective of the pairwise rate minimized directly on a phi grid,
// bypassing the W(r) reduction.
inline double grid_min_v(double alpha_i, double alpha_star, const ocbau::PairParams& p,
                         int points = 100000) {
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= points; ++s) {
        const double phi =
            p.mu_i + p.gap() * static_cast<double>(s) / static_cast<double>(points);
        const double di = p.mu_i - phi;
        const double ds = p.mu_star - phi;
        const double val = 0.5 * alpha_i * std::log1p(di * di / p.var_i) +
                           0.5 * alpha_star * std::log1p(ds * ds / p.var_star);
        best = std::min(best, val);
    }
    return best;
}

struct TwoPass {
    double mean;
    double ssd;
};

// Pivot-shifted two-pass statistics; the shift keeps the accumulation exact
// even when the data sit on a large common offset.
inline TwoPass two_pass_stats(const std::vector<double>& xs) {
    const double pivot = xs.front();
    double shifted_mean = 0.0;
    for (double x : xs) shifted_mean += x - pivot;
    shifted_mean /= static_cast<double>(xs.size());
    double ssd = 0.0;
    for (double x : xs) {
        const double d = (x - pivot) - shifted_mean;
        ssd += d * d;
    }
    return TwoPass{pivot + shifted_mean, ssd};
}

// P(draw_1 > draw_2) for independent location-scale Student-t marginals,
// via composite Simpson integration of f_1(x) F_2(x).
inline double t_comparison_probability(const ocbau::StudentTMarginal& m1,
                                       const ocbau::StudentTMarginal& m2,
                                       int intervals = 200000) {
    const double span = 60.0 * std::max(m1.scale, m2.scale);
    const double lo = std::min(m1.location, m2.location) - span;
    const double hi = std::max(m1.location, m2.location) + span;
    const double h = (hi - lo) / static_cast<double>(intervals);
    const auto f = [&](double x) {
        const double z1 = (x - m1.location) / m1.scale;
        const double z2 = (x - m2.location) / m2.scale;
        return ocbau::student_t_pdf(m1.df, z1) / m1.scale * ocbau::student_t_cdf(m2.df, z2);
    };
    double sum = f(lo) + f(hi);
    for (int s = 1; s < intervals; ++s) sum += f(lo + h * s) * ((s % 2) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Random pair parameters with a comfortably separated mean gap.
inline ocbau::PairParams random_pair(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> mean_dist(-10.0, 10.0);
    std::uniform_real_distribution<double> gap_dist(0.3, 12.0);
    std::uniform_real_distribution<double> var_dist(0.2, 30.0);
    const double mu_i = mean_dist(gen);
    return ocbau::PairParams(mu_i, var_dist(gen), mu_i + gap_dist(gen), var_dist(gen));
}

// Random k-design instance with distinct means.
inline ocbau::ProblemInstance random_instance(std::mt19937_64& gen, int k) {
    std::uniform_real_distribution<double> gap_dist(0.4, 3.0);
    std::uniform_real_distribution<double> var_dist(0.5, 25.0);
    std::vector<double> means(k), variances(k);
    double mu = 0.0;
    for (int i = 0; i < k; ++i) {
        means[i] = mu;
        mu -= gap_dist(gen);
        variances[i] = var_dist(gen);
    }
    return ocbau::ProblemInstance(std::move(means), std::move(variances));
}

} // namespace testing_oracles
