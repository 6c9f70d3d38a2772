#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ocbau/core.hpp"

namespace ocbau {

/// Parameters of one pairwise comparison, oriented so the second member is
/// the better design (mu_star > mu_i).
struct PairParams {
    double mu_i;
    double var_i;
    double mu_star;
    double var_star;

    PairParams(double mu_i_, double var_i_, double mu_star_, double var_star_)
        : mu_i(mu_i_), var_i(var_i_), mu_star(mu_star_), var_star(var_star_) {
        if (!(var_i > 0.0) || !(var_star > 0.0))
            throw ConfigError("pair variances must be strictly positive");
        if (!(mu_star > mu_i))
            throw ConfigError("pair must be oriented with mu_star > mu_i");
    }

    double gap() const { return mu_star - mu_i; }
};

/// Pair comparing design i against the instance's best design.
inline PairParams pair_against_best(const ProblemInstance& inst, int i) {
    return PairParams(inst.mean(i), inst.variance(i), inst.mean(inst.best()),
                      inst.variance(inst.best()));
}

/// Smallest and largest global minimizers of g(., r) together with the
/// attained minimum W(r). is_degenerate marks the measure-zero ratios where
/// two distinct minimizers are co-optimal and the argmin jumps.
struct MinimizerPair {
    double phi_min;
    double phi_max;
    double w_value;
    bool is_degenerate;
};

/// Relative tolerance under which two stationary values count as co-optimal.
inline constexpr double kDegeneracyTol = 1e-9;

/// Tag selecting the r -> infinity limit of the inner problem.
struct InfiniteRatio {};

/// g(phi, r) = r log(1 + (mu_i - phi)^2 / var_i) + log(1 + (mu_star - phi)^2 / var_star).
/// Nonnegative for r >= 0; the scaled pairwise rate is W(r) = min_phi g(phi, r).
inline double g_value(double phi, double r, const PairParams& p) {
    const double di = p.mu_i - phi;
    const double ds = p.mu_star - phi;
    return r * std::log1p(di * di / p.var_i) + std::log1p(ds * ds / p.var_star);
}

/// Numerator cubic of dg/dphi:
///   r (phi - mu_i)(var_star + (phi - mu_star)^2) + (phi - mu_star)(var_i + (phi - mu_i)^2).
/// The full derivative divides this by the product of the two (positive)
/// quadratic factors, so the sign of dg/dphi equals the sign of this value.
inline double g_derivative(double phi, double r, const PairParams& p) {
    const double di = phi - p.mu_i;
    const double ds = phi - p.mu_star;
    return r * di * (p.var_star + ds * ds) + ds * (p.var_i + di * di);
}

namespace detail {

// Real roots of the monic cubic x^3 + a x^2 + b x + c (Numerical Recipes
// trigonometric/Cardano form). Returns the root count (1 or 3); boundary
// cases with coincident roots fall in the 3-root branch via clamping.
inline int cubic_real_roots(double a, double b, double c, double roots[3]) {
    const double q = (a * a - 3.0 * b) / 9.0;
    const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    const double q3 = q * q * q;
    if (q > 0.0 && r * r <= q3) {
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
        const double scale = -2.0 * std::sqrt(q);
        const double third = a / 3.0;
        roots[0] = scale * std::cos(theta / 3.0) - third;
        roots[1] = scale * std::cos((theta + two_pi) / 3.0) - third;
        roots[2] = scale * std::cos((theta - two_pi) / 3.0) - third;
        return 3;
    }
    const double mag = std::abs(r) + std::sqrt(std::max(0.0, r * r - q3));
    double big = -std::copysign(std::cbrt(mag), r);
    const double small = (big == 0.0) ? 0.0 : q / big;
    roots[0] = big + small - a / 3.0;
    return 1;
}

// Stationary points of g(., r) in normalized coordinates x = (phi - mu_i)/gap.
// The numerator cubic becomes
//   q(x) = (r+1) x^3 - (2r+1) x^2 + (r (1 + tt) + ss) x - ss,
// with ss = var_i/gap^2, tt = var_star/gap^2; q(0) < 0 < q(1) for r > 0, and
// every real root lies in [0, 1] because the numerator is sign-definite
// outside the means. One Newton step per root repairs cancellation from the
// closed form.
inline int stationary_points(double r, double ss, double tt, double xs[3]) {
    const double a3 = r + 1.0;
    const double a2 = -(2.0 * r + 1.0);
    const double a1 = r * (1.0 + tt) + ss;
    const double a0 = -ss;
    double roots[3];
    const int n = cubic_real_roots(a2 / a3, a1 / a3, a0 / a3, roots);
    for (int j = 0; j < n; ++j) {
        double x = std::clamp(roots[j], 0.0, 1.0);
        for (int step = 0; step < 2; ++step) {
            const double q = ((a3 * x + a2) * x + a1) * x + a0;
            const double dq = (3.0 * a3 * x + 2.0 * a2) * x + a1;
            if (dq == 0.0) break;
            x = std::clamp(x - q / dq, 0.0, 1.0);
        }
        xs[j] = x;
    }
    return n;
}

} // namespace detail

/// Exact global minimizers of g(., r). All candidates come from the closed-form
/// roots of the numerator cubic restricted to [mu_i, mu_star]; roots whose
/// g-value is within tol (relative) of the minimum form the co-optimal set.
inline MinimizerPair phi_minimizers(double r, const PairParams& p, double tol = kDegeneracyTol) {
    if (!std::isfinite(r) || r < 0.0)
        throw std::domain_error("phi_minimizers requires finite r >= 0");
    if (!(tol > 0.0)) throw std::domain_error("tolerance must be positive");
    if (r == 0.0) return MinimizerPair{p.mu_star, p.mu_star, 0.0, false};

    const double gap = p.gap();
    double xs[3];
    const int n = detail::stationary_points(r, p.var_i / (gap * gap), p.var_star / (gap * gap), xs);

    double phis[3];
    double gs[3];
    double g_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        phis[j] = p.mu_i + gap * xs[j];
        gs[j] = g_value(phis[j], r, p);
        g_min = std::min(g_min, gs[j]);
    }

    const double g_tol = tol * std::max(1.0, std::abs(g_min));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        if (gs[j] > g_min + g_tol) continue;
        lo = std::min(lo, phis[j]);
        hi = std::max(hi, phis[j]);
    }
    const bool degenerate = (hi - lo) > tol * std::max(1.0, gap);
    return MinimizerPair{lo, hi, g_min, degenerate};
}

/// r -> infinity limit: both minimizers collapse onto mu_i. The attained
/// value has no finite representation on this path, so w_value is NaN.
inline MinimizerPair phi_minimizers(InfiniteRatio, const PairParams& p) {
    return MinimizerPair{p.mu_i, p.mu_i, std::numeric_limits<double>::quiet_NaN(), false};
}

/// W(r) = min_phi g(phi, r); strictly increasing with W(0) = 0.
inline double w_of_r(double r, const PairParams& p) {
    return phi_minimizers(r, p).w_value;
}

/// Least upper bound of W: lim_{r->inf} W(r) = log(1 + gap^2 / var_star).
inline double w_supremum(const PairParams& p) {
    return std::log1p(p.gap() * p.gap() / p.var_star);
}

/// Pairwise rate V(alpha_i, alpha_star) = (alpha_star / 2) W(alpha_i / alpha_star),
/// extended to alpha_star = 0 by continuity (W is bounded, so the limit is 0).
inline double v_rate(double alpha_i, double alpha_star, const PairParams& p) {
    if (alpha_i < 0.0 || alpha_star < 0.0)
        throw std::domain_error("v_rate requires nonnegative proportions");
    if (alpha_star == 0.0) return 0.0;
    return 0.5 * alpha_star * w_of_r(alpha_i / alpha_star, p);
}

/// The four log terms entering the budget-balance condition, evaluated at
/// both extreme minimizers.
struct UTerms {
    double u_min;      // log(1 + (mu_i - phi_min)^2 / var_i)
    double u_star_min; // log(1 + (mu_star - phi_min)^2 / var_star)
    double u_max;
    double u_star_max;
};

inline UTerms u_terms(double r, const PairParams& p) {
    const MinimizerPair mp = phi_minimizers(r, p);
    const auto u = [&p](double phi) {
        const double d = p.mu_i - phi;
        return std::log1p(d * d / p.var_i);
    };
    const auto u_star = [&p](double phi) {
        const double d = p.mu_star - phi;
        return std::log1p(d * d / p.var_star);
    };
    return UTerms{u(mp.phi_min), u_star(mp.phi_min), u(mp.phi_max), u_star(mp.phi_max)};
}

/// Known-variance (frequentist) rate
///   G(alpha) = min_{i != i*} (mu_star - mu_i)^2 / (2 (var_star/alpha_star + var_i/alpha_i)),
/// with the convention that a vanishing proportion sends its term to 0.
inline double glynn_rate(const Allocation& alloc, const ProblemInstance& inst) {
    if (alloc.k() != inst.k()) throw ConfigError("allocation/instance size mismatch");
    const int best = inst.best();
    const double a_star = alloc[best];
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.k(); ++i) {
        if (i == best) continue;
        if (a_star == 0.0 || alloc[i] == 0.0) return 0.0;
        const double gap = inst.mean(best) - inst.mean(i);
        const double denom = inst.variance(best) / a_star + inst.variance(i) / alloc[i];
        worst = std::min(worst, gap * gap / (2.0 * denom));
    }
    return worst;
}

} // namespace ocbau
