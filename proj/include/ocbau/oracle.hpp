#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ocbau/core.hpp"
#include "ocbau/rate.hpp"

namespace ocbau {

/// Solver self-diagnostics attached to every oracle solution.
struct OracleDiagnostics {
    double balance_residual = 0.0; // max pairwise gap of the balanced quantity
    double s_min = std::numeric_limits<double>::quiet_NaN();
    double s_max = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false; // some design sits on a minimizer discontinuity
    int outer_iterations = 0;
};

struct OracleSolution {
    Allocation alloc;
    double rate; // min over non-best designs of the unknown-variance pairwise rate
    OracleDiagnostics diag;
};

/// min_{i != i*} V_i(alpha_i, alpha_i*) under the unknown-variance rate.
inline double min_pair_rate(const Allocation& alloc, const ProblemInstance& inst) {
    const int best = inst.best();
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.k(); ++i) {
        if (i == best) continue;
        worst = std::min(worst, v_rate(alloc[i], alloc[best], pair_against_best(inst, i)));
    }
    return worst;
}

namespace detail {

// Smallest r with W(r) >= w_target, by doubling bracket + bisection. W is
// continuous and strictly increasing, so the root is unique. w_target must
// sit strictly below the supremum of W.
inline double invert_w(const PairParams& p, double w_target) {
    if (w_target <= 0.0) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (w_of_r(hi, p) < w_target) {
        hi *= 2.0;
        if (++guard > 200) throw SolverError("invert_w: failed to bracket target");
    }
    double lo = (hi > 1.0) ? hi * 0.5 : 0.0;
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (w_of_r(mid, p) < w_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct InnerProblem {
    int best;
    std::vector<int> others;
    std::vector<PairParams> pairs; // aligned with others
    std::vector<double> w_sup;     // aligned with others

    explicit InnerProblem(const ProblemInstance& inst) : best(inst.best()) {
        for (int i = 0; i < inst.k(); ++i) {
            if (i == best) continue;
            others.push_back(i);
            pairs.push_back(pair_against_best(inst, i));
            w_sup.push_back(w_supremum(pairs.back()));
        }
    }
};

} // namespace detail

/// Unique allocation with alpha_i* pinned to alpha_star_bar, the remaining
/// mass on the non-best designs, and all pairwise rates V_i equal. Solved by
/// bisection on the common rate target v: per design, alpha_i(v) inverts the
/// strictly increasing map alpha_i -> V_i(alpha_i, alpha_star_bar); the outer
/// bisection moves v until the alpha_i(v) exhaust the remaining mass.
inline Allocation inner_allocation(double alpha_star_bar, const ProblemInstance& inst,
                                   double tol = 1e-9) {
    if (!(alpha_star_bar > 0.0 && alpha_star_bar < 1.0))
        throw ConfigError("alpha_star_bar must lie strictly inside (0, 1)");
    const int k = inst.k();
    const double abar = alpha_star_bar;
    const double target = 1.0 - abar;

    std::vector<double> alphas(k, 0.0);
    alphas[inst.best()] = abar;
    if (k == 2) {
        alphas[1 - inst.best()] = target;
        return Allocation(std::move(alphas));
    }

    const detail::InnerProblem prob(inst);
    const int m = static_cast<int>(prob.others.size());

    double v_sup = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) v_sup = std::min(v_sup, 0.5 * abar * prob.w_sup[j]);

    // Sum of alpha_i(v); +inf once v crosses some design's attainable range.
    const auto sum_alphas = [&](double v, std::vector<double>* out) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            const double w_target = 2.0 * v / abar;
            if (w_target >= prob.w_sup[j] * (1.0 - 1e-12))
                return std::numeric_limits<double>::infinity();
            const double a = abar * detail::invert_w(prob.pairs[j], w_target);
            if (out) (*out)[j] = a;
            sum += a;
        }
        return sum;
    };

    double lo = 0.0;
    double hi = v_sup * (1.0 - 1e-12);
    for (int iter = 0; iter < 120 && (hi - lo) > 1e-15 * std::max(hi, 1e-300); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (sum_alphas(mid, nullptr) < target ? lo : hi) = mid;
    }

    std::vector<double> raw(m, 0.0);
    const double sum = sum_alphas(lo, &raw);
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw SolverError("inner_allocation: rate-target bisection collapsed");
    const double scale = target / sum;
    for (int j = 0; j < m; ++j) alphas[prob.others[j]] = raw[j] * scale;
    Allocation alloc(std::move(alphas));

    // Balance must hold to within tol relative to the achieved rate.
    double v_lo = std::numeric_limits<double>::infinity();
    double v_hi = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        const double v = v_rate(alloc[prob.others[j]], abar, prob.pairs[j]);
        v_lo = std::min(v_lo, v);
        v_hi = std::max(v_hi, v);
    }
    if (v_hi - v_lo > tol * (1.0 + v_lo))
        throw SolverError("inner_allocation: balance residual " + std::to_string(v_hi - v_lo) +
                          " exceeds tolerance at alpha_star_bar=" + std::to_string(abar));
    return alloc;
}

struct BalanceSums {
    double s_min;
    double s_max;
};

/// The two budget-balance sums at the pinned best-share alpha_star_bar:
/// s_min = sum_i U*_i/U_i evaluated at phi_min(r_i), s_max analogously at
/// phi_max(r_i), where r_i = alpha_i^f / alpha_star_bar from the balanced
/// inner allocation. s_min is strictly decreasing in alpha_star_bar.
inline BalanceSums balance_sum(double alpha_star_bar, const ProblemInstance& inst,
                               double tol = 1e-9) {
    const Allocation alloc = inner_allocation(alpha_star_bar, inst, tol);
    const int best = inst.best();
    double s_min = 0.0;
    double s_max = 0.0;
    for (int i = 0; i < inst.k(); ++i) {
        if (i == best) continue;
        const UTerms u = u_terms(alloc[i] / alpha_star_bar, pair_against_best(inst, i));
        s_min += (u.u_min > 0.0) ? u.u_star_min / u.u_min : std::numeric_limits<double>::infinity();
        s_max += (u.u_max > 0.0) ? u.u_star_max / u.u_max : std::numeric_limits<double>::infinity();
    }
    return BalanceSums{s_min, s_max};
}

/// Optimal unknown-variance allocation: alpha_i* is the largest best-share
/// with s_min >= 1, located by bisection that preserves s_min(lo) >= 1 >
/// s_min(hi) and returns lo (supremum semantics; s_min may jump across 1 at
/// a minimizer discontinuity). The non-best shares come from the balanced
/// inner allocation at that best-share. The bracket starts only seed the
/// search; the result is independent of them.
inline OracleSolution optimal_allocation(const ProblemInstance& inst, double tol = 1e-9,
                                         double bracket_lo = 0.25, double bracket_hi = 0.75) {
    constexpr double kBracketTol = 1e-10;
    if (!(bracket_lo > 0.0 && bracket_lo < bracket_hi && bracket_hi < 1.0))
        throw ConfigError("optimal_allocation bracket must satisfy 0 < lo < hi < 1");

    const auto s_min_at = [&](double abar) { return balance_sum(abar, inst, tol).s_min; };

    double lo = bracket_lo;
    int iters = 0;
    while (s_min_at(lo) < 1.0) {
        lo *= 0.5;
        if (++iters > 60) throw SolverError("optimal_allocation: no lower bracket with s_min >= 1");
    }
    double hi = bracket_hi;
    while (s_min_at(hi) >= 1.0) {
        hi = 0.5 * (1.0 + hi);
        if (++iters > 120) throw SolverError("optimal_allocation: no upper bracket with s_min < 1");
    }
    if (lo >= hi) throw SolverError("optimal_allocation: inverted bracket");

    while (hi - lo > kBracketTol) {
        const double mid = 0.5 * (lo + hi);
        (s_min_at(mid) >= 1.0 ? lo : hi) = mid;
        ++iters;
    }

    const Allocation alloc = inner_allocation(lo, inst, tol);
    const int best = inst.best();
    OracleDiagnostics diag;
    diag.outer_iterations = iters;
    const BalanceSums sums = balance_sum(lo, inst, tol);
    diag.s_min = sums.s_min;
    diag.s_max = sums.s_max;

    double v_lo = std::numeric_limits<double>::infinity();
    double v_hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.k(); ++i) {
        if (i == best) continue;
        const PairParams p = pair_against_best(inst, i);
        const double v = v_rate(alloc[i], alloc[best], p);
        v_lo = std::min(v_lo, v);
        v_hi = std::max(v_hi, v);
        diag.degenerate = diag.degenerate || phi_minimizers(alloc[i] / alloc[best], p).is_degenerate;
    }
    diag.balance_residual = v_hi - v_lo;
    return OracleSolution{alloc, v_lo, diag};
}

/// Optimal allocation when the sampling variances are treated as known:
/// pairwise known-variance rates equalized at fixed best-share (closed-form
/// inversion per design), best-share fixed by the classic total-balance
/// condition sum_i (var_star/alpha_star^2)/(var_i/alpha_i^2) = 1.
inline OracleSolution known_variance_allocation(const ProblemInstance& inst, double tol = 1e-9) {
    constexpr double kBracketTol = 1e-12;
    const int k = inst.k();
    const int best = inst.best();
    const double t = inst.variance(best);

    std::vector<int> others;
    for (int i = 0; i < k; ++i)
        if (i != best) others.push_back(i);
    const int m = static_cast<int>(others.size());

    // Balanced non-best shares for a pinned best-share: the pairwise rate
    // gap_i^2 / (2 (t/abar + var_i/alpha_i)) = v inverts in closed form.
    const auto inner = [&](double abar) {
        std::vector<double> alphas(k, 0.0);
        alphas[best] = abar;
        if (m == 1) {
            alphas[others[0]] = 1.0 - abar;
            return alphas;
        }
        double v_sup = std::numeric_limits<double>::infinity();
        for (int i : others) {
            const double gap = inst.mean(best) - inst.mean(i);
            v_sup = std::min(v_sup, abar * gap * gap / (2.0 * t));
        }
        const auto alpha_of = [&](double v, std::vector<double>* out) {
            double sum = 0.0;
            for (int j = 0; j < m; ++j) {
                const int i = others[j];
                const double gap = inst.mean(best) - inst.mean(i);
                const double denom = gap * gap - 2.0 * v * t / abar;
                if (denom <= 0.0) return std::numeric_limits<double>::infinity();
                const double a = 2.0 * v * inst.variance(i) / denom;
                if (out) (*out)[j] = a;
                sum += a;
            }
            return sum;
        };
        double lo = 0.0;
        double hi = v_sup * (1.0 - 1e-13);
        for (int iter = 0; iter < 120 && (hi - lo) > 1e-15 * std::max(hi, 1e-300); ++iter) {
            const double mid = 0.5 * (lo + hi);
            (alpha_of(mid, nullptr) < 1.0 - abar ? lo : hi) = mid;
        }
        std::vector<double> raw(m, 0.0);
        const double sum = alpha_of(lo, &raw);
        if (!(sum > 0.0) || !std::isfinite(sum))
            throw SolverError("known_variance_allocation: inner bisection collapsed");
        const double scale = (1.0 - abar) / sum;
        for (int j = 0; j < m; ++j) alphas[others[j]] = raw[j] * scale;
        return alphas;
    };

    const auto total_sum = [&](double abar) {
        const auto alphas = inner(abar);
        double s = 0.0;
        for (int i : others) s += (t / (abar * abar)) / (inst.variance(i) / (alphas[i] * alphas[i]));
        return s;
    };

    double lo = 0.25;
    int iters = 0;
    while (total_sum(lo) < 1.0) {
        lo *= 0.5;
        if (++iters > 60) throw SolverError("known_variance_allocation: no lower bracket");
    }
    double hi = 0.75;
    while (total_sum(hi) >= 1.0) {
        hi = 0.5 * (1.0 + hi);
        if (++iters > 120) throw SolverError("known_variance_allocation: no upper bracket");
    }
    while (hi - lo > kBracketTol) {
        const double mid = 0.5 * (lo + hi);
        (total_sum(mid) >= 1.0 ? lo : hi) = mid;
        ++iters;
    }

    Allocation alloc(inner(lo));
    OracleDiagnostics diag;
    diag.outer_iterations = iters;
    diag.s_min = diag.s_max = total_sum(lo);

    double g_lo = std::numeric_limits<double>::infinity();
    double g_hi = -std::numeric_limits<double>::infinity();
    for (int i : others) {
        const double gap = inst.mean(best) - inst.mean(i);
        const double term = gap * gap / (2.0 * (t / alloc[best] + inst.variance(i) / alloc[i]));
        g_lo = std::min(g_lo, term);
        g_hi = std::max(g_hi, term);
    }
    diag.balance_residual = g_hi - g_lo;
    if (std::abs(diag.s_min - 1.0) > 1e3 * tol || diag.balance_residual > tol * (1.0 + g_lo))
        throw SolverError("known_variance_allocation: residuals exceed tolerance");
    return OracleSolution{alloc, min_pair_rate(alloc, inst), diag};
}

/// Classical OCBA approximation: non-best shares proportional to
/// var_i / gap_i^2, best share closing the total-balance condition
/// alpha_star = sqrt(var_star * sum_i alpha_i^2 / var_i), then renormalized.
inline Allocation ocba_approx_allocation(const ProblemInstance& inst) {
    const int k = inst.k();
    const int best = inst.best();
    std::vector<double> w(k, 0.0);
    double closure = 0.0;
    for (int i = 0; i < k; ++i) {
        if (i == best) continue;
        const double gap = inst.mean(best) - inst.mean(i);
        w[i] = inst.variance(i) / (gap * gap);
        closure += w[i] * w[i] / inst.variance(i);
    }
    w[best] = std::sqrt(inst.variance(best) * closure);
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    return Allocation(std::move(w));
}

enum class BruteForceMode { Auto, FullGrid, Reduced };

/// Grid search maximizing the unknown-variance min-rate. FullGrid walks the
/// whole simplex lattice with grid_points subdivisions (k <= 4 only);
/// Reduced grids the best-share alone and delegates the rest to
/// inner_allocation. Auto picks FullGrid for k <= 3.
inline OracleSolution brute_force_allocation(const ProblemInstance& inst, int grid_points,
                                             BruteForceMode mode = BruteForceMode::Auto) {
    if (grid_points < 4) throw ConfigError("brute force needs at least 4 grid points");
    const int k = inst.k();
    if (mode == BruteForceMode::Auto)
        mode = (k <= 3) ? BruteForceMode::FullGrid : BruteForceMode::Reduced;
    if (mode == BruteForceMode::FullGrid && k > 4)
        throw ConfigError("full-grid brute force is limited to k <= 4");

    const int best = inst.best();
    std::vector<PairParams> pairs;
    std::vector<int> others;
    for (int i = 0; i < k; ++i) {
        if (i == best) continue;
        others.push_back(i);
        pairs.push_back(pair_against_best(inst, i));
    }

    double best_rate = -1.0;
    std::vector<double> best_alphas;

    if (mode == BruteForceMode::FullGrid) {
        const int G = grid_points;
        const double h = 1.0 / static_cast<double>(G);
        std::vector<int> units(k, 0);
        // Enumerate lattice points with all parts >= 1 (zero shares have rate 0).
        std::function<void(int, int)> walk = [&](int pos, int left) {
            if (pos == k - 1) {
                units[pos] = left;
                if (left < 1) return;
                double rate = std::numeric_limits<double>::infinity();
                const double a_star = units[best] * h;
                for (std::size_t j = 0; j < others.size(); ++j)
                    rate = std::min(rate, v_rate(units[others[j]] * h, a_star, pairs[j]));
                if (rate > best_rate) {
                    best_rate = rate;
                    best_alphas.assign(k, 0.0);
                    for (int i = 0; i < k; ++i) best_alphas[i] = units[i] * h;
                }
                return;
            }
            for (int u = 1; u <= left - (k - 1 - pos); ++u) {
                units[pos] = u;
                walk(pos + 1, left - u);
            }
        };
        walk(0, G);
    } else {
        const int G = grid_points;
        for (int j = 1; j < G; ++j) {
            const double abar = static_cast<double>(j) / static_cast<double>(G);
            const Allocation alloc = inner_allocation(abar, inst);
            const double rate = min_pair_rate(alloc, inst);
            if (rate > best_rate) {
                best_rate = rate;
                best_alphas = alloc.values();
            }
        }
    }

    if (best_alphas.empty()) throw SolverError("brute_force_allocation: empty grid");
    Allocation alloc(std::move(best_alphas));
    OracleDiagnostics diag;
    diag.outer_iterations = grid_points;
    return OracleSolution{alloc, best_rate, diag};
}

} // namespace ocbau
