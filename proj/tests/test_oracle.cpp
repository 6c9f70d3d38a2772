#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ocbau/core.hpp"
#include "ocbau/oracle.hpp"
#include "ocbau/rate.hpp"

#include "oracles.hpp"

using namespace ocbau;
using testing_oracles::random_instance;

namespace {
const ProblemInstance k2sym({10.0, 0.0}, {1.0, 1.0});

double balance_residual(const Allocation& alloc, const ProblemInstance& inst) {
    const int best = inst.best();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.k(); ++i) {
        if (i == best) continue;
        const double v = v_rate(alloc[i], alloc[best], pair_against_best(inst, i));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}
} // namespace

TEST_CASE("inner allocation handles the forced cases", "[oracle]") {
    const Allocation two = inner_allocation(0.3, k2sym);
    CHECK(two[0] == 0.3);
    CHECK(two[1] == 0.7);

    // Two identical non-best designs split the remaining mass equally.
    const ProblemInstance sym3({5.0, 0.0, 0.0}, {2.0, 3.0, 3.0});
    const Allocation a3 = inner_allocation(0.4, sym3);
    CHECK(a3[0] == 0.4);
    CHECK_THAT(a3[1], Catch::Matchers::WithinRel(a3[2], 1e-10));
    CHECK_THAT(a3[1] + a3[2], Catch::Matchers::WithinRel(0.6, 1e-12));

    CHECK_THROWS_AS(inner_allocation(0.0, sym3), ConfigError);
    CHECK_THROWS_AS(inner_allocation(1.0, sym3), ConfigError);
}

TEST_CASE("inner allocation balances the pairwise rates", "[oracle]") {
    const ProblemInstance i1k3 = make_synthetic_instance(1, 3);
    const Allocation alloc = inner_allocation(0.4, i1k3);
    const double rate = min_pair_rate(alloc, i1k3);
    CHECK(balance_residual(alloc, i1k3) <= 1e-9 * (1.0 + rate));

    // Grid search over the one remaining degree of freedom.
    double best_alpha1 = 0.0;
    double best_rate = -1.0;
    const int G = 1000;
    for (int s = 1; s < G; ++s) {
        const double a1 = 0.6 * static_cast<double>(s) / static_cast<double>(G);
        const double a2 = 0.6 - a1;
        const double r = std::min(v_rate(a1, 0.4, pair_against_best(i1k3, 1)),
                                  v_rate(a2, 0.4, pair_against_best(i1k3, 2)));
        if (r > best_rate) {
            best_rate = r;
            best_alpha1 = a1;
        }
    }
    CHECK_THAT(alloc[1], Catch::Matchers::WithinAbs(best_alpha1, 1e-4));
    CHECK(min_pair_rate(alloc, i1k3) >= best_rate - 1e-9);
}

TEST_CASE("balance sums behave per the structural lemmas", "[oracle]") {
    // Near-zero best share drives the ratio sum far above 1.
    const ProblemInstance i1k4 = make_synthetic_instance(1, 4);
    CHECK(balance_sum(0.01, i1k4).s_min > 1.0);

    // On the symmetric pair the two sums straddle 1 around the threshold.
    CHECK(balance_sum(0.49, k2sym).s_min > 1.0);
    CHECK(balance_sum(0.51, k2sym).s_max < 1.0);

    // Strict decrease of s_min over a best-share grid.
    double prev = std::numeric_limits<double>::infinity();
    for (int s = 1; s <= 20; ++s) {
        const double abar = 0.04 + 0.9 * static_cast<double>(s - 1) / 19.0;
        const double cur = balance_sum(abar, i1k4).s_min;
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("the optimal allocation solves the symmetric pair exactly", "[oracle]") {
    const OracleSolution sol = optimal_allocation(k2sym);
    CHECK_THAT(sol.alloc[0], Catch::Matchers::WithinAbs(0.5, 1e-6));
    CHECK_THAT(sol.alloc[1], Catch::Matchers::WithinAbs(0.5, 1e-6));
    CHECK(sol.diag.degenerate); // the threshold sits exactly on the jump
    CHECK(sol.diag.s_min >= 1.0);
    CHECK(sol.diag.s_max < 1.0);
}

TEST_CASE("optimal allocation is self-consistent on the benchmark instances", "[oracle]") {
    for (int id = 1; id <= 4; ++id) {
        const ProblemInstance inst = make_synthetic_instance(id, 10);
        const OracleSolution sol = optimal_allocation(inst);
        CHECK(sol.alloc[inst.best()] > 0.0);
        CHECK(sol.alloc[inst.best()] < 1.0);
        CHECK(sol.diag.balance_residual <= 1e-8);
        CHECK(sol.diag.s_min >= 1.0);
        CHECK(balance_sum(sol.alloc[inst.best()] + 1e-6, inst).s_min < 1.0);
        CHECK_THAT(sol.rate, Catch::Matchers::WithinRel(min_pair_rate(sol.alloc, inst), 1e-10));
        if (!sol.diag.degenerate) CHECK_THAT(sol.diag.s_min, Catch::Matchers::WithinAbs(1.0, 1e-8));
    }
}

TEST_CASE("the optimum is independent of the bisection bracket", "[oracle]") {
    const ProblemInstance inst = make_synthetic_instance(1, 5);
    const OracleSolution base = optimal_allocation(inst);
    const double starts[5][2] = {
        {0.1, 0.9}, {0.01, 0.99}, {0.3, 0.6}, {0.05, 0.5}, {0.45, 0.8}};
    for (const auto& s : starts) {
        const OracleSolution probe = optimal_allocation(inst, 1e-9, s[0], s[1]);
        for (int i = 0; i < inst.k(); ++i)
            CHECK_THAT(probe.alloc[i], Catch::Matchers::WithinAbs(base.alloc[i], 1e-8));
    }
}

TEST_CASE("non-best shares respond monotonically to the best share", "[oracle][lemma]") {
    const ProblemInstance inst = make_synthetic_instance(1, 5);
    for (double abar : {0.2, 0.35, 0.5, 0.7}) {
        for (double delta : {0.05, 0.02, 0.005}) {
            const Allocation at = inner_allocation(abar, inst);
            const Allocation below = inner_allocation(abar - delta, inst);
            for (int i = 0; i < inst.k(); ++i) {
                if (i == inst.best()) continue;
                const double diff = below[i] - at[i];
                CHECK(diff > 0.0);
                CHECK(diff <= delta + 1e-12);
            }
        }
    }
}

TEST_CASE("the optimal allocation dominates the benchmark allocations", "[oracle]") {
    const ProblemInstance inst = make_synthetic_instance(1, 10);
    const OracleSolution opt = optimal_allocation(inst);
    const double r_known = min_pair_rate(known_variance_allocation(inst).alloc, inst);
    const double r_ocba = min_pair_rate(ocba_approx_allocation(inst), inst);
    const double r_equal = min_pair_rate(Allocation::equal(10), inst);
    CHECK(opt.rate >= r_known - 1e-12);
    CHECK(opt.rate >= r_ocba - 1e-12);
    CHECK(opt.rate >= r_equal - 1e-12);
    CHECK(opt.rate > std::min({r_known, r_ocba, r_equal}) + 1e-6);
}

TEST_CASE("known and unknown variance allocations nearly agree on small gaps", "[oracle]") {
    const ProblemInstance i4 = make_synthetic_instance(4, 10);
    const OracleSolution opt = optimal_allocation(i4);
    const OracleSolution known = known_variance_allocation(i4);
    double sup = 0.0;
    for (int i = 0; i < 10; ++i) sup = std::max(sup, std::abs(opt.alloc[i] - known.alloc[i]));
    CHECK(sup <= 0.05);
}

TEST_CASE("known variance shifts mass toward the top designs", "[oracle]") {
    for (int id = 1; id <= 4; ++id) {
        const ProblemInstance inst = make_synthetic_instance(id, 10);
        const OracleSolution opt = optimal_allocation(inst);
        const OracleSolution known = known_variance_allocation(inst);
        CHECK(known.alloc[0] + known.alloc[1] > opt.alloc[0] + opt.alloc[1]);
        for (int i = 2; i < 10; ++i) CHECK(opt.alloc[i] > known.alloc[i]);
    }
}

TEST_CASE("known-variance oracle matches its closed forms", "[oracle]") {
    const OracleSolution eq = known_variance_allocation(k2sym);
    CHECK_THAT(eq.alloc[0], Catch::Matchers::WithinAbs(0.5, 1e-9));

    // Best variance four times larger: total balance forces a 2:1 split.
    const ProblemInstance skew({10.0, 0.0}, {4.0, 1.0});
    const OracleSolution sol = known_variance_allocation(skew);
    CHECK_THAT(sol.alloc[0], Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-9));

    // Random-search dominance under the known-variance rate.
    const ProblemInstance i1 = make_synthetic_instance(1, 10);
    const OracleSolution known = known_variance_allocation(i1);
    const double base = glynn_rate(known.alloc, i1);
    std::mt19937_64 gen(12345);
    std::exponential_distribution<double> expo(1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<double> w(10);
        double sum = 0.0;
        for (double& x : w) {
            x = expo(gen);
            sum += x;
        }
        for (double& x : w) x /= sum;
        CHECK(glynn_rate(Allocation(w), i1) <= base + 1e-12);
    }
}

TEST_CASE("the classic approximation obeys its ratio structure", "[oracle]") {
    const ProblemInstance sym3({5.0, 0.0, 0.0}, {2.0, 3.0, 3.0});
    const Allocation a = ocba_approx_allocation(sym3);
    CHECK_THAT(a[1], Catch::Matchers::WithinRel(a[2], 1e-12));

    const Allocation i1 = ocba_approx_allocation(make_synthetic_instance(1, 10));
    CHECK_THAT(i1[1] / i1[2], Catch::Matchers::WithinRel(4.0, 1e-12));

    // Gap^2/variance ratios coincide between instances 1 and 3, so the
    // non-best proportions relative to each other must coincide too.
    const Allocation i3 = ocba_approx_allocation(make_synthetic_instance(3, 10));
    for (int i = 2; i < 10; ++i)
        CHECK_THAT(i1[i] / i1[1], Catch::Matchers::WithinRel(i3[i] / i3[1], 1e-12));
}

TEST_CASE("brute force cross-checks the analytic solvers", "[oracle][oracle-check]") {
    const OracleSolution bf = brute_force_allocation(k2sym, 1000);
    CHECK_THAT(bf.alloc[0], Catch::Matchers::WithinAbs(0.5, 1e-3 + 1e-12));

    std::mt19937_64 gen(4242);
    for (int trial = 0; trial < 5; ++trial) {
        const ProblemInstance inst = random_instance(gen, 3);
        const OracleSolution opt = optimal_allocation(inst);
        const OracleSolution reduced =
            brute_force_allocation(inst, 1000, BruteForceMode::Reduced);
        for (int i = 0; i < 3; ++i)
            CHECK_THAT(reduced.alloc[i], Catch::Matchers::WithinAbs(opt.alloc[i], 2e-3));
        CHECK(reduced.rate <= opt.rate + 1e-6);
    }

    CHECK_THROWS_AS(brute_force_allocation(make_synthetic_instance(1, 5), 100,
                                           BruteForceMode::FullGrid),
                    ConfigError);
    CHECK_THROWS_AS(brute_force_allocation(k2sym, 2), ConfigError);
}
