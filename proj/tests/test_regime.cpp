#include "ksflux/regime.hpp"

#include <doctest.h>

#include <cmath>

using namespace ksflux;

TEST_CASE("critical exponent: values")
{
    CHECK(critical_exponent(2, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(critical_exponent(1, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(critical_exponent(3, 2.0) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(critical_exponent(2, 1.5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(critical_exponent(1, 1.0), std::invalid_argument);
}

TEST_CASE("critical exponent: strictly decreasing in theta and in n")
{
    for (int n : {1, 2, 3, 5}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double theta = 1.05; theta <= 4.0; theta += 0.05) {
            const double pc = critical_exponent(n, theta);
            CHECK(pc < prev);
            prev = pc;
        }
    }
    for (double theta : {1.1, 1.5, 2.0, 4.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= 8; ++n) {
            const double pc = critical_exponent(n, theta);
            CHECK(pc < prev);
            prev = pc;
        }
    }
}

TEST_CASE("s rule: infinite and finite branches")
{
    const auto a = s_rule(1, 1.8, 2.0);
    CHECK(a.infinite);
    const auto b = s_rule(2, 1.2, 2.0);
    CHECK_FALSE(b.infinite);
    CHECK(b.lower_bound == doctest::Approx(2.0));
    CHECK(b.default_value == doctest::Approx(3.0));
    const auto c = s_rule(3, 1.1, 1.5);
    CHECK_FALSE(c.infinite);
    CHECK(c.lower_bound == doctest::Approx(3.0));
    CHECK(c.default_value == doctest::Approx(4.0));
}

TEST_CASE("q ranges: interval and lower bounds")
{
    const auto r1 = q_ranges({1, 2.0, 1.5});
    CHECK_FALSE(r1.f1_interval.empty);
    CHECK(r1.f1_interval.lo == doctest::Approx(0.0));
    CHECK(r1.f1_interval.hi == doctest::Approx(2.0));
    CHECK(r1.f1_interval.contains(0.5));
    CHECK_FALSE(r1.f1_interval.contains(1.0));
    CHECK_FALSE(r1.f1_interval.contains(2.0));
    const auto r2 = q_ranges({2, 1.5, 1.2});
    CHECK(r2.f1_lower_bound == doctest::Approx(1.0));
    CHECK(r2.f2_lower_bound == doctest::Approx(2.0));
}

TEST_CASE("auxiliary exponents: worked point n = 2, p = 1.2, q = r = 2")
{
    const auto x = auxiliary_exponents(2, 1.2, 2.0, 2.0);
    CHECK(x.a_star == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(x.b_star == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(x.condition_2ab == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(auxiliary_exponents(2, 1.5, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("condition 1d: hand arithmetic at theta = 2, p = 2.1, q = r = 2")
{
    CHECK(condition_1d(2.0, 2.1, 2.0, 2.0) == doctest::Approx(2.15).epsilon(1e-14));
}

TEST_CASE("audit: worked point is feasible with the stated invariants")
{
    const auto a = audit({2, 1.5, 1.2});
    CHECK(a.p_critical == doctest::Approx(1.5));
    CHECK(a.subcritical);
    CHECK(a.feasible);
    REQUIRE(a.a_star);
    CHECK(*a.a_star > 1.0);
    CHECK(*a.b_star >= 0.5);
    CHECK(*a.b_star < 1.0);
    CHECK(*a.condition_2ab < 2.0);
}

TEST_CASE("audit: supercritical specs are never subcritical or feasible")
{
    const auto a = audit({1, 2.0, 2.1});
    CHECK(a.p_critical == doctest::Approx(2.0));
    CHECK_FALSE(a.subcritical);
    CHECK_FALSE(a.feasible);
    for (int n : {1, 2, 3, 5}) {
        for (double theta : {1.1, 2.0, 4.0}) {
            const double pc = critical_exponent(n, theta);
            for (double f : {1.0, 1.01, 1.5}) {
                const auto b = audit({n, theta, pc * f});
                CHECK_FALSE(b.subcritical);
                CHECK_FALSE(b.feasible);
            }
        }
    }
}

TEST_CASE("audit: feasible over a subcritical lattice with exact invariants")
{
    for (int n : {1, 2, 3, 5}) {
        for (double theta : {1.05, 1.1, 1.5, 2.0, 2.5, 3.0, 4.0}) {
            const double pc = critical_exponent(n, theta);
            for (double f : {0.05, 0.2, 0.5, 0.8, 0.95, 0.99}) {
                const double p = 1.0 + f * (pc - 1.0);
                CAPTURE(n);
                CAPTURE(theta);
                CAPTURE(p);
                const auto a = audit({n, theta, p});
                CHECK(a.subcritical);
                CHECK(a.feasible);
                if (a.branch == AuditBranch::Entropy) {
                    REQUIRE(a.a_star);
                    CHECK(*a.a_star > 1.0);
                    CHECK(*a.b_star >= 0.5);
                    CHECK(*a.b_star < 1.0);
                    CHECK(*a.condition_2ab < 2.0);
                    const auto x = auxiliary_exponents(n, p, *a.chosen_q, *a.chosen_r);
                    CHECK(x.condition_2ab == *a.condition_2ab);
                } else {
                    CHECK(n == 1);
                    REQUIRE(a.condition_1d);
                    CHECK(*a.condition_1d < 1.0);
                }
            }
        }
    }
}

TEST_CASE("audit: theta <= 1 is outside the admissible hypotheses")
{
    const auto a = audit({2, 1.0, 1.5});
    CHECK_FALSE(a.theta_admissible);
    CHECK_FALSE(a.feasible);
}

TEST_CASE("audit: one-dimensional coverage of the subcritical range")
{
    for (double theta : {1.1, 1.5, 2.0, 3.0, 4.0}) {
        CHECK(critical_exponent(1, theta) == doctest::Approx(theta / (theta - 1.0)).epsilon(1e-15));
        const double threshold = std::min(2.0, (2 * theta + 1) / (2 * theta - 1));
        // Both sides of the threshold are covered by one of the branches.
        for (double p : {1.0 + 0.5 * (threshold - 1.0), threshold, 0.5 * (threshold + theta / (theta - 1.0))}) {
            if (p >= theta / (theta - 1.0)) continue;
            CAPTURE(theta);
            CAPTURE(p);
            CHECK(audit({1, theta, p}).feasible);
        }
    }
}

TEST_CASE("audit: deterministic and serializable")
{
    const auto a = audit({3, 1.5, 1.1});
    const auto b = audit({3, 1.5, 1.1});
    CHECK(to_json(a).dump() == to_json(b).dump());
    const auto j = to_json(audit({1, 2.0, 1.8}));
    CHECK(j["s_rule"]["kind"] == "infinite");
    CHECK(j.contains("q_range_lemma31"));
    CHECK(j.contains("condition_1d"));
}
