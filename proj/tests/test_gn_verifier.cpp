#include "helpers.hpp"

#include "ksflux/gn_verifier.hpp"
#include "ksflux/regime.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace ksflux;
using namespace testing_helpers;

namespace {

constexpr double pi = std::numbers::pi;

struct Rational {
    long long num, den;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }
    void normalize()
    {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    Rational inv() const { return {den, num}; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }

// a = (1/q - 1/p) / (1/q + 1/n - 1/r) evaluated exactly.
Rational exact_a(Rational p, Rational q, Rational r, long long n)
{
    return (q.inv() - p.inv()) / (q.inv() + Rational(1, n) - r.inv());
}

GridPtr grid_for(int n, int cells)
{
    return n == 1 ? grid_1d(cells) : grid_radial(n, cells);
}

} // namespace

TEST_CASE("gn exponent: hand values")
{
    CHECK(gn_exponent(3.0, 3.0, 2.0, 2) == 0.0);
    CHECK(gn_exponent(4.0, 2.0, 2.0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(gn_exponent(2.0, 1.0, 2.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(gn_exponent(1.0, 4.0, 2.0, 1), std::invalid_argument);
}

TEST_CASE("gn exponent: agrees with exact rational arithmetic")
{
    int checked = 0;
    for (long long n = 1; n <= 5; ++n) {
        for (long long pn = 1; pn <= 12; ++pn) {
            for (long long qn = 1; qn <= 12; ++qn) {
                for (long long rn = 2; rn <= 8; ++rn) {
                    const Rational p(pn, 2), q(qn, 2), r(rn, 2);
                    if (p.value() < 1.0 || q.value() < 1.0 || r.value() < 1.0) continue;
                    const Rational den = q.inv() + Rational(1, n) - r.inv();
                    if (den.num == 0) continue;
                    const Rational a = exact_a(p, q, r, n);
                    if (a.value() < 0.0 || a.value() > 1.0) continue;
                    CHECK(std::abs(gn_exponent(p.value(), q.value(), r.value(), static_cast<int>(n)) - a.value()) <= 1e-12);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("gn exponent: Sobolev endpoint gives exactly one")
{
    // 1/p = 1/r - 1/n.
    CHECK(gn_exponent(6.0, 2.0, 2.0, 3) == 1.0);
    CHECK(gn_exponent(5.0, 3.0, 2.5, 5) == 1.0);
    CHECK(gn_exponent(4.0, 1.5, 2.0, 4) == 1.0);
    CHECK(gn_exponent(6.0, 4.0, 3.0, 6) == 1.0);
}

TEST_CASE("gn ratio: constants and homogeneity")
{
    const auto g = grid_1d(64);
    const auto e = GNExponents::make(3.0, 2.0, 2.0, 3.0, 1);
    CHECK(gn_ratio(GridFunction(g, 2.0), e) == doctest::Approx(1.0).epsilon(1e-13));
    const auto g3 = grid_1d(64, 3.0);
    const auto e2 = GNExponents::make(4.0, 2.0, 2.0, 2.0, 1);
    CHECK(gn_ratio(GridFunction(g3, 1.5), e2) == doctest::Approx(std::pow(3.0, 0.25 - 0.5)).epsilon(1e-13));
    const auto f = random_field(g, 5, 0.1, 1.0);
    GridFunction f7(g);
    for (std::size_t i = 0; i < f.size(); ++i) f7[i] = 7.0 * f[i];
    CHECK(gn_ratio(f7, e) == doctest::Approx(gn_ratio(f, e)).epsilon(1e-13));
    CHECK_THROWS_AS(gn_ratio(GridFunction(g, 0.0), e), std::domain_error);
}

TEST_CASE("gn2 ratio: constant and cosine against analytic norms")
{
    const auto e = GN2Exponents::make(2.0, 2.0, 2.0, 2.0, 1);
    CHECK(e.b == doctest::Approx(0.5));
    CHECK(gn2_ratio(GridFunction(grid_1d(64), 1.3), e) == 0.0);
    const double f2 = 1.0 / std::sqrt(2.0), g2 = pi / std::sqrt(2.0), l2 = pi * pi / std::sqrt(2.0);
    const double exact = g2 / ((std::sqrt(l2) + std::sqrt(f2)) * std::sqrt(f2) + f2);
    auto err = [&](int cells) {
        const auto f = sample(grid_1d(cells), [](double x, double) { return std::cos(pi * x); });
        return std::abs(gn2_ratio(f, e) - exact);
    };
    CHECK(err(200) < 1e-3);
    CHECK(err(200) < err(100));
}

TEST_CASE("constant estimate: dominates every member and grows with the ensemble")
{
    const auto g = grid_1d(64);
    const auto e = GNExponents::make(4.0, 2.0, 2.0, 2.0, 1);
    const auto members = gn_ensemble(g, 100, 0x5eed);
    const auto est = gn_constant_estimate(g, e, 100);
    CHECK(est.evaluated == 100);
    CHECK(std::isfinite(est.c_est));
    for (const auto& f : members) CHECK(gn_ratio(f, e) <= est.c_est);
    CHECK(gn_constant_estimate(g, e, 200).c_est >= est.c_est);
    // Members do not depend on the ensemble size.
    const auto more = gn_ensemble(g, 150, 0x5eed);
    CHECK(max_abs_diff(more[42], members[42]) == 0.0);
}

TEST_CASE("constant estimate: an ensemble of constants reproduces the constant ratio")
{
    const auto g = grid_1d(32);
    const auto e = GNExponents::make(3.0, 2.0, 2.0, 3.0, 1);
    double worst = 0.0;
    for (double c : {0.5, 1.0, 4.0}) worst = std::max(worst, gn_ratio(GridFunction(g, c), e));
    CHECK(worst == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Poincare constant: near 1/pi on the interval and stable in dimension two")
{
    const auto c1 = poincare_constant_estimate(grid_1d(128), 300).c_est;
    CHECK(c1 <= 1.0 / pi * 1.01);
    CHECK(c1 >= 1.0 / pi * 0.9);
    const auto a = poincare_constant_estimate(grid_radial(2, 64), 300).c_est;
    const auto b = poincare_constant_estimate(grid_radial(2, 128), 300).c_est;
    CHECK(std::abs(b / a - 1.0) < 0.15);
    CHECK_THROWS_AS(poincare_ratio(GridFunction(grid_1d(16), 1.0)), std::domain_error);
}

TEST_CASE("proof exponent sets: finite and refinement-stable at audit witnesses")
{
    for (const RegimeSpec spec : {RegimeSpec{1, 2.0, 1.5}, RegimeSpec{2, 1.5, 1.2}, RegimeSpec{3, 2.0, 1.1}}) {
        const auto a = audit(spec);
        REQUIRE(a.feasible);
        DomainSpec d = grid_for(spec.n, 64)->spec();
        for (const auto& e : proof_exponent_sets(a)) {
            CAPTURE(e.label);
            CHECK(e.a >= 0.0);
            CHECK(e.a <= 1.0);
            const auto r = gn_refinement(d, e, 200);
            CHECK(std::isfinite(r.coarse));
            CHECK(r.stable);
        }
        for (const auto& e : proof_exponent_sets_gn2(a)) {
            const auto r = gn2_refinement(d, e, 200);
            CHECK(std::isfinite(r.coarse));
            CHECK(r.stable);
        }
    }
}
