#include "helpers.hpp"

#include "ksflux/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ksflux;
using namespace testing_helpers;

namespace {

constexpr double pi = std::numbers::pi;

InitialData smooth_data(const GridPtr& g)
{
    auto u = sample(g, [](double x, double) { return 1.0 + 0.5 * std::cos(pi * x); });
    auto v = sample(g, [](double x, double) { return std::pow(1.0 + 0.5 * std::cos(pi * x), 2); });
    return {u, v};
}

} // namespace

TEST_CASE("model params: constraint violations name the constraint")
{
    ModelParams m;
    CHECK_NOTHROW(m.validate());
    m.p = 0.9;
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("p > 1 required"), std::invalid_argument);
    m = {};
    m.theta = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = {};
    m.eps = -1e-3;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = {};
    m.chi = -1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("flux: vanishing gradient gives zero flux")
{
    const auto g = grid_1d(32);
    ModelParams m;
    m.eps = 0.1;
    const GridFunction u(g, 1.7);
    const VectorGridFunction grad(g);
    const auto f = regularized_flux(u, grad, m);
    for (double x : f.faces(0)) CHECK(x == 0.0);
    CHECK(flux_limiter(0.0, 1.5, 0.0) == 0.0);
}

TEST_CASE("flux: p = 2 gives chi u grad v independent of eps")
{
    for (double eps : {0.0, 1e-3, 0.5}) {
        CHECK(face_flux(1.3, 2.0, 0.7, 0.2, 2.0, eps) == 1.3 * 2.0 * 0.7);
    }
}

TEST_CASE("flux: hand arithmetic at p = 1.5, eps = 0, gradient (3, 4)")
{
    const double fx = face_flux(1.0, 1.0, 3.0, 16.0, 1.5, 0.0);
    const double fy = face_flux(1.0, 1.0, 4.0, 9.0, 1.5, 0.0);
    CHECK(flux_limiter(25.0, 1.5, 0.0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));
    CHECK(fx == doctest::Approx(1.34164).epsilon(1e-5));
    CHECK(fy == doctest::Approx(1.78885).epsilon(1e-5));
}

TEST_CASE("flux: linear in chi and in u")
{
    const auto g = grid_2d(12, 10);
    const auto v = random_field(g, 5, 0.0, 3.0);
    const auto u = random_field(g, 6, 0.0, 2.0);
    GridFunction u2(g);
    for (std::size_t i = 0; i < u.size(); ++i) u2[i] = 2.0 * u[i];
    ModelParams m;
    ModelParams m2 = m;
    m2.chi = 2.0 * m.chi;
    const auto gv = gradient(v);
    const auto base = regularized_flux(u, gv, m);
    const auto du = regularized_flux(u2, gv, m);
    const auto dc = regularized_flux(u, gv, m2);
    for (int axis = 0; axis < 2; ++axis) {
        for (std::size_t k = 0; k < base.faces(axis).size(); ++k) {
            CHECK(du.faces(axis)[k] == 2.0 * base.faces(axis)[k]);
            CHECK(dc.faces(axis)[k] == 2.0 * base.faces(axis)[k]);
        }
    }
}

TEST_CASE("flux: magnitude nonincreasing in eps for p < 2 and converging to the limit flux")
{
    const auto g = grid_2d(10, 10);
    const auto v = random_field(g, 8, 0.0, 1.0);
    const GridFunction u(g, 1.0);
    const auto gv = gradient(v);
    ModelParams m;
    m.p = 1.4;
    std::vector<VectorGridFunction> fluxes;
    for (double eps : {1e-1, 1e-2, 1e-4, 1e-6, 0.0}) {
        m.eps = eps;
        fluxes.push_back(regularized_flux(u, gv, m));
    }
    for (int axis = 0; axis < 2; ++axis) {
        for (std::size_t k = 0; k < fluxes[0].faces(axis).size(); ++k) {
            for (std::size_t e = 0; e + 1 < fluxes.size(); ++e) {
                CHECK(std::abs(fluxes[e].faces(axis)[k]) <= std::abs(fluxes[e + 1].faces(axis)[k]) * (1 + 1e-15));
            }
        }
    }
    // Distance to the eps = 0 flux shrinks with eps, on faces with a nonvanishing gradient.
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t e = 1; e + 1 < fluxes.size(); ++e) {
        double d = 0.0;
        for (int axis = 0; axis < 2; ++axis) {
            for (std::size_t k = 0; k < fluxes[e].faces(axis).size(); ++k) {
                d = std::max(d, std::abs(fluxes[e].faces(axis)[k] - fluxes.back().faces(axis)[k]));
            }
        }
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("flux: negative density is rejected")
{
    const auto g = grid_1d(8);
    GridFunction u(g, 1.0);
    u[2] = -0.1;
    CHECK_THROWS_AS(regularized_flux(u, gradient(u), ModelParams{}), std::invalid_argument);
}

TEST_CASE("production: powers of u")
{
    const auto g = grid_1d(16);
    ModelParams m;
    CHECK(production(GridFunction(g, 1.0), m)[5] == 1.0);
    m.theta = 1.5;
    CHECK(production(GridFunction(g, 4.0), m)[3] == doctest::Approx(8.0).epsilon(1e-15));
    m.theta = 2.0;
    const auto u = random_field(g, 9, 0.0, 3.0);
    const auto p = production(u, m);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(p[i] == doctest::Approx(u[i] * u[i]).epsilon(1e-15));
}

TEST_CASE("mollifier: smooth data barely changes at eps = 0.5")
{
    const auto g = grid_1d(128);
    const auto raw = smooth_data(g);
    const auto m = mollify_initial_data(raw, 0.5);
    CHECK(max_abs_diff(m.u0, raw.u0) <= 0.01 * raw.u0.max());
    CHECK(max_abs_diff(m.v0, raw.v0) <= 0.01 * raw.v0.max());
}

TEST_CASE("mollifier: nonnegativity, mass and monotone closeness in eps")
{
    for (const auto& g : {grid_1d(64), grid_2d(16, 16), grid_radial(3, 64)}) {
        const InitialData raw{random_field(g, 13, 0.0, 2.0), random_field(g, 14, 0.0, 2.0)};
        double prev = std::numeric_limits<double>::infinity();
        for (double eps : {0.1, 0.01, 0.001}) {
            const auto m = mollify_initial_data(raw, eps);
            CHECK(m.u0.min() >= 0.0);
            CHECK(m.v0.min() >= 0.0);
            CHECK(std::abs(integrate(m.u0) - integrate(raw.u0)) <= 1e-13 * integrate(raw.u0));
            const double d = max_abs_diff(m.u0, raw.u0);
            CHECK(d <= prev);
            prev = d;
        }
    }
}

TEST_CASE("mollifier: nonexpansive in L^q")
{
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& g : {grid_1d(64), grid_2d(16, 16), grid_radial(2, 64)}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const InitialData raw{random_field(g, seed, 0.0, 2.0), random_field(g, seed + 50, 0.0, 2.0)};
            const auto m = mollify_initial_data(raw, 0.3);
            for (double q : {1.0, 2.0, 5.0, inf}) {
                CHECK(lp_norm(m.u0, q) <= lp_norm(raw.u0, q) * (1 + 1e-13));
                CHECK(lp_norm(m.v0, q) <= lp_norm(raw.v0, q) * (1 + 1e-13));
            }
        }
    }
}

TEST_CASE("mollifier: keep_v0 leaves v untouched and bad eps is rejected")
{
    const auto g = grid_1d(32);
    const InitialData raw{random_field(g, 1, 0.0, 1.0), random_field(g, 2, 0.0, 1.0)};
    MollifierOptions opts;
    opts.keep_v0 = true;
    const auto m = mollify_initial_data(raw, 0.2, opts);
    CHECK(max_abs_diff(m.v0, raw.v0) == 0.0);
    CHECK_THROWS_AS(mollify_initial_data(raw, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mollify_initial_data(raw, 1.0), std::invalid_argument);
}

TEST_CASE("initial data: negative or massless data is rejected")
{
    const auto g = grid_1d(16);
    InitialData d{GridFunction(g, 0.0), GridFunction(g, 1.0)};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.u0 = GridFunction(g, 1.0);
    d.v0[3] = -1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}
