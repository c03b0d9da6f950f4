#include "helpers.hpp"

#include "ksflux/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ksflux;
using namespace testing_helpers;

namespace {

constexpr double pi = std::numbers::pi;

double sum(std::span<const double> w)
{
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

// Max error of L_h cos(pi x) against -pi^2 cos(pi x).
double eigen_error(int cells)
{
    const auto g = grid_1d(cells);
    const auto f = sample(g, [](double x, double) { return std::cos(pi * x); });
    const auto lap = laplacian(f);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(lap[i] + pi * pi * f[i]));
    return err;
}

} // namespace

TEST_CASE("grid: cartesian-1d with 100 cells has h = 0.01 and unit measure")
{
    const auto g = grid_1d(100);
    CHECK(g->size() == 100);
    CHECK(g->spacing(0) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(std::abs(sum(g->cell_weights()) - 1.0) < 1e-12);
    CHECK(g->measure() == doctest::Approx(1.0));
}

TEST_CASE("grid: radial ball in R^3 has volume 4 pi / 3 to second order")
{
    const double exact = 4.0 * pi / 3.0;
    const double e100 = std::abs(sum(grid_radial(3, 100)->cell_weights()) - exact);
    const double e200 = std::abs(sum(grid_radial(3, 200)->cell_weights()) - exact);
    CHECK(e100 < 1e-3);
    CHECK(e100 / e200 > 3.5);
    CHECK(e100 / e200 < 4.5);
}

TEST_CASE("grid: cartesian-2d 32x32 has 1024 equal cells")
{
    const auto g = grid_2d(32, 32);
    CHECK(g->size() == 1024);
    for (double w : g->cell_weights()) CHECK(w == doctest::Approx(1.0 / 1024).epsilon(1e-14));
}

TEST_CASE("grid: invalid specs are rejected")
{
    DomainSpec d;
    d.cells = {3, 1};
    CHECK_THROWS_AS(build_grid(d), std::invalid_argument);
    d.cells = {16, 1};
    d.extent = {0.0, 1.0};
    CHECK_THROWS_AS(build_grid(d), std::invalid_argument);
    d.extent = {1.0, 1.0};
    d.dimension = 2;
    CHECK_THROWS_AS(build_grid(d), std::invalid_argument);
}

TEST_CASE("gradient: constant gives zero, linear gives one on interior faces")
{
    const auto g = grid_1d(50);
    const auto c = gradient(GridFunction(g, 3.0));
    for (double x : c.faces(0)) CHECK(x == 0.0);
    const auto lin = gradient(sample(g, [](double x, double) { return x; }));
    const auto f = lin.faces(0);
    CHECK(f.front() == 0.0);
    CHECK(f.back() == 0.0);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) CHECK(f[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lin.boundary_faces_zero());
}

TEST_CASE("gradient: cos(pi x) face error is second order")
{
    auto err = [](int cells) {
        const auto g = grid_1d(cells);
        const auto gr = gradient(sample(g, [](double x, double) { return std::cos(pi * x); }));
        const auto f = gr.faces(0);
        double e = 0.0;
        for (std::size_t i = 1; i + 1 < f.size(); ++i) {
            const double x = static_cast<double>(i) * g->spacing(0);
            e = std::max(e, std::abs(f[i] + pi * std::sin(pi * x)));
        }
        return e;
    };
    const double e200 = err(200), e400 = err(400);
    CHECK(e200 < 1e-3);
    CHECK(e200 / e400 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("divergence: zero field and conservativity")
{
    for (const auto& g : {grid_1d(64), grid_2d(16, 12), grid_radial(2, 40), grid_radial(5, 40)}) {
        const VectorGridFunction zero(g);
        const auto d0 = divergence(zero);
        for (std::size_t i = 0; i < d0.size(); ++i) CHECK(d0[i] == 0.0);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            VectorGridFunction flux(g);
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (int axis = 0; axis < g->axes(); ++axis) {
                auto faces = flux.faces(axis);
                for (auto& x : faces) x = dist(rng);
            }
            // Zero the boundary faces to make the field admissible.
            auto fx = flux.faces(0);
            const int nx = g->cells(0);
            const int ny = g->axes() == 2 ? g->cells(1) : 1;
            for (int j = 0; j < ny; ++j) {
                fx[static_cast<std::size_t>(j) * (nx + 1)] = 0.0;
                fx[static_cast<std::size_t>(j) * (nx + 1) + nx] = 0.0;
            }
            if (g->axes() == 2) {
                auto fy = flux.faces(1);
                for (int i = 0; i < nx; ++i) {
                    fy[i] = 0.0;
                    fy[static_cast<std::size_t>(ny) * nx + i] = 0.0;
                }
            }
            CHECK(std::abs(integrate(divergence(flux))) < 1e-13);
        }
    }
}

TEST_CASE("divergence: nonzero boundary face is rejected")
{
    const auto g = grid_1d(16);
    VectorGridFunction flux(g);
    flux.faces(0)[0] = 1.0;
    CHECK_FALSE(flux.boundary_faces_zero());
    CHECK_THROWS_AS(divergence(flux), std::invalid_argument);
}

TEST_CASE("laplacian: divergence of gradient, null space and self-adjointness")
{
    for (const auto& g : {grid_1d(64), grid_2d(16, 12), grid_radial(2, 40), grid_radial(3, 40)}) {
        const auto lc = laplacian(GridFunction(g, 2.5));
        for (std::size_t i = 0; i < lc.size(); ++i) CHECK(lc[i] == 0.0);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto f = random_field(g, seed);
            const auto h = random_field(g, seed + 100);
            const auto lf = laplacian(f);
            const auto dg = divergence(gradient(f));
            CHECK(max_abs_diff(lf, dg) == 0.0);
            const double a = inner(lf, h), b = inner(f, laplacian(h));
            CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)));
            CHECK(-inner(lf, f) > 0.0);
        }
    }
}

TEST_CASE("laplacian: cos(pi x) eigenfunction error is second order")
{
    const double e100 = eigen_error(100), e200 = eigen_error(200), e400 = eigen_error(400);
    CHECK(e100 / e200 > 3.5);
    CHECK(e100 / e200 < 4.5);
    CHECK(e200 / e400 > 3.5);
    CHECK(e200 / e400 < 4.5);
    // The error constant is stable under refinement.
    CHECK(e200 * 200 * 200 == doctest::Approx(e400 * 400 * 400).epsilon(0.05));
}

TEST_CASE("laplacian: radial r^2 gives 2n away from the origin and the boundary")
{
    for (int n : {2, 3, 5}) {
        // Worst error over cells with centre in [0.25, 0.9].
        auto err = [n](int cells) {
            const auto g = grid_radial(n, cells);
            const auto lap = laplacian(sample(g, [](double r, double) { return r * r; }));
            double e = 0.0;
            for (int i = 0; i < cells; ++i) {
                const double r = g->center(0, i);
                if (r >= 0.25 && r <= 0.9) e = std::max(e, std::abs(lap[i] - 2.0 * n));
            }
            return e;
        };
        CAPTURE(n);
        CHECK(err(100) < 1e-2);
        if (n == 2) {
            CHECK(err(200) < 1e-10);
        } else {
            CHECK(err(100) / err(200) > 3.5);
        }
    }
}

TEST_CASE("integrate: constants and sin^2")
{
    const auto g = grid_1d(200);
    CHECK(integrate(GridFunction(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    const auto g2 = grid_1d(40, 3.0);
    CHECK(integrate(GridFunction(g2, 2.0)) == doctest::Approx(6.0).epsilon(1e-14));
    const auto s = sample(g, [](double x, double) { return std::pow(std::sin(pi * x), 2); });
    CHECK(std::abs(integrate(s) - 0.5) < 1e-4);
}

TEST_CASE("lp_norm: constants, peaks and Hoelder")
{
    const auto g = grid_1d(64);
    CHECK(lp_norm(GridFunction(g, 2.0), 3.0) == doctest::Approx(2.0).epsilon(1e-14));
    GridFunction peak(g, 0.5);
    peak[17] = 7.0;
    CHECK(lp_norm(peak, std::numeric_limits<double>::infinity()) == 7.0);
    CHECK_THROWS_AS(lp_norm(peak, 0.5), std::invalid_argument);
    const auto g3 = grid_1d(64, 3.0);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto f = random_field(g3, seed);
        for (double p : {1.5, 2.0, 4.0, 10.0}) {
            CHECK(lp_norm(f, 1.0) <= std::pow(3.0, 1.0 - 1.0 / p) * lp_norm(f, p) * (1 + 1e-14));
        }
    }
}

TEST_CASE("gradient energy equals the integral of the cell reconstruction")
{
    for (const auto& g : {grid_1d(32), grid_2d(12, 9), grid_radial(3, 30)}) {
        const auto f = random_field(g, 7);
        CHECK(integrate(cell_gradient_squared(f)) == doctest::Approx(gradient_energy(f)).epsilon(1e-12));
    }
}

TEST_CASE("grid function finiteness is detectable")
{
    const auto g = grid_1d(8);
    GridFunction f(g, 1.0);
    CHECK(f.finite());
    f[3] = std::nan("");
    CHECK_FALSE(f.finite());
    CHECK_THROWS(GridFunction(g, std::vector<double>(5, 1.0)));
}
