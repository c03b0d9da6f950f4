#include "helpers.hpp"

#include "ksflux/kernels.hpp"
#include "ksflux/linear_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <omp.h>

using namespace ksflux;
using namespace testing_helpers;

namespace {

std::vector<GridPtr> test_grids()
{
    return {grid_1d(5000), grid_2d(97, 83), grid_radial(3, 3000)};
}

struct Faces {
    std::vector<double> x, y;
    explicit Faces(const Grid& g) : x(g.face_count(0)), y(g.face_count(1)) {}
};

} // namespace

TEST_CASE("kernels: pointwise kernels agree bit for bit between serial and parallel")
{
    omp_set_num_threads(4);
    for (const auto& g : test_grids()) {
        const auto geom = StencilGeometry::of(*g);
        const auto f = random_field(g, 3, 0.0, 2.0);
        const auto h = random_field(g, 4, 0.0, 2.0);

        Faces gs(*g), gp(*g);
        kernels::serial::face_gradient(geom, f.values(), gs.x, gs.y);
        kernels::parallel::face_gradient(geom, f.values(), gp.x, gp.y);
        CHECK(gs.x == gp.x);
        CHECK(gs.y == gp.y);

        std::vector<double> ds(g->size()), dp(g->size());
        kernels::serial::divergence(geom, gs.x, gs.y, ds);
        kernels::parallel::divergence(geom, gp.x, gp.y, dp);
        CHECK(ds == dp);

        kernels::serial::helmholtz_apply(geom, 1.3, 0.7, f.values(), ds);
        kernels::parallel::helmholtz_apply(geom, 1.3, 0.7, f.values(), dp);
        CHECK(ds == dp);

        const FluxLaw law{1.0, 1.5, 1e-3};
        Faces cs(*g), cp(*g);
        kernels::serial::flux_coefficients(geom, law, gs.x, gs.y, cs.x, cs.y);
        kernels::parallel::flux_coefficients(geom, law, gp.x, gp.y, cp.x, cp.y);
        CHECK(cs.x == cp.x);
        CHECK(cs.y == cp.y);

        Faces fs(*g), fp(*g);
        kernels::serial::upwind_flux(geom, h.values(), cs.x, cs.y, fs.x, fs.y);
        kernels::parallel::upwind_flux(geom, h.values(), cp.x, cp.y, fp.x, fp.y);
        CHECK(fs.x == fp.x);
        CHECK(fs.y == fp.y);

        CHECK(kernels::serial::max_outflow_rate(geom, cs.x, cs.y) == kernels::parallel::max_outflow_rate(geom, cp.x, cp.y));

        std::vector<double> ys(f.values().begin(), f.values().end()), yp = ys;
        kernels::serial::axpy(0.3, h.values(), ys);
        kernels::parallel::axpy(0.3, h.values(), yp);
        CHECK(ys == yp);
        kernels::serial::xpby(h.values(), -0.2, ys);
        kernels::parallel::xpby(h.values(), -0.2, yp);
        CHECK(ys == yp);
    }
}

TEST_CASE("kernels: parallel reductions match serial to roundoff and ignore the thread count")
{
    for (const auto& g : test_grids()) {
        const auto f = random_field(g, 11);
        const auto h = random_field(g, 12);
        const auto w = g->cell_weights();
        const double s_ser = kernels::serial::weighted_sum(w, f.values());
        const double d_ser = kernels::serial::weighted_dot(w, f.values(), h.values());
        omp_set_num_threads(1);
        const double s1 = kernels::parallel::weighted_sum(w, f.values());
        const double d1 = kernels::parallel::weighted_dot(w, f.values(), h.values());
        for (int t : {2, 3, 7}) {
            omp_set_num_threads(t);
            CHECK(kernels::parallel::weighted_sum(w, f.values()) == s1);
            CHECK(kernels::parallel::weighted_dot(w, f.values(), h.values()) == d1);
        }
        CHECK(std::abs(s1 - s_ser) <= 1e-12 * (1.0 + std::abs(s_ser)));
        CHECK(std::abs(d1 - d_ser) <= 1e-12 * (1.0 + std::abs(d_ser)));
    }
    omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("kernels: helmholtz_apply matches diag x - scale laplacian(x)")
{
    for (const auto& g : test_grids()) {
        const auto f = random_field(g, 21);
        const auto lap = laplacian(f);
        std::vector<double> out(g->size());
        kernels::active::helmholtz_apply(StencilGeometry::of(*g), 2.0, 0.25, f.values(), out);
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i] == doctest::Approx(2.0 * f[i] - 0.25 * lap[i]).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("cg: solves the Helmholtz system and conserves the mean on request")
{
    for (const auto& g : {grid_1d(256), grid_2d(40, 30), grid_radial(2, 200)}) {
        const auto xs = random_field(g, 31, 0.0, 1.0);
        std::vector<double> b(g->size());
        kernels::active::helmholtz_apply(StencilGeometry::of(*g), 1.0, 1e-2, xs.values(), b);
        std::vector<double> x(g->size(), 0.0);
        CgOptions opts;
        opts.conserve_mean = true;
        const auto rep = solve_helmholtz(*g, 1.0, 1e-2, b, x, opts);
        CHECK(rep.converged);
        CHECK(rep.relative_residual <= 1e-10);
        const GridFunction xf(g, x), bf(g, std::vector<double>(b.begin(), b.end()));
        CHECK(max_abs_diff(xf, xs) < 1e-7);
        CHECK(std::abs(integrate(xf) - integrate(bf)) <= 1e-13 * std::abs(integrate(bf)));
    }
}

TEST_CASE("cg: zero right-hand side returns zero immediately")
{
    const auto g = grid_1d(32);
    std::vector<double> b(g->size(), 0.0), x(g->size(), 0.0);
    const auto rep = solve_helmholtz(*g, 1.0, 1.0, b, x);
    CHECK(rep.converged);
    for (double v : x) CHECK(v == 0.0);
}
