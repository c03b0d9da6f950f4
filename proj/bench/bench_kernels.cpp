#include "ksflux/grid.hpp"
#include "ksflux/kernels.hpp"
#include "ksflux/linear_solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

using namespace ksflux;

struct Fixture {
    GridPtr grid;
    StencilGeometry geom;
    std::vector<double> u, gx, gy, cx, cy, out;

    explicit Fixture(int cells)
    {
        DomainSpec d;
        d.mode = GridMode::Cartesian2D;
        d.dimension = 2;
        d.cells = {cells, cells};
        grid = build_grid(d);
        geom = StencilGeometry::of(*grid);
        const std::size_t n = grid->size();
        u.resize(n);
        out.resize(n);
        for (std::size_t k = 0; k < n; ++k) u[k] = 1.0 + 0.5 * std::cos(0.37 * static_cast<double>(k));
        gx.resize(grid->face_count(0));
        cx.resize(gx.size());
        gy.resize(grid->face_count(1));
        cy.resize(gy.size());
        kernels::serial::face_gradient(geom, u, gx, gy);
    }
};

template <bool Parallel>
void helmholtz(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::parallel::helmholtz_apply(f.geom, 1.0, 1e-3, f.u, f.out);
        } else {
            kernels::serial::helmholtz_apply(f.geom, 1.0, 1e-3, f.u, f.out);
        }
        benchmark::DoNotOptimize(f.out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.u.size()));
}

template <bool Parallel>
void flux(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    const FluxLaw law{1.0, 1.5, 1e-3};
    std::vector<double> fx(f.gx.size()), fy(f.gy.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::parallel::flux_coefficients(f.geom, law, f.gx, f.gy, f.cx, f.cy);
            kernels::parallel::upwind_flux(f.geom, f.u, f.cx, f.cy, fx, fy);
            kernels::parallel::divergence(f.geom, fx, fy, f.out);
        } else {
            kernels::serial::flux_coefficients(f.geom, law, f.gx, f.gy, f.cx, f.cy);
            kernels::serial::upwind_flux(f.geom, f.u, f.cx, f.cy, fx, fy);
            kernels::serial::divergence(f.geom, fx, fy, f.out);
        }
        benchmark::DoNotOptimize(f.out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.u.size()));
}

template <bool Parallel>
void dot(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        double s;
        if constexpr (Parallel) {
            s = kernels::parallel::weighted_dot(f.geom.weights, f.u, f.u);
        } else {
            s = kernels::serial::weighted_dot(f.geom.weights, f.u, f.u);
        }
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.u.size()));
}

// The solver itself always runs the active (parallel) kernels.
void cg_solve(benchmark::State& state)
{
    Fixture f(static_cast<int>(state.range(0)));
    std::vector<double> x(f.u.size());
    for (auto _ : state) {
        std::copy(f.u.begin(), f.u.end(), x.begin());
        const auto rep = solve_helmholtz(*f.grid, 1.0, 1e-3, f.u, x);
        benchmark::DoNotOptimize(rep.iterations);
    }
}

} // namespace

BENCHMARK(helmholtz<false>)->Name("helmholtz/serial")->Arg(128)->Arg(512);
BENCHMARK(helmholtz<true>)->Name("helmholtz/parallel")->Arg(128)->Arg(512);
BENCHMARK(flux<false>)->Name("flux/serial")->Arg(128)->Arg(512);
BENCHMARK(flux<true>)->Name("flux/parallel")->Arg(128)->Arg(512);
BENCHMARK(dot<false>)->Name("weighted_dot/serial")->Arg(128)->Arg(512);
BENCHMARK(dot<true>)->Name("weighted_dot/parallel")->Arg(128)->Arg(512);
BENCHMARK(cg_solve)->Name("cg/parallel")->Arg(128);

BENCHMARK_MAIN();
