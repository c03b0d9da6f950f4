#pragma once

#include "ksflux/grid.hpp"

#include <random>

namespace testing_helpers {

inline ksflux::GridPtr grid_1d(int cells, double length = 1.0)
{
    ksflux::DomainSpec d;
    d.mode = ksflux::GridMode::Cartesian1D;
    d.dimension = 1;
    d.extent = {length, 1.0};
    d.cells = {cells, 1};
    return ksflux::build_grid(d);
}

inline ksflux::GridPtr grid_2d(int nx, int ny)
{
    ksflux::DomainSpec d;
    d.mode = ksflux::GridMode::Cartesian2D;
    d.dimension = 2;
    d.cells = {nx, ny};
    return ksflux::build_grid(d);
}

inline ksflux::GridPtr grid_radial(int n, int cells, double radius = 1.0)
{
    ksflux::DomainSpec d;
    d.mode = ksflux::GridMode::Radial;
    d.dimension = n;
    d.extent = {radius, 1.0};
    d.cells = {cells, 1};
    return ksflux::build_grid(d);
}

inline ksflux::GridFunction random_field(const ksflux::GridPtr& g, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ksflux::GridFunction f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

inline double max_abs_diff(const ksflux::GridFunction& a, const ksflux::GridFunction& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing_helpers
