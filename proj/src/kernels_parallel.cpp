#include "ksflux/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace ksflux::kernels::parallel {

namespace {

// Below this many elements the fork/join cost dominates.
constexpr std::int64_t kParallelMin = 8192;

// Reduction block length. Fixed, so partial sums are independent of threads.
constexpr std::int64_t kBlock = 2048;

double limited_coefficient(const FluxLaw& law, double normal, double tangential_sq)
{
    const double s = normal * normal + tangential_sq + law.eps;
    if (s <= 0.0) {
        return 0.0;
    }
    return law.chi * std::pow(s, 0.5 * (law.p - 2.0)) * normal;
}

template <class BlockFn>
double blocked_sum(std::int64_t n, BlockFn&& block_sum)
{
    const std::int64_t blocks = (n + kBlock - 1) / kBlock;
    if (blocks <= 1) {
        return block_sum(0, n);
    }
    std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (std::int64_t b = 0; b < blocks; ++b) {
        partial[b] = block_sum(b * kBlock, std::min(n, (b + 1) * kBlock));
    }
    double s = 0.0;
    for (double v : partial) {
        s += v;
    }
    return s;
}

} // namespace

void face_gradient(const StencilGeometry& g, std::span<const double> f,
                   std::span<double> gx, std::span<double> gy)
{
    const std::int64_t nx = g.nx;
    const std::int64_t nfx = static_cast<std::int64_t>(gx.size());
#pragma omp parallel for schedule(static) if (nfx >= kParallelMin)
    for (std::int64_t k = 0; k < nfx; ++k) {
        const std::int64_t j = k / (nx + 1);
        const std::int64_t i = k - j * (nx + 1);
        if (i == 0 || i == nx) {
            gx[k] = 0.0;
        } else {
            const std::int64_t c = j * nx + i;
            gx[k] = (f[c] - f[c - 1]) / g.hx;
        }
    }
    if (g.axes < 2) {
        return;
    }
    const std::int64_t ny = g.ny;
    const std::int64_t nfy = static_cast<std::int64_t>(gy.size());
#pragma omp parallel for schedule(static) if (nfy >= kParallelMin)
    for (std::int64_t k = 0; k < nfy; ++k) {
        const std::int64_t j = k / nx;
        if (j == 0 || j == ny) {
            gy[k] = 0.0;
        } else {
            gy[k] = (f[k] - f[k - nx]) / g.hy;
        }
    }
}

void divergence(const StencilGeometry& g, std::span<const double> fx,
                std::span<const double> fy, std::span<double> out)
{
    const std::int64_t nx = g.nx;
    const std::int64_t n = static_cast<std::int64_t>(g.cells());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t j = c / nx;
        const std::int64_t xf = c + j;
        double net = g.area_x[xf + 1] * fx[xf + 1] - g.area_x[xf] * fx[xf];
        if (g.axes == 2) {
            net += g.area_y[c + nx] * fy[c + nx] - g.area_y[c] * fy[c];
        }
        out[c] = net / g.weights[c];
    }
}

void helmholtz_apply(const StencilGeometry& g, double diag, double scale,
                     std::span<const double> x, std::span<double> out)
{
    const std::int64_t nx = g.nx;
    const std::int64_t ny = g.ny;
    const std::int64_t n = static_cast<std::int64_t>(g.cells());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t j = c / nx;
        const std::int64_t i = c - j * nx;
        const std::int64_t xf = c + j;
        const double lo = i > 0 ? (x[c] - x[c - 1]) / g.hx : 0.0;
        const double hi = i + 1 < nx ? (x[c + 1] - x[c]) / g.hx : 0.0;
        double net = g.area_x[xf + 1] * hi - g.area_x[xf] * lo;
        if (g.axes == 2) {
            const double south = j > 0 ? (x[c] - x[c - nx]) / g.hy : 0.0;
            const double north = j + 1 < ny ? (x[c + nx] - x[c]) / g.hy : 0.0;
            net += g.area_y[c + nx] * north - g.area_y[c] * south;
        }
        out[c] = diag * x[c] - scale * (net / g.weights[c]);
    }
}

void flux_coefficients(const StencilGeometry& g, const FluxLaw& law,
                       std::span<const double> gx, std::span<const double> gy,
                       std::span<double> cx, std::span<double> cy)
{
    const std::int64_t nx = g.nx;
    const std::int64_t nfx = static_cast<std::int64_t>(cx.size());
#pragma omp parallel for schedule(static) if (nfx >= kParallelMin)
    for (std::int64_t k = 0; k < nfx; ++k) {
        const std::int64_t j = k / (nx + 1);
        const std::int64_t i = k - j * (nx + 1);
        if (i == 0 || i == nx) {
            cx[k] = 0.0;
            continue;
        }
        double t2 = 0.0;
        if (g.axes == 2) {
            const std::int64_t left = j * nx + i - 1;
            const double t = 0.25 * (gy[left] + gy[left + nx] + gy[left + 1] + gy[left + 1 + nx]);
            t2 = t * t;
        }
        cx[k] = limited_coefficient(law, gx[k], t2);
    }
    if (g.axes < 2) {
        return;
    }
    const std::int64_t ny = g.ny;
    const std::int64_t nfy = static_cast<std::int64_t>(cy.size());
#pragma omp parallel for schedule(static) if (nfy >= kParallelMin)
    for (std::int64_t k = 0; k < nfy; ++k) {
        const std::int64_t j = k / nx;
        if (j == 0 || j == ny) {
            cy[k] = 0.0;
            continue;
        }
        const std::int64_t i = k - j * nx;
        const std::int64_t below = (j - 1) * (nx + 1) + i;
        const std::int64_t above = j * (nx + 1) + i;
        const double t = 0.25 * (gx[below] + gx[below + 1] + gx[above] + gx[above + 1]);
        cy[k] = limited_coefficient(law, gy[k], t * t);
    }
}

void upwind_flux(const StencilGeometry& g, std::span<const double> u,
                 std::span<const double> cx, std::span<const double> cy,
                 std::span<double> fx, std::span<double> fy)
{
    const std::int64_t nx = g.nx;
    const std::int64_t nfx = static_cast<std::int64_t>(fx.size());
#pragma omp parallel for schedule(static) if (nfx >= kParallelMin)
    for (std::int64_t k = 0; k < nfx; ++k) {
        const std::int64_t j = k / (nx + 1);
        const std::int64_t i = k - j * (nx + 1);
        if (i == 0 || i == nx) {
            fx[k] = 0.0;
            continue;
        }
        const std::int64_t c = j * nx + i;
        const double a = cx[k];
        fx[k] = a * (a > 0.0 ? u[c - 1] : u[c]);
    }
    if (g.axes < 2) {
        return;
    }
    const std::int64_t ny = g.ny;
    const std::int64_t nfy = static_cast<std::int64_t>(fy.size());
#pragma omp parallel for schedule(static) if (nfy >= kParallelMin)
    for (std::int64_t k = 0; k < nfy; ++k) {
        const std::int64_t j = k / nx;
        if (j == 0 || j == ny) {
            fy[k] = 0.0;
            continue;
        }
        const double a = cy[k];
        fy[k] = a * (a > 0.0 ? u[k - nx] : u[k]);
    }
}

double max_outflow_rate(const StencilGeometry& g, std::span<const double> cx,
                        std::span<const double> cy)
{
    const std::int64_t nx = g.nx;
    const std::int64_t n = static_cast<std::int64_t>(g.cells());
    double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst) if (n >= kParallelMin)
    for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t j = c / nx;
        const std::int64_t xf = c + j;
        double out = g.area_x[xf + 1] * std::max(cx[xf + 1], 0.0)
                     + g.area_x[xf] * std::max(-cx[xf], 0.0);
        if (g.axes == 2) {
            out += g.area_y[c + nx] * std::max(cy[c + nx], 0.0)
                   + g.area_y[c] * std::max(-cy[c], 0.0);
        }
        worst = std::max(worst, out / g.weights[c]);
    }
    return worst;
}

double weighted_sum(std::span<const double> w, std::span<const double> f)
{
    return blocked_sum(static_cast<std::int64_t>(f.size()), [&](std::int64_t lo, std::int64_t hi) {
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            s += w[i] * f[i];
        }
        return s;
    });
}

double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> h)
{
    return blocked_sum(static_cast<std::int64_t>(f.size()), [&](std::int64_t lo, std::int64_t hi) {
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            s += w[i] * f[i] * h[i];
        }
        return s;
    });
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    const std::int64_t n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (std::int64_t i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

void xpby(std::span<const double> x, double b, std::span<double> y)
{
    const std::int64_t n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
    for (std::int64_t i = 0; i < n; ++i) {
        y[i] = x[i] + b * y[i];
    }
}

} // namespace ksflux::kernels::parallel
