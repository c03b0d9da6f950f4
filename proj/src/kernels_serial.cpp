#include "ksflux/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ksflux::kernels::serial {

void face_gradient(const StencilGeometry& g, std::span<const double> f,
                   std::span<double> gx, std::span<double> gy)
{
    const int nx = g.nx;
    const int ny = g.ny;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * (nx + 1);
        const std::size_t c = static_cast<std::size_t>(j) * nx;
        gx[row] = 0.0;
        for (int i = 1; i < nx; ++i) {
            gx[row + i] = (f[c + i] - f[c + i - 1]) / g.hx;
        }
        gx[row + nx] = 0.0;
    }
    if (g.axes < 2) {
        return;
    }
    for (int i = 0; i < nx; ++i) {
        gy[i] = 0.0;
        gy[static_cast<std::size_t>(ny) * nx + i] = 0.0;
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * nx + i;
            gy[c] = (f[c] - f[c - nx]) / g.hy;
        }
    }
}

void divergence(const StencilGeometry& g, std::span<const double> fx,
                std::span<const double> fy, std::span<double> out)
{
    const int nx = g.nx;
    const int ny = g.ny;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * nx + i;
            const std::size_t xf = static_cast<std::size_t>(j) * (nx + 1) + i;
            double net = g.area_x[xf + 1] * fx[xf + 1] - g.area_x[xf] * fx[xf];
            if (g.axes == 2) {
                net += g.area_y[c + nx] * fy[c + nx] - g.area_y[c] * fy[c];
            }
            out[c] = net / g.weights[c];
        }
    }
}

void helmholtz_apply(const StencilGeometry& g, double diag, double scale,
                     std::span<const double> x, std::span<double> out)
{
    const int nx = g.nx;
    const int ny = g.ny;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * nx + i;
            const std::size_t xf = static_cast<std::size_t>(j) * (nx + 1) + i;
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
}

namespace {

double limited_coefficient(const FluxLaw& law, double normal, double tangential_sq)
{
    const double s = normal * normal + tangential_sq + law.eps;
    if (s <= 0.0) {
        return 0.0;
    }
    return law.chi * std::pow(s, 0.5 * (law.p - 2.0)) * normal;
}

} // namespace

void flux_coefficients(const StencilGeometry& g, const FluxLaw& law,
                       std::span<const double> gx, std::span<const double> gy,
                       std::span<double> cx, std::span<double> cy)
{
    const int nx = g.nx;
    const int ny = g.ny;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * (nx + 1);
        cx[row] = 0.0;
        cx[row + nx] = 0.0;
        for (int i = 1; i < nx; ++i) {
            double t2 = 0.0;
            if (g.axes == 2) {
                const std::size_t left = static_cast<std::size_t>(j) * nx + i - 1;
                const double t = 0.25 * (gy[left] + gy[left + nx] + gy[left + 1] + gy[left + 1 + nx]);
                t2 = t * t;
            }
            cx[row + i] = limited_coefficient(law, gx[row + i], t2);
        }
    }
    if (g.axes < 2) {
        return;
    }
    for (int i = 0; i < nx; ++i) {
        cy[i] = 0.0;
        cy[static_cast<std::size_t>(ny) * nx + i] = 0.0;
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * nx + i;
            const std::size_t below = static_cast<std::size_t>(j - 1) * (nx + 1) + i;
            const std::size_t above = static_cast<std::size_t>(j) * (nx + 1) + i;
            const double t = 0.25 * (gx[below] + gx[below + 1] + gx[above] + gx[above + 1]);
            cy[c] = limited_coefficient(law, gy[c], t * t);
        }
    }
}

void upwind_flux(const StencilGeometry& g, std::span<const double> u,
                 std::span<const double> cx, std::span<const double> cy,
                 std::span<double> fx, std::span<double> fy)
{
    const int nx = g.nx;
    const int ny = g.ny;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * (nx + 1);
        const std::size_t c = static_cast<std::size_t>(j) * nx;
        fx[row] = 0.0;
        fx[row + nx] = 0.0;
        for (int i = 1; i < nx; ++i) {
            const double a = cx[row + i];
            fx[row + i] = a * (a > 0.0 ? u[c + i - 1] : u[c + i]);
        }
    }
    if (g.axes < 2) {
        return;
    }
    for (int i = 0; i < nx; ++i) {
        fy[i] = 0.0;
        fy[static_cast<std::size_t>(ny) * nx + i] = 0.0;
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * nx + i;
            const double a = cy[c];
            fy[c] = a * (a > 0.0 ? u[c - nx] : u[c]);
        }
    }
}

double max_outflow_rate(const StencilGeometry& g, std::span<const double> cx,
                        std::span<const double> cy)
{
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * g.nx + i;
            const std::size_t xf = static_cast<std::size_t>(j) * (g.nx + 1) + i;
            double out = g.area_x[xf + 1] * std::max(cx[xf + 1], 0.0)
                         + g.area_x[xf] * std::max(-cx[xf], 0.0);
            if (g.axes == 2) {
                out += g.area_y[c + g.nx] * std::max(cy[c + g.nx], 0.0)
                       + g.area_y[c] * std::max(-cy[c], 0.0);
            }
            worst = std::max(worst, out / g.weights[c]);
        }
    }
    return worst;
}

double weighted_sum(std::span<const double> w, std::span<const double> f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s += w[i] * f[i];
    }
    return s;
}

double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> h)
{
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s += w[i] * f[i] * h[i];
    }
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += a * x[i];
    }
}

void xpby(std::span<const double> x, double b, std::span<double> y)
{
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = x[i] + b * y[i];
    }
}

} // namespace ksflux::kernels::serial
