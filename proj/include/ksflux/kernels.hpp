#pragma once

#include <cstddef>
#include <span>

namespace ksflux {

class Grid;

/// Flat view of the mesh data the stencil kernels need.
struct StencilGeometry {
    int nx = 0;
    int ny = 1;
    int axes = 1;
    double hx = 1.0;
    double hy = 1.0;
    std::span<const double> weights;
    std::span<const double> area_x;
    std::span<const double> area_y;

    static StencilGeometry of(const Grid& grid);
    std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
};

/// Coefficients of the regularized chemotactic flux.
struct FluxLaw {
    double chi = 1.0;
    double p = 2.0;
    double eps = 0.0;
};

// The two namespaces expose the same hot loops. `serial` is the plain
// reference; `parallel` adds OpenMP work sharing. Pointwise kernels give
// bit-identical results in both. Reductions in `parallel` sum fixed-size
// blocks and then combine the partials in order, so they do not depend on
// the thread count, but may differ from `serial` in the last bits.

#define KSFLUX_KERNEL_DECLARATIONS                                                       \
    void face_gradient(const StencilGeometry& g, std::span<const double> f,              \
                       std::span<double> gx, std::span<double> gy);                      \
    void divergence(const StencilGeometry& g, std::span<const double> fx,                \
                    std::span<const double> fy, std::span<double> out);                  \
    /* out = diag * x - scale * L x */                                                   \
    void helmholtz_apply(const StencilGeometry& g, double diag, double scale,            \
                         std::span<const double> x, std::span<double> out);              \
    void flux_coefficients(const StencilGeometry& g, const FluxLaw& law,                 \
                           std::span<const double> gx, std::span<const double> gy,       \
                           std::span<double> cx, std::span<double> cy);                  \
    void upwind_flux(const StencilGeometry& g, std::span<const double> u,                \
                     std::span<const double> cx, std::span<const double> cy,             \
                     std::span<double> fx, std::span<double> fy);                        \
    /* max over cells of (sum of outgoing area * |coefficient|) / weight */              \
    double max_outflow_rate(const StencilGeometry& g, std::span<const double> cx,        \
                            std::span<const double> cy);                                 \
    double weighted_sum(std::span<const double> w, std::span<const double> f);           \
    double weighted_dot(std::span<const double> w, std::span<const double> f,            \
                        std::span<const double> h);                                      \
    /* y += a * x */                                                                     \
    void axpy(double a, std::span<const double> x, std::span<double> y);                 \
    /* y = x + b * y */                                                                  \
    void xpby(std::span<const double> x, double b, std::span<double> y);

namespace kernels::serial {
KSFLUX_KERNEL_DECLARATIONS
} // namespace kernels::serial

namespace kernels::parallel {
KSFLUX_KERNEL_DECLARATIONS
} // namespace kernels::parallel

#undef KSFLUX_KERNEL_DECLARATIONS

namespace kernels {
/// Kernels used by the library proper.
namespace active = parallel;
} // namespace kernels

} // namespace ksflux
