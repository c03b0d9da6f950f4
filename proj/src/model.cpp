#include "ksflux/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ksflux {

void ModelParams::validate() const
{
    if (!(chi > 0.0)) throw std::invalid_argument("chi > 0 required");
    if (!(p > 1.0)) throw std::invalid_argument("p > 1 required");
    if (!(theta > 0.0)) throw std::invalid_argument("theta > 0 required");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("0 <= eps < 1 required");
    if (n < 1) throw std::invalid_argument("n >= 1 required");
}

void InitialData::validate() const
{
    if (u0.size() == 0 || v0.size() == 0) {
        throw std::invalid_argument("initial data is empty");
    }
    if (u0.grid_ptr() != v0.grid_ptr()) {
        throw std::invalid_argument("u0 and v0 live on different grids");
    }
    if (!u0.finite() || !v0.finite()) {
        throw std::invalid_argument("initial data must be finite");
    }
    if (u0.min() < 0.0) throw std::invalid_argument("u0 >= 0 required");
    if (v0.min() < 0.0) throw std::invalid_argument("v0 >= 0 required");
    if (!(integrate(u0) > 0.0)) throw std::invalid_argument("u0 must have positive mass");
}

double flux_limiter(double grad_sq, double p, double eps)
{
    const double s = grad_sq + eps;
    if (s <= 0.0) {
        return 0.0;
    }
    return std::pow(s, 0.5 * (p - 2.0));
}

double face_flux(double chi, double u_face, double normal, double tangential_sq,
                 double p, double eps)
{
    return chi * u_face * flux_limiter(normal * normal + tangential_sq, p, eps) * normal;
}

VectorGridFunction flux_coefficients(const VectorGridFunction& grad_v, const ModelParams& params)
{
    VectorGridFunction out(grad_v.grid_ptr());
    kernels::active::flux_coefficients(StencilGeometry::of(grad_v.grid()), params.flux_law(),
                                       grad_v.faces(0), grad_v.faces(1), out.faces(0), out.faces(1));
    return out;
}

VectorGridFunction regularized_flux(const GridFunction& u, const VectorGridFunction& grad_v,
                                    const ModelParams& params)
{
    if (u.grid_ptr() != grad_v.grid_ptr()) {
        throw std::invalid_argument("regularized_flux: u and grad v on different grids");
    }
    if (u.min() < 0.0) {
        throw std::invalid_argument("regularized_flux: negative u");
    }
    const auto coeff = flux_coefficients(grad_v, params);
    VectorGridFunction out(u.grid_ptr());
    kernels::active::upwind_flux(StencilGeometry::of(u.grid()), u.values(), coeff.faces(0),
                                 coeff.faces(1), out.faces(0), out.faces(1));
    return out;
}

GridFunction production(const GridFunction& u, const ModelParams& params)
{
    GridFunction out(u.grid_ptr());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = std::pow(u[i], params.theta);
    }
    return out;
}

double mollifier_pass_time(const Grid& grid, double eps)
{
    const auto geom = StencilGeometry::of(grid);
    // Row sums of the off-diagonal stencil weights.
    double worst = 0.0;
    for (int j = 0; j < geom.ny; ++j) {
        for (int i = 0; i < geom.nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * geom.nx + i;
            const std::size_t xf = static_cast<std::size_t>(j) * (geom.nx + 1) + i;
            double s = 0.0;
            if (i > 0) s += geom.area_x[xf] / geom.hx;
            if (i + 1 < geom.nx) s += geom.area_x[xf + 1] / geom.hx;
            if (geom.axes == 2) {
                if (j > 0) s += geom.area_y[c] / geom.hy;
                if (j + 1 < geom.ny) s += geom.area_y[c + geom.nx] / geom.hy;
            }
            worst = std::max(worst, s / geom.weights[c]);
        }
    }
    return eps * 0.5 / worst;
}

namespace {

void smooth(GridFunction& f, double tau, int passes)
{
    const auto geom = StencilGeometry::of(f.grid());
    std::vector<double> next(f.size());
    for (int k = 0; k < passes; ++k) {
        // next = f + tau L f, a convex combination of neighbours for tau <= tau_max.
        kernels::active::helmholtz_apply(geom, 1.0, -tau, f.values(), next);
        std::copy(next.begin(), next.end(), f.values().begin());
    }
}

} // namespace

InitialData mollify_initial_data(const InitialData& raw, double eps, const MollifierOptions& options)
{
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("mollify_initial_data: eps must lie in (0, 1)");
    }
    raw.validate();
    const double tau = mollifier_pass_time(raw.u0.grid(), eps);
    InitialData out = raw;
    smooth(out.u0, tau, options.passes);
    if (!options.keep_v0) {
        smooth(out.v0, tau, options.passes);
    }
    // Convex combinations of nonnegative values can still round to -0 or
    // a denormal below zero; those are the only negatives possible here.
    for (auto* f : {&out.u0, &out.v0}) {
        for (double& v : f->values()) {
            v = std::max(v, 0.0);
        }
    }
    return out;
}

} // namespace ksflux
