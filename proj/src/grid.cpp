#include "ksflux/grid.hpp"

#include "ksflux/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ksflux {

std::string to_string(GridMode mode)
{
    switch (mode) {
    case GridMode::Cartesian1D: return "cartesian-1d";
    case GridMode::Cartesian2D: return "cartesian-2d";
    case GridMode::Radial: return "radial-n";
    }
    return "unknown";
}

GridMode grid_mode_from_string(const std::string& name)
{
    if (name == "cartesian-1d") return GridMode::Cartesian1D;
    if (name == "cartesian-2d") return GridMode::Cartesian2D;
    if (name == "radial-n") return GridMode::Radial;
    throw std::invalid_argument("unknown grid mode '" + name + "'");
}

double unit_sphere_area(int n)
{
    if (n < 1) {
        throw std::invalid_argument("dimension must be >= 1");
    }
    const double half = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

namespace {

void fill_dual_weights(const std::vector<double>& weights, int nx, int ny, int axis,
                       std::vector<double>& dual)
{
    // Interior faces a cell owns along this axis: 1 at the boundary, else 2.
    const int len = axis == 0 ? nx : ny;
    auto share = [&](std::size_t cell, int pos) {
        const int interior = (pos > 0 ? 1 : 0) + (pos + 1 < len ? 1 : 0);
        return weights[cell] / interior;
    };
    if (axis == 0) {
        dual.assign(static_cast<std::size_t>(nx + 1) * ny, 0.0);
        for (int j = 0; j < ny; ++j) {
            for (int i = 1; i < nx; ++i) {
                const std::size_t c = static_cast<std::size_t>(j) * nx + i;
                dual[static_cast<std::size_t>(j) * (nx + 1) + i] = share(c - 1, i - 1) + share(c, i);
            }
        }
    } else {
        dual.assign(static_cast<std::size_t>(nx) * (ny + 1), 0.0);
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = static_cast<std::size_t>(j) * nx + i;
                dual[c] = share(c - nx, j - 1) + share(c, j);
            }
        }
    }
}

} // namespace

GridPtr build_grid(const DomainSpec& spec)
{
    if (spec.dimension < 1) {
        throw std::invalid_argument("grid dimension must be >= 1");
    }
    const int axes = spec.mode == GridMode::Cartesian2D ? 2 : 1;
    for (int a = 0; a < axes; ++a) {
        if (!(spec.extent[a] > 0.0) || !std::isfinite(spec.extent[a])) {
            throw std::invalid_argument("grid extents must be positive");
        }
        if (spec.cells[a] < 4) {
            throw std::invalid_argument("grid resolution must be at least 4 cells per axis");
        }
    }
    if (spec.mode == GridMode::Cartesian1D && spec.dimension != 1) {
        throw std::invalid_argument("cartesian-1d grids have dimension 1");
    }
    if (spec.mode == GridMode::Cartesian2D && spec.dimension != 2) {
        throw std::invalid_argument("cartesian-2d grids have dimension 2");
    }

    std::shared_ptr<Grid> grid(new Grid());
    Grid& g = *grid;
    g.spec_ = spec;
    g.mode_ = spec.mode;
    g.dimension_ = spec.dimension;
    g.cells_ = {spec.cells[0], axes == 2 ? spec.cells[1] : 1};
    g.extent_ = {spec.extent[0], axes == 2 ? spec.extent[1] : 1.0};
    g.spacing_ = {spec.extent[0] / spec.cells[0], axes == 2 ? spec.extent[1] / spec.cells[1] : 1.0};
    g.spec_.cells[1] = g.cells_[1];
    g.spec_.extent[1] = g.extent_[1];

    const int nx = g.cells_[0];
    const int ny = g.cells_[1];
    const double hx = g.spacing_[0];
    const double hy = g.spacing_[1];
    const std::size_t n = static_cast<std::size_t>(nx) * ny;

    switch (spec.mode) {
    case GridMode::Cartesian1D:
        g.weights_.assign(n, hx);
        g.face_areas_[0].assign(nx + 1, 1.0);
        g.measure_ = spec.extent[0];
        break;
    case GridMode::Cartesian2D:
        g.weights_.assign(n, hx * hy);
        g.face_areas_[0].assign(static_cast<std::size_t>(nx + 1) * ny, hy);
        g.face_areas_[1].assign(static_cast<std::size_t>(nx) * (ny + 1), hx);
        g.measure_ = spec.extent[0] * spec.extent[1];
        break;
    case GridMode::Radial: {
        const int d = spec.dimension;
        const double omega = unit_sphere_area(d);
        g.weights_.resize(n);
        g.face_areas_[0].resize(nx + 1);
        for (int i = 0; i < nx; ++i) {
            g.weights_[i] = omega * std::pow(g.center(0, i), d - 1) * hx;
        }
        for (int i = 0; i <= nx; ++i) {
            g.face_areas_[0][i] = omega * std::pow(i * hx, d - 1);
        }
        g.measure_ = omega * std::pow(spec.extent[0], d) / d;
        break;
    }
    }

    fill_dual_weights(g.weights_, nx, ny, 0, g.dual_weights_[0]);
    if (axes == 2) {
        fill_dual_weights(g.weights_, nx, ny, 1, g.dual_weights_[1]);
    }
    return grid;
}

GridFunction::GridFunction(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill)
{
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_->size()) {
        throw std::invalid_argument("value count does not match grid cell count");
    }
}

bool GridFunction::finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridFunction::min() const
{
    return *std::min_element(values_.begin(), values_.end());
}

double GridFunction::max() const
{
    return *std::max_element(values_.begin(), values_.end());
}

VectorGridFunction::VectorGridFunction(GridPtr grid) : grid_(std::move(grid))
{
    for (int a = 0; a < grid_->axes(); ++a) {
        faces_[a].assign(grid_->face_count(a), 0.0);
    }
}

bool VectorGridFunction::boundary_faces_zero() const
{
    const int nx = grid_->cells(0);
    const int ny = grid_->cells(1);
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * (nx + 1);
        if (faces_[0][row] != 0.0 || faces_[0][row + nx] != 0.0) {
            return false;
        }
    }
    if (grid_->axes() == 2) {
        for (int i = 0; i < nx; ++i) {
            if (faces_[1][i] != 0.0 || faces_[1][static_cast<std::size_t>(ny) * nx + i] != 0.0) {
                return false;
            }
        }
    }
    return true;
}

bool VectorGridFunction::finite() const
{
    for (const auto& f : faces_) {
        if (!std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); })) {
            return false;
        }
    }
    return true;
}

namespace {

void require_finite(const GridFunction& f, const char* op)
{
    if (!f.finite()) {
        throw std::domain_error(std::string(op) + ": non-finite value in grid function");
    }
}

} // namespace

VectorGridFunction gradient(const GridFunction& f)
{
    require_finite(f, "gradient");
    VectorGridFunction out(f.grid_ptr());
    kernels::active::face_gradient(StencilGeometry::of(f.grid()), f.values(), out.faces(0), out.faces(1));
    return out;
}

GridFunction divergence(const VectorGridFunction& flux)
{
    if (!flux.boundary_faces_zero()) {
        throw std::invalid_argument("divergence: nonzero flux on a boundary face");
    }
    if (!flux.finite()) {
        throw std::domain_error("divergence: non-finite face value");
    }
    GridFunction out(flux.grid_ptr());
    kernels::active::divergence(StencilGeometry::of(flux.grid()), flux.faces(0), flux.faces(1), out.values());
    return out;
}

GridFunction laplacian(const GridFunction& f)
{
    return divergence(gradient(f));
}

double integrate(const GridFunction& f)
{
    return kernels::active::weighted_sum(f.grid().cell_weights(), f.values());
}

double inner(const GridFunction& f, const GridFunction& g)
{
    return kernels::active::weighted_dot(f.grid().cell_weights(), f.values(), g.values());
}

double lp_norm(const GridFunction& f, double p)
{
    if (std::isinf(p) && p > 0) {
        double m = 0.0;
        for (double v : f.values()) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }
    if (!(p >= 1.0)) {
        throw std::invalid_argument("lp_norm: exponent must be >= 1 or infinity");
    }
    GridFunction powered(f.grid_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) {
        powered[i] = std::pow(std::abs(f[i]), p);
    }
    return std::pow(integrate(powered), 1.0 / p);
}

GridFunction cell_gradient_squared(const GridFunction& f)
{
    const Grid& g = f.grid();
    const auto grad = gradient(f);
    GridFunction out(f.grid_ptr());
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * nx + i;
            const std::size_t xf = static_cast<std::size_t>(j) * (nx + 1) + i;
            const auto gx = grad.faces(0);
            const int mx = (i > 0 ? 1 : 0) + (i + 1 < nx ? 1 : 0);
            double s = (gx[xf] * gx[xf] + gx[xf + 1] * gx[xf + 1]) / mx;
            if (g.axes() == 2) {
                const auto gy = grad.faces(1);
                const int my = (j > 0 ? 1 : 0) + (j + 1 < ny ? 1 : 0);
                s += (gy[c] * gy[c] + gy[c + nx] * gy[c + nx]) / my;
            }
            out[c] = s;
        }
    }
    return out;
}

double gradient_energy(const GridFunction& f)
{
    const auto grad = gradient(f);
    double s = 0.0;
    for (int a = 0; a < f.grid().axes(); ++a) {
        const auto gf = grad.faces(a);
        s += kernels::active::weighted_dot(f.grid().face_dual_weights(a), gf, gf);
    }
    return s;
}

double gradient_max(const GridFunction& f)
{
    const auto grad = gradient(f);
    double m = 0.0;
    for (int a = 0; a < f.grid().axes(); ++a) {
        for (double v : grad.faces(a)) {
            m = std::max(m, std::abs(v));
        }
    }
    return m;
}

StencilGeometry StencilGeometry::of(const Grid& grid)
{
    StencilGeometry s;
    s.nx = grid.cells(0);
    s.ny = grid.cells(1);
    s.axes = grid.axes();
    s.hx = grid.spacing(0);
    s.hy = grid.spacing(1);
    s.weights = grid.cell_weights();
    s.area_x = grid.face_areas(0);
    s.area_y = grid.face_areas(1);
    return s;
}

} // namespace ksflux
