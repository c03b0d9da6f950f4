#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ksflux {

enum class GridMode { Cartesian1D, Cartesian2D, Radial };

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& name);

/// Domain description handed to build_grid.
///
/// Cartesian modes use [0, extent[a]] along each axis. Radial mode describes
/// the ball of radius extent[0] in R^dimension, resolved in r only.
struct DomainSpec {
    GridMode mode = GridMode::Cartesian1D;
    int dimension = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> cells{128, 1};
};

/// Uniform cell-centered mesh with face-centered fluxes.
///
/// Cells are stored row-major (index = j * nx + i). Faces normal to axis 0
/// are indexed j * (nx + 1) + i, faces normal to axis 1 are j * nx + i;
/// face i (resp. j) sits on the low side of cell i (resp. j).
class Grid {
public:
    GridMode mode() const { return mode_; }
    /// Spatial dimension n of the underlying domain.
    int dimension() const { return dimension_; }
    /// Number of resolved axes (2 only for cartesian-2d).
    int axes() const { return mode_ == GridMode::Cartesian2D ? 2 : 1; }
    int cells(int axis) const { return cells_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double extent(int axis) const { return extent_[axis]; }
    std::size_t size() const { return weights_.size(); }
    std::size_t face_count(int axis) const { return face_areas_[axis].size(); }

    std::span<const double> cell_weights() const { return weights_; }
    std::span<const double> face_areas(int axis) const { return face_areas_[axis]; }
    /// Quadrature weight attached to each face for gradient integrals. Every
    /// cell splits its weight evenly over its interior faces along each axis,
    /// so the dual weights of one axis sum to |Omega|. Boundary faces get 0.
    std::span<const double> face_dual_weights(int axis) const { return dual_weights_[axis]; }

    /// Coordinate of the cell center along an axis (r for radial mode).
    double center(int axis, int index) const { return (index + 0.5) * spacing_[axis]; }

    /// Analytic measure |Omega| of the continuum domain.
    double measure() const { return measure_; }

    const DomainSpec& spec() const { return spec_; }

private:
    friend std::shared_ptr<const Grid> build_grid(const DomainSpec& spec);
    Grid() = default;

    DomainSpec spec_;
    GridMode mode_ = GridMode::Cartesian1D;
    int dimension_ = 1;
    std::array<int, 2> cells_{1, 1};
    std::array<double, 2> spacing_{1.0, 1.0};
    std::array<double, 2> extent_{1.0, 1.0};
    std::vector<double> weights_;
    std::array<std::vector<double>, 2> face_areas_;
    std::array<std::vector<double>, 2> dual_weights_;
    double measure_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid; throws std::invalid_argument on non-positive extents,
/// fewer than 4 cells per axis, or dimension < 1.
GridPtr build_grid(const DomainSpec& spec);

/// Surface measure of the unit sphere in R^n (2 for n = 1, 2*pi for n = 2, ...).
double unit_sphere_area(int n);

/// Scalar field sampled at cell centers.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridPtr grid, double fill = 0.0);
    GridFunction(GridPtr grid, std::vector<double> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// False if any value is NaN or infinite.
    bool finite() const;
    double min() const;
    double max() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Face-centered vector field, one array of face-normal components per axis.
/// Boundary faces carry zero (no-flux).
class VectorGridFunction {
public:
    VectorGridFunction() = default;
    explicit VectorGridFunction(GridPtr grid);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::span<double> faces(int axis) { return faces_[axis]; }
    std::span<const double> faces(int axis) const { return faces_[axis]; }

    /// True when every boundary face value is exactly zero.
    bool boundary_faces_zero() const;
    bool finite() const;

private:
    GridPtr grid_;
    std::array<std::vector<double>, 2> faces_;
};

/// Fills a GridFunction by sampling f at cell centers. For 1D and radial
/// modes f receives (x, 0); for cartesian-2d it receives (x, y).
template <class F>
GridFunction sample(const GridPtr& grid, F&& f)
{
    GridFunction out(grid);
    const int nx = grid->cells(0);
    const int ny = grid->axes() == 2 ? grid->cells(1) : 1;
    for (int j = 0; j < ny; ++j) {
        const double y = grid->axes() == 2 ? grid->center(1, j) : 0.0;
        for (int i = 0; i < nx; ++i) {
            out[static_cast<std::size_t>(j) * nx + i] = f(grid->center(0, i), y);
        }
    }
    return out;
}

// Discrete operators. Neumann conditions are encoded as zero boundary fluxes.

/// Face differences (f_{i+1} - f_i) / h on interior faces, zero on boundary faces.
VectorGridFunction gradient(const GridFunction& f);

/// Conservative divergence: net area-weighted face flux over cell weight.
/// Throws std::invalid_argument if a boundary face is nonzero.
GridFunction divergence(const VectorGridFunction& flux);

/// divergence(gradient(f)).
GridFunction laplacian(const GridFunction& f);

/// Sum of f_i * weight_i.
double integrate(const GridFunction& f);

/// Weighted inner product sum f_i g_i weight_i.
double inner(const GridFunction& f, const GridFunction& g);

/// (sum |f_i|^p weight_i)^(1/p); p = infinity gives max |f_i|. Rejects p < 1.
double lp_norm(const GridFunction& f, double p);

/// Cell-wise |grad f|^2: per axis, the mean of the squared face gradients
/// over the cell's interior faces, summed over axes.
GridFunction cell_gradient_squared(const GridFunction& f);

/// Integral of |grad f|^2, i.e. sum over faces of g_f^2 * dual_weight_f.
/// Equals integrate(cell_gradient_squared(f)).
double gradient_energy(const GridFunction& f);

/// Largest face-gradient magnitude.
double gradient_max(const GridFunction& f);

} // namespace ksflux
