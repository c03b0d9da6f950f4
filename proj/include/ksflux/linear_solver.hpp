#pragma once

#include "ksflux/grid.hpp"

#include <span>

namespace ksflux {

struct CgOptions {
    double relative_tolerance = 1e-10;
    /// 0 selects 4 * cells + 200.
    int max_iterations = 0;
    /// Keep the weighted mean of the solution fixed at mean(b) / diag exactly,
    /// by starting from a mean-corrected guess and iterating in the
    /// mean-zero subspace.
    bool conserve_mean = false;
};

struct CgReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Solves (diag * I - scale * L_h) x = b by conjugate gradients in the
/// cell-weighted inner product, in which the operator is symmetric positive
/// definite for diag > 0, scale >= 0. x carries the initial guess.
CgReport solve_helmholtz(const Grid& grid, double diag, double scale,
                         std::span<const double> b, std::span<double> x,
                         const CgOptions& options = {});

} // namespace ksflux
