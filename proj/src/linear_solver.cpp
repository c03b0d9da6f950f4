#include "ksflux/linear_solver.hpp"

#include "ksflux/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ksflux {

namespace {

namespace k = kernels::active;

void remove_mean(std::span<const double> w, double measure, std::span<double> r)
{
    const double shift = k::weighted_sum(w, r) / measure;
    for (double& v : r) {
        v -= shift;
    }
}

} // namespace

CgReport solve_helmholtz(const Grid& grid, double diag, double scale,
                         std::span<const double> b, std::span<double> x,
                         const CgOptions& options)
{
    if (!(diag > 0.0) || scale < 0.0) {
        throw std::invalid_argument("solve_helmholtz: operator is not positive definite");
    }
    const auto geom = StencilGeometry::of(grid);
    const auto w = grid.cell_weights();
    const std::size_t n = grid.size();
    const int max_it = options.max_iterations > 0 ? options.max_iterations
                                                   : static_cast<int>(4 * n + 200);

    CgReport report;
    const double b_norm = std::sqrt(k::weighted_dot(w, b, b));
    if (b_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        report.converged = true;
        return report;
    }

    // The weighted mean of the constant vector is invariant: A 1 = diag * 1.
    // With <r0, 1> = 0 every later residual and direction is mean-free.
    double measure = 0.0;
    if (options.conserve_mean) {
        measure = k::weighted_sum(w, std::vector<double>(n, 1.0));
        const double target = k::weighted_sum(w, b) / diag;
        const double shift = (target - k::weighted_sum(w, x)) / measure;
        for (double& v : x) {
            v += shift;
        }
    }

    std::vector<double> r(n), p(n), ap(n);
    const double target = options.relative_tolerance * b_norm;
    auto true_residual = [&] {
        k::helmholtz_apply(geom, diag, scale, x, ap);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = b[i] - ap[i];
        }
        if (options.conserve_mean) {
            remove_mean(w, measure, r);
        }
        return k::weighted_dot(w, r, r);
    };

    int it = 0;
    double rr = true_residual();
    // The recurrence residual can drift from the true one; restart from the
    // true residual until it meets the tolerance as well.
    for (int restart = 0; restart < 4 && std::sqrt(rr) > target && it < max_it; ++restart) {
        p.assign(r.begin(), r.end());
        while (std::sqrt(rr) > target && it < max_it) {
            k::helmholtz_apply(geom, diag, scale, p, ap);
            const double pap = k::weighted_dot(w, p, ap);
            if (!(pap > 0.0)) {
                break;
            }
            const double alpha = rr / pap;
            k::axpy(alpha, p, x);
            k::axpy(-alpha, ap, r);
            if (options.conserve_mean) {
                remove_mean(w, measure, r);
            }
            const double rr_new = k::weighted_dot(w, r, r);
            k::xpby(r, rr_new / rr, p);
            rr = rr_new;
            ++it;
        }
        rr = true_residual();
    }

    report.iterations = it;
    report.relative_residual = std::sqrt(rr) / b_norm;
    report.converged = std::isfinite(report.relative_residual)
                       && report.relative_residual <= options.relative_tolerance;
    return report;
}

} // namespace ksflux
