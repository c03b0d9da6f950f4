#pragma once

#include "ksflux/grid.hpp"
#include "ksflux/kernels.hpp"

namespace ksflux {

/// Parameters of the regularized system
///   u_t = lap u - chi div(u (|grad v|^2 + eps)^((p-2)/2) grad v),
///   v_t = lap v - v + u^theta,
/// with homogeneous Neumann conditions. eps = 0 selects the limit flux
/// u |grad v|^(p-2) grad v.
struct ModelParams {
    double chi = 1.0;
    double p = 1.5;
    double theta = 2.0;
    double eps = 1e-3;
    int n = 1;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
    FluxLaw flux_law() const { return {chi, p, eps}; }
};

struct InitialData {
    GridFunction u0;
    GridFunction v0;

    /// u0 >= 0 with positive mass, v0 >= 0, both finite and on one grid.
    void validate() const;
};

/// Scalar limiter (s + eps)^((p-2)/2) applied to |grad v|^2 = s. Returns 0
/// for s + eps = 0, which is the limit of the flux as grad v -> 0.
double flux_limiter(double grad_sq, double p, double eps);

/// Face-normal component of chi * u_face * (|grad v|^2 + eps)^((p-2)/2) grad v
/// for one face, given its normal gradient and squared tangential gradient.
double face_flux(double chi, double u_face, double normal, double tangential_sq,
                 double p, double eps);

/// Face coefficients chi (|grad v|^2 + eps)^((p-2)/2) d_n v. Boundary faces 0.
VectorGridFunction flux_coefficients(const VectorGridFunction& grad_v, const ModelParams& params);

/// Upwinded chemotactic flux: coefficient times u from the cell the
/// coefficient points away from. Rejects negative u.
VectorGridFunction regularized_flux(const GridFunction& u, const VectorGridFunction& grad_v,
                                    const ModelParams& params);

/// Cell-wise u^theta.
GridFunction production(const GridFunction& u, const ModelParams& params);

struct MollifierOptions {
    /// Number of averaging passes; the smoothing time per pass scales with eps.
    int passes = 4;
    /// Leave v0 untouched (used when the W^{1,s} exponent is infinite).
    bool keep_v0 = false;
};

/// Discrete mollification of initial data: `passes` explicit heat steps of
/// pseudo-time eps * tau_max, tau_max = 0.5 / max_i (sum_f A_f / (h w_i)).
/// Each pass is a nonnegative averaging that preserves the weighted mean,
/// hence mass, nonnegativity and every weighted L^q norm bound carry over.
InitialData mollify_initial_data(const InitialData& raw, double eps,
                                 const MollifierOptions& options = {});

/// One averaging pass x <- x + tau L_h x with the step used by the mollifier
/// at strength eps; exposed for tests.
double mollifier_pass_time(const Grid& grid, double eps);

} // namespace ksflux
