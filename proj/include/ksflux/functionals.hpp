#pragma once

#include "ksflux/grid.hpp"
#include "ksflux/model.hpp"

#include <string>
#include <vector>

namespace ksflux {

struct ExponentAudit;

/// One point of a trajectory.
struct SimState {
    GridFunction u;
    GridFunction v;
    double t = 0.0;
    long step_index = 0;
};

/// Which exponents a FunctionalRecord evaluates.
struct FunctionalSpec {
    /// Exponents q for the columns uq_q = int u^q and dissip_u_q.
    std::vector<double> q_set{2.0};
    /// W^{1,s} exponent; infinity selects max-norms.
    double s = 3.0;
    /// Exponent and v^2 weight of F1 = sgn(q-1) int u^q + c int v^2.
    double q_f1 = 2.0;
    double c_f1 = 1.0;
    /// Exponent of F2 = int u^q + int |grad v|^2.
    double q_f2 = 2.0;

    void validate() const;
    /// q_f1, q_f2 and s from the audit witnesses (kept at the defaults
    /// where the audit has none); q_set becomes {1, q_f1, q_f2, 2} sorted, unique.
    static FunctionalSpec from_audit(const ExponentAudit& audit);
};

struct FunctionalRecord {
    double t = 0.0;
    long step = 0;
    double dt = 0.0;
    double mass = 0.0;
    std::vector<double> q_values;
    std::vector<double> uq;
    std::vector<double> dissip_u;
    double u_linf = 0.0;
    double v_l2 = 0.0;
    double gradv_l2 = 0.0;
    double gradv_ls = 0.0;
    double v_w1s = 0.0;
    double lap_v_l2 = 0.0;
    double F1 = 0.0;
    double F2 = 0.0;
    double clamped_mass_cumulative = 0.0;
};

/// sgn(q-1) int u^q + c int v^2. Rejects q <= 0, q = 1 or c <= 0.
double entropy_F1(const SimState& state, double q, double c);

/// int u^q + int |grad v|^2. Rejects q <= 1.
double entropy_F2(const SimState& state, double q);

/// sum over faces of dual_weight * max(face mean of u, 1e-12)^(q-2) * (grad u)^2.
double dissipation_u(const SimState& state, double q);

/// int |f|^q for any q > 0 (no root taken).
double power_integral(const GridFunction& f, double q);

FunctionalRecord record(const SimState& state, const ModelParams& params, const FunctionalSpec& spec);

/// Column names of the functional CSV, in row order.
std::vector<std::string> csv_columns(const FunctionalSpec& spec);
/// One CSV row, every number formatted with %.17g.
std::string csv_row(const FunctionalRecord& rec);

} // namespace ksflux
