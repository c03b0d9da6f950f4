#include "ksflux/functionals.hpp"

#include "ksflux/kernels.hpp"
#include "ksflux/regime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace ksflux {

void FunctionalSpec::validate() const
{
    for (double q : q_set) {
        if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("q_set entries must be positive and finite");
    }
    if (!(s >= 1.0)) throw std::invalid_argument("s >= 1 required");
    if (!(q_f1 > 0.0) || q_f1 == 1.0) throw std::invalid_argument("q_f1 > 0, q_f1 != 1 required");
    if (!(c_f1 > 0.0)) throw std::invalid_argument("c_f1 > 0 required");
    if (!(q_f2 > 1.0)) throw std::invalid_argument("q_f2 > 1 required");
}

FunctionalSpec FunctionalSpec::from_audit(const ExponentAudit& audit)
{
    FunctionalSpec spec;
    if (audit.q_entropy1) spec.q_f1 = *audit.q_entropy1;
    if (audit.chosen_q && *audit.chosen_q > 1.0) spec.q_f2 = *audit.chosen_q;
    spec.s = audit.s.default_value;
    spec.q_set = {1.0, spec.q_f1, spec.q_f2, 2.0};
    std::sort(spec.q_set.begin(), spec.q_set.end());
    spec.q_set.erase(std::unique(spec.q_set.begin(), spec.q_set.end()), spec.q_set.end());
    return spec;
}

double power_integral(const GridFunction& f, double q)
{
    GridFunction powered(f.grid_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) {
        powered[i] = std::pow(std::abs(f[i]), q);
    }
    return integrate(powered);
}

double entropy_F1(const SimState& state, double q, double c)
{
    if (!(q > 0.0) || q == 1.0) {
        throw std::invalid_argument("entropy_F1: q > 0 and q != 1 required");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("entropy_F1: c > 0 required");
    }
    const double sign = q > 1.0 ? 1.0 : -1.0;
    return sign * power_integral(state.u, q) + c * power_integral(state.v, 2.0);
}

double entropy_F2(const SimState& state, double q)
{
    if (!(q > 1.0)) {
        throw std::invalid_argument("entropy_F2: q > 1 required");
    }
    return power_integral(state.u, q) + gradient_energy(state.v);
}

double dissipation_u(const SimState& state, double q)
{
    if (!(q > 0.0)) {
        throw std::invalid_argument("dissipation_u: q > 0 required");
    }
    const Grid& g = state.u.grid();
    const auto grad = gradient(state.u);
    const int nx = g.cells(0);
    const std::span<const double> u = state.u.values();
    double total = 0.0;
    for (int a = 0; a < g.axes(); ++a) {
        const auto dual = g.face_dual_weights(a);
        const auto gf = grad.faces(a);
        std::vector<double> integrand(gf.size(), 0.0);
        for (std::size_t f = 0; f < gf.size(); ++f) {
            if (dual[f] == 0.0) {
                continue;
            }
            // Cells on either side of face f.
            std::size_t lo, hi;
            if (a == 0) {
                const std::size_t j = f / (nx + 1);
                const std::size_t i = f - j * (nx + 1);
                hi = j * nx + i;
                lo = hi - 1;
            } else {
                hi = f;
                lo = f - nx;
            }
            const double mean = std::max(0.5 * (u[lo] + u[hi]), 1e-12);
            integrand[f] = std::pow(mean, q - 2.0) * gf[f] * gf[f];
        }
        total += kernels::active::weighted_sum(dual, integrand);
    }
    return total;
}

FunctionalRecord record(const SimState& state, const ModelParams& params, const FunctionalSpec& spec)
{
    (void)params;
    FunctionalRecord r;
    r.t = state.t;
    r.step = state.step_index;
    r.mass = integrate(state.u);
    r.q_values = spec.q_set;
    for (double q : spec.q_set) {
        r.uq.push_back(power_integral(state.u, q));
        r.dissip_u.push_back(dissipation_u(state, q));
    }
    r.u_linf = lp_norm(state.u, std::numeric_limits<double>::infinity());
    r.v_l2 = power_integral(state.v, 2.0);
    r.gradv_l2 = gradient_energy(state.v);

    const auto grad_sq = cell_gradient_squared(state.v);
    if (std::isinf(spec.s)) {
        r.gradv_ls = std::sqrt(grad_sq.max());
        r.v_w1s = std::max(lp_norm(state.v, spec.s), gradient_max(state.v));
    } else {
        GridFunction g(state.v.grid_ptr());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = std::pow(grad_sq[i], 0.5 * spec.s);
        }
        r.gradv_ls = integrate(g);
        r.v_w1s = std::pow(power_integral(state.v, spec.s) + r.gradv_ls, 1.0 / spec.s);
    }
    r.lap_v_l2 = power_integral(laplacian(state.v), 2.0);
    r.F1 = entropy_F1(state, spec.q_f1, spec.c_f1);
    r.F2 = entropy_F2(state, spec.q_f2);
    return r;
}

namespace {

std::string q_label(double q)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", q);
    return buf;
}

void append_number(std::string& out, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::vector<std::string> csv_columns(const FunctionalSpec& spec)
{
    std::vector<std::string> cols{"t", "step", "dt", "mass", "u_linf", "v_l2", "gradv_l2",
                                  "gradv_ls", "v_w1s", "lap_v_l2", "F1", "F2",
                                  "clamped_mass_cumulative"};
    for (double q : spec.q_set) cols.push_back("uq_" + q_label(q));
    for (double q : spec.q_set) cols.push_back("dissip_u_" + q_label(q));
    return cols;
}

std::string csv_row(const FunctionalRecord& rec)
{
    std::string out;
    const double fixed[] = {rec.t, static_cast<double>(rec.step), rec.dt, rec.mass, rec.u_linf,
                            rec.v_l2, rec.gradv_l2, rec.gradv_ls, rec.v_w1s, rec.lap_v_l2,
                            rec.F1, rec.F2, rec.clamped_mass_cumulative};
    bool first = true;
    auto put = [&](double v) {
        if (!first) out += ',';
        first = false;
        append_number(out, v);
    };
    for (double v : fixed) put(v);
    for (double v : rec.uq) put(v);
    for (double v : rec.dissip_u) put(v);
    return out;
}

} // namespace ksflux
