#include "ksflux/stepper.hpp"

#include "ksflux/kernels.hpp"
#include "ksflux/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ksflux {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Negatives at or above this are roundoff and get clamped; below is a defect.
constexpr double kClampFloor = -1e-10;

/// dt exceeds the positivity limit of the coefficients built from v_new.
class StepRejected : public NumericalFailure {
public:
    StepRejected(const std::string& what, double limit) : NumericalFailure(what), limit(limit) {}
    double limit;
};

double clamp_negatives(GridFunction& f, const char* name)
{
    double added = 0.0;
    const auto w = f.grid().cell_weights();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0.0) {
            if (f[i] < kClampFloor) {
                throw NumericalFailure(std::string(name) + " became negative beyond roundoff ("
                                       + std::to_string(f[i]) + ")");
            }
            added -= f[i] * w[i];
            f[i] = 0.0;
        }
    }
    return added;
}

double outflow_rate(const GridFunction& v, const ModelParams& params)
{
    const auto coeff = flux_coefficients(gradient(v), params);
    return kernels::active::max_outflow_rate(StencilGeometry::of(v.grid()), coeff.faces(0), coeff.faces(1));
}

} // namespace

void StepControls::validate() const
{
    if (!(dt_min > 0.0) || !(dt_max >= dt_min)) throw std::invalid_argument("0 < dt_min <= dt_max required");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety in (0, 1] required");
    if (!(blowup_linf_threshold > 0.0)) throw std::invalid_argument("blowup_linf_threshold > 0 required");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end >= 0 required");
    if (!(cg_tolerance > 0.0 && cg_tolerance < 1.0)) throw std::invalid_argument("cg_tolerance in (0, 1) required");
}

std::string to_string(TerminalStatus status)
{
    switch (status) {
    case TerminalStatus::Completed: return "Completed";
    case TerminalStatus::BlowUpSuspected: return "BlowUpSuspected";
    case TerminalStatus::NumericalFailure: return "NumericalFailure";
    }
    return "unknown";
}

double positivity_limit(const GridFunction& v, const ModelParams& params)
{
    const double rate = outflow_rate(v, params);
    return rate > 0.0 ? 1.0 / rate : kInf;
}

DtBounds dt_bounds(const SimState& state, const ModelParams& params, const StepControls& controls)
{
    DtBounds b{kInf, kInf, kInf, kInf};
    const Grid& g = state.u.grid();
    b.advective = controls.cfl_safety * positivity_limit(state.v, params);
    if (controls.diffusion_bound) {
        double h2 = kInf;
        for (int a = 0; a < g.axes(); ++a) {
            h2 = std::min(h2, g.spacing(a) * g.spacing(a));
        }
        b.diffusion = controls.cfl_safety * h2 / (2.0 * g.axes());
    }
    double prod = 0.0;
    for (double u : state.u.values()) {
        prod = std::max(prod, std::pow(std::max(u, 0.0), params.theta));
    }
    if (prod > 0.0) {
        b.production = controls.cfl_safety * (1.0 + lp_norm(state.v, kInf)) / prod;
    }
    b.chosen = std::min({controls.dt_max, b.advective, b.diffusion, b.production});
    return b;
}

double choose_dt(const SimState& state, const ModelParams& params, const StepControls& controls)
{
    const double dt = dt_bounds(state, params, controls).chosen;
    if (!(dt >= controls.dt_min)) {
        throw BlowUpSuspected("time step collapsed to " + std::to_string(dt) + " at t = "
                              + std::to_string(state.t));
    }
    return dt;
}

SimState step(const SimState& state, const ModelParams& params, const StepControls& controls,
              double dt, StepReport* report)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("step: dt must be positive");
    }
    const Grid& g = state.u.grid();
    const std::size_t n = g.size();
    CgOptions cg;
    cg.relative_tolerance = controls.cg_tolerance;

    SimState next{state.u, state.v, state.t + dt, state.step_index + 1};
    StepReport rep;
    rep.dt = dt;

    // v: ((1 + dt) I - dt L) v_new = v + dt u^theta.
    const auto prod = production(state.u, params);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = state.v[i] + dt * prod[i];
    }
    auto res = solve_helmholtz(g, 1.0 + dt, dt, rhs, next.v.values(), cg);
    rep.cg_iterations_v = res.iterations;
    if (!res.converged) {
        throw NumericalFailure("v solve did not converge (residual " + std::to_string(res.relative_residual) + ")");
    }
    if (!next.v.finite()) {
        throw NumericalFailure("non-finite v");
    }
    rep.min_v = next.v.min();
    clamp_negatives(next.v, "v");

    // u: explicit upwind chemotaxis with the fresh gradient, implicit diffusion.
    const auto grad_v = gradient(next.v);
    const auto coeff = flux_coefficients(grad_v, params);
    const auto geom = StencilGeometry::of(g);
    const double rate = kernels::active::max_outflow_rate(geom, coeff.faces(0), coeff.faces(1));
    if (dt * rate > 1.0) {
        throw StepRejected("dt exceeds the positivity limit", 1.0 / rate);
    }
    VectorGridFunction flux(state.u.grid_ptr());
    kernels::active::upwind_flux(geom, state.u.values(), coeff.faces(0), coeff.faces(1), flux.faces(0),
                                 flux.faces(1));
    const auto div = divergence(flux);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = state.u[i] - dt * div[i];
    }
    cg.conserve_mean = true;
    res = solve_helmholtz(g, 1.0, dt, rhs, next.u.values(), cg);
    rep.cg_iterations_u = res.iterations;
    if (!res.converged) {
        throw NumericalFailure("u solve did not converge (residual " + std::to_string(res.relative_residual) + ")");
    }
    if (!next.u.finite()) {
        throw NumericalFailure("non-finite u");
    }
    rep.min_u = next.u.min();
    rep.clamped_mass = clamp_negatives(next.u, "u");

    if (report) {
        *report = rep;
    }
    return next;
}

SimulationResult simulate(const InitialData& initial, const ModelParams& params,
                          const StepControls& controls, const SimulationOptions& options)
{
    params.validate();
    controls.validate();
    initial.validate();
    options.functionals.validate();
    if (options.record_every < 1) {
        throw std::invalid_argument("record_every >= 1 required");
    }

    SimulationResult out;
    SimState state{initial.u0, initial.v0, 0.0, 0};
    out.initial_mass = integrate(state.u);

    auto take_record = [&](double dt) {
        auto rec = record(state, params, options.functionals);
        rec.dt = dt;
        rec.clamped_mass_cumulative = out.clamped_mass_total;
        out.records.push_back(std::move(rec));
        if (options.keep_samples) {
            out.samples.push_back(state);
        }
    };
    take_record(0.0);

    const double t_end = controls.t_end;
    // Remaining time below this counts as arrival (guards against a sliver step).
    const double t_slack = 1e-12 * std::max(1.0, t_end);
    double dt = 0.0;
    try {
        while (t_end - state.t > t_slack) {
            dt = controls.fixed_dt ? controls.dt_max : choose_dt(state, params, controls);
            if (t_end - state.t < dt + t_slack) {
                dt = t_end - state.t;
            }
            StepReport rep;
            SimState next;
            for (;;) {
                try {
                    next = step(state, params, controls, dt, &rep);
                    break;
                } catch (const StepRejected& e) {
                    if (controls.fixed_dt) {
                        throw NumericalFailure("fixed dt violates the positivity limit at t = "
                                               + std::to_string(state.t));
                    }
                    ++out.rejected_steps;
                    dt = std::min(0.5 * dt, controls.cfl_safety * e.limit);
                    if (dt < controls.dt_min) {
                        throw BlowUpSuspected("time step collapsed to " + std::to_string(dt)
                                              + " at t = " + std::to_string(state.t));
                    }
                }
            }
            if (t_end - next.t <= t_slack) {
                next.t = t_end;
            }
            state = std::move(next);
            ++out.steps;
            out.clamped_mass_total += rep.clamped_mass;
            if (out.clamped_mass_total > 1e-10 * out.initial_mass) {
                throw NumericalFailure("clamped mass exceeds 1e-10 of the total");
            }
            const double mass = integrate(state.u);
            out.max_mass_drift = std::max(out.max_mass_drift,
                                          std::abs(mass - out.initial_mass) / out.initial_mass);

            const bool done = t_end - state.t <= t_slack;
            const double linf = state.u.max();
            if (done || state.step_index % options.record_every == 0 || linf > controls.blowup_linf_threshold) {
                take_record(dt);
            }
            if (linf > controls.blowup_linf_threshold) {
                throw BlowUpSuspected("max u exceeded the blow-up threshold at t = " + std::to_string(state.t));
            }
        }
        out.status = TerminalStatus::Completed;
    } catch (const BlowUpSuspected& e) {
        out.status = TerminalStatus::BlowUpSuspected;
        out.message = e.what();
    } catch (const std::exception& e) {
        out.status = TerminalStatus::NumericalFailure;
        out.message = e.what();
    }
    if (out.status != TerminalStatus::Completed && out.records.back().t != state.t) {
        take_record(dt);
    }
    out.final_state = state;
    return out;
}

} // namespace ksflux
