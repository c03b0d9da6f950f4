#pragma once

#include "ksflux/functionals.hpp"
#include "ksflux/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ksflux {

struct StepControls {
    double dt_max = 1e-3;
    double dt_min = 1e-9;
    double cfl_safety = 0.4;
    double blowup_linf_threshold = 1e6;
    double t_end = 20.0;
    /// Also cap dt by cfl_safety * h^2 / (2 axes). Diffusion is implicit, so
    /// this is off by default.
    bool diffusion_bound = false;
    /// Take dt = dt_max on every step (last step shortened to hit t_end),
    /// ignoring the adaptive bounds. Used by convergence studies.
    bool fixed_dt = false;
    double cg_tolerance = 1e-10;

    void validate() const;
};

enum class TerminalStatus { Completed, BlowUpSuspected, NumericalFailure };

std::string to_string(TerminalStatus status);

/// Time-step collapse or threshold crossing.
class BlowUpSuspected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver non-convergence, NaN, or positivity loss beyond roundoff.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The individual limits combined by choose_dt. Unused limits are +inf.
struct DtBounds {
    double advective;
    double diffusion;
    double production;
    double chosen;
};

/// Advective (positivity) bound cfl / max_i (sum_out A_f |c_f| / w_i), the
/// optional diffusion bound, and the production bound cfl (1 + |v|_inf) / |u^theta|_inf.
DtBounds dt_bounds(const SimState& state, const ModelParams& params, const StepControls& controls);

/// min(dt_max, bounds). Throws BlowUpSuspected if the result is below dt_min.
double choose_dt(const SimState& state, const ModelParams& params, const StepControls& controls);

struct StepReport {
    double dt = 0.0;
    int cg_iterations_v = 0;
    int cg_iterations_u = 0;
    /// Mass added by clamping roundoff negatives of u to zero.
    double clamped_mass = 0.0;
    /// Smallest u and v before clamping.
    double min_u = 0.0;
    double min_v = 0.0;
};

/// One IMEX step: v from ((1 + dt) I - dt L) v = v + dt u^theta, then u from
/// (I - dt L) u = u - dt div(F(u, grad v_new)). Throws NumericalFailure.
SimState step(const SimState& state, const ModelParams& params, const StepControls& controls,
              double dt, StepReport* report = nullptr);

/// Largest dt keeping the explicit upwind update positive for the
/// coefficients induced by v (the advective bound with cfl_safety = 1).
double positivity_limit(const GridFunction& v, const ModelParams& params);

struct SimulationOptions {
    /// Record functionals every this many steps (plus t = 0 and the end).
    int record_every = 20;
    /// Keep a copy of the state at every record.
    bool keep_samples = true;
    FunctionalSpec functionals;
};

struct SimulationResult {
    TerminalStatus status = TerminalStatus::Completed;
    std::string message;
    /// Last valid state.
    SimState final_state;
    std::vector<SimState> samples;
    std::vector<FunctionalRecord> records;
    double clamped_mass_total = 0.0;
    double initial_mass = 0.0;
    double max_mass_drift = 0.0;
    long steps = 0;
    long rejected_steps = 0;
};

/// Runs from the initial data to controls.t_end or a terminal condition.
SimulationResult simulate(const InitialData& initial, const ModelParams& params,
                          const StepControls& controls, const SimulationOptions& options = {});

} // namespace ksflux
