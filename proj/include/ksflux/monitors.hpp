#pragma once

#include "ksflux/functionals.hpp"
#include "ksflux/stepper.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ksflux {

struct Verdict {
    std::string name;
    bool pass = false;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    /// Time of the worst case.
    double location = 0.0;
    std::string details;
};

/// Relative deviation of mass from the first record. Throws on an empty series.
Verdict check_mass(const std::vector<FunctionalRecord>& series, double tol);

/// min u and min v over every sampled state must be >= 0.
Verdict check_positivity(const std::vector<SimState>& samples);

enum class EntropyFunctional { F1, F2 };

std::string to_string(EntropyFunctional f);

struct DissipationFit {
    Verdict verdict;
    double c = 0.0;
    double C = 0.0;
    /// max(F(0), C / c): the bound the functional must respect.
    double bound = 0.0;
    double satisfied_fraction = 0.0;
};

struct DissipationOptions {
    /// Fraction of interior records allowed to violate dF/dt + cF <= C.
    double violation_fraction = 0.01;
    /// Slack on sup F <= bound.
    double bound_slack = 0.05;
    /// c ranges over 10^[-span/2, span/2], `scan_points` values.
    double decade_span = 1.0;
    int scan_points = 9;
};

/// Fits dF/dt + cF <= C over the records (central differences). Throws
/// std::invalid_argument if fewer than 10 records are given.
DissipationFit check_dissipation_inequality(const std::vector<FunctionalRecord>& series,
                                            EntropyFunctional which,
                                            const DissipationOptions& options = {});

enum class Classification { Bounded, Growing, BlowUpSuspected, Inconclusive };

std::string to_string(Classification c);

struct RegimeVerdict {
    Classification classification = Classification::Inconclusive;
    double sup_u_linf = 0.0;
    /// Slope of max u against t over the last half, divided by its median.
    double growth_rate_estimate = 0.0;
    TerminalStatus terminal_status = TerminalStatus::Completed;
};

struct ClassifyOptions {
    /// Relative slope (per unit time, over the median) still counted as flat.
    double trend_tolerance = 1e-2;
    double sup_over_median = 10.0;
};

RegimeVerdict classify(TerminalStatus status, const std::vector<FunctionalRecord>& series,
                       const ClassifyOptions& options = {});

struct EpsRefinement {
    std::vector<double> eps;
    /// ||u_{eps_i} - u_{eps_{i+1}}||_{L^2} at the comparison time.
    std::vector<double> distances;
    double comparison_time = 0.0;
    double slack = 0.1;
    Verdict verdict;
};

/// Runs simulate once per eps (same grid, data and controls), then compares
/// consecutive final states. Throws std::invalid_argument for fewer than 3
/// or non-decreasing eps, std::runtime_error if a run does not complete.
EpsRefinement eps_refinement(const InitialData& initial, const ModelParams& params,
                             const StepControls& controls, const std::vector<double>& eps_list,
                             double slack = 0.1);

/// Distance test alone: nonincreasing within relative slack.
bool distances_nonincreasing(const std::vector<double>& d, double slack);

nlohmann::ordered_json to_json(const Verdict& v);
nlohmann::ordered_json to_json(const DissipationFit& f);
nlohmann::ordered_json to_json(const RegimeVerdict& v);
nlohmann::ordered_json to_json(const EpsRefinement& e);

} // namespace ksflux
