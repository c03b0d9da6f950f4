#include "ksflux/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ksflux {

Verdict check_mass(const std::vector<FunctionalRecord>& series, double tol)
{
    if (series.empty()) {
        throw std::invalid_argument("check_mass: empty series");
    }
    Verdict v;
    v.name = "mass";
    v.tolerance = tol;
    const double m0 = series.front().mass;
    for (const auto& r : series) {
        const double dev = std::abs(r.mass - m0) / std::abs(m0);
        if (dev > v.worst_violation) {
            v.worst_violation = dev;
            v.location = r.t;
        }
    }
    v.pass = v.worst_violation <= tol;
    v.details = "max relative mass deviation from the first record";
    return v;
}

Verdict check_positivity(const std::vector<SimState>& samples)
{
    Verdict v;
    v.name = "positivity";
    v.tolerance = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        const double m = std::min(s.u.min(), s.v.min());
        if (m < worst) {
            worst = m;
            v.location = s.t;
        }
    }
    v.worst_violation = samples.empty() ? 0.0 : std::max(0.0, -worst);
    v.pass = !samples.empty() && worst >= 0.0;
    v.details = samples.empty() ? "no samples" : "min over sampled cells of u and v";
    return v;
}

std::string to_string(EntropyFunctional f)
{
    return f == EntropyFunctional::F1 ? "F1" : "F2";
}

DissipationFit check_dissipation_inequality(const std::vector<FunctionalRecord>& series,
                                            EntropyFunctional which, const DissipationOptions& options)
{
    if (series.size() < 10) {
        throw std::invalid_argument("check_dissipation_inequality: at least 10 records required");
    }
    const std::size_t n = series.size();
    std::vector<double> F(n), t(n);
    for (std::size_t k = 0; k < n; ++k) {
        F[k] = which == EntropyFunctional::F1 ? series[k].F1 : series[k].F2;
        t[k] = series[k].t;
    }
    std::vector<double> dF;
    std::vector<double> Fi;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double span = t[k + 1] - t[k - 1];
        if (!(span > 0.0)) {
            throw std::invalid_argument("check_dissipation_inequality: record times must increase");
        }
        dF.push_back((F[k + 1] - F[k - 1]) / span);
        Fi.push_back(F[k]);
    }
    const double f_max = *std::max_element(F.begin(), F.end());
    const std::size_t m = dF.size();
    // Index of the order statistic that at least (1 - violation_fraction) of values do not exceed.
    const auto keep = static_cast<std::size_t>(
        std::ceil((1.0 - options.violation_fraction) * static_cast<double>(m) - 1e-9));
    const std::size_t idx = std::clamp<std::size_t>(keep, 1, m) - 1;

    DissipationFit best;
    bool have_pass = false;
    double best_excess = std::numeric_limits<double>::infinity();
    for (int s = 0; s < options.scan_points; ++s) {
        const double expo = options.scan_points > 1
                                ? -0.5 * options.decade_span + options.decade_span * s / (options.scan_points - 1)
                                : 0.0;
        const double c = std::pow(10.0, expo);
        std::vector<double> g(m);
        for (std::size_t k = 0; k < m; ++k) {
            g[k] = dF[k] + c * Fi[k];
        }
        std::vector<double> sorted = g;
        std::sort(sorted.begin(), sorted.end());
        const double C = std::max(0.0, sorted[idx]);
        const double bound = std::max(F.front(), C / c);
        const double excess = f_max - (bound + options.bound_slack * std::abs(bound));
        const bool pass = excess <= 0.0;
        std::size_t ok = 0;
        for (double x : g) ok += x <= C ? 1 : 0;

        const bool better = pass ? (!have_pass || bound < best.bound) : (!have_pass && excess < best_excess);
        if (better) {
            best.c = c;
            best.C = C;
            best.bound = bound;
            best.satisfied_fraction = static_cast<double>(ok) / static_cast<double>(m);
            best_excess = excess;
            have_pass = have_pass || pass;
        }
    }
    Verdict& v = best.verdict;
    v.name = "dissipation_" + to_string(which);
    v.pass = have_pass;
    v.tolerance = options.bound_slack;
    v.worst_violation = std::max(0.0, (f_max - best.bound) / std::max(std::abs(best.bound), 1e-300));
    const auto at = std::max_element(F.begin(), F.end()) - F.begin();
    v.location = t[at];
    v.details = "dF/dt + c F <= C on " + std::to_string(best.satisfied_fraction * 100.0)
                + "% of interior records";
    return best;
}

std::string to_string(Classification c)
{
    switch (c) {
    case Classification::Bounded: return "Bounded";
    case Classification::Growing: return "Growing";
    case Classification::BlowUpSuspected: return "BlowUpSuspected";
    case Classification::Inconclusive: return "Inconclusive";
    }
    return "unknown";
}

RegimeVerdict classify(TerminalStatus status, const std::vector<FunctionalRecord>& series,
                       const ClassifyOptions& options)
{
    RegimeVerdict v;
    v.terminal_status = status;
    for (const auto& r : series) {
        v.sup_u_linf = std::max(v.sup_u_linf, r.u_linf);
    }
    if (status == TerminalStatus::BlowUpSuspected) {
        v.classification = Classification::BlowUpSuspected;
        return v;
    }
    if (status != TerminalStatus::Completed || series.size() < 3) {
        return v;
    }
    const double t0 = series.front().t;
    const double t1 = series.back().t;
    const double mid = t0 + 0.5 * (t1 - t0);
    std::vector<double> ts, ys;
    for (const auto& r : series) {
        if (r.t >= mid) {
            ts.push_back(r.t);
            ys.push_back(r.u_linf);
        }
    }
    if (ts.size() < 3) {
        return v;
    }
    double tm = 0.0, ym = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        tm += ts[k];
        ym += ys[k];
    }
    tm /= static_cast<double>(ts.size());
    ym /= static_cast<double>(ts.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        sxy += (ts[k] - tm) * (ys[k] - ym);
        sxx += (ts[k] - tm) * (ts[k] - tm);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    std::vector<double> sorted = ys;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    v.growth_rate_estimate = median > 0.0 ? slope / median : slope;

    if (v.growth_rate_estimate <= options.trend_tolerance && v.sup_u_linf <= options.sup_over_median * median) {
        v.classification = Classification::Bounded;
    } else if (v.growth_rate_estimate > options.trend_tolerance
               && series.back().u_linf >= 2.0 * series.front().u_linf) {
        v.classification = Classification::Growing;
    }
    return v;
}

bool distances_nonincreasing(const std::vector<double>& d, double slack)
{
    for (std::size_t k = 1; k < d.size(); ++k) {
        if (d[k] > d[k - 1] * (1.0 + slack)) {
            return false;
        }
    }
    return true;
}

EpsRefinement eps_refinement(const InitialData& initial, const ModelParams& params,
                             const StepControls& controls, const std::vector<double>& eps_list,
                             double slack)
{
    if (eps_list.size() < 3) {
        throw std::invalid_argument("eps_refinement: at least 3 eps values required");
    }
    for (std::size_t k = 1; k < eps_list.size(); ++k) {
        if (!(eps_list[k] < eps_list[k - 1])) {
            throw std::invalid_argument("eps_refinement: eps list must be strictly decreasing");
        }
    }
    EpsRefinement out;
    out.eps = eps_list;
    out.slack = slack;
    out.comparison_time = controls.t_end;

    SimulationOptions opts;
    opts.keep_samples = false;
    opts.record_every = 1 << 30;
    std::vector<GridFunction> finals;
    for (double eps : eps_list) {
        ModelParams p = params;
        p.eps = eps;
        const auto run = simulate(initial, p, controls, opts);
        if (run.status != TerminalStatus::Completed) {
            throw std::runtime_error("eps_refinement: run at eps = " + std::to_string(eps) + " ended with "
                                     + to_string(run.status) + ": " + run.message);
        }
        finals.push_back(run.final_state.u);
    }
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
        GridFunction diff(finals[k].grid_ptr());
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = finals[k][i] - finals[k + 1][i];
        }
        out.distances.push_back(lp_norm(diff, 2.0));
    }
    Verdict& v = out.verdict;
    v.name = "eps_refinement";
    v.tolerance = slack;
    v.pass = distances_nonincreasing(out.distances, slack);
    v.location = out.comparison_time;
    for (std::size_t k = 1; k < out.distances.size(); ++k) {
        if (out.distances[k - 1] > 0.0) {
            v.worst_violation = std::max(v.worst_violation, out.distances[k] / out.distances[k - 1] - 1.0);
        }
    }
    v.details = "consecutive L2 distances of u at the comparison time; slack is a convention";
    return out;
}

nlohmann::ordered_json to_json(const Verdict& v)
{
    return {{"name", v.name},           {"pass", v.pass},         {"worst_violation", v.worst_violation},
            {"tolerance", v.tolerance}, {"location", v.location}, {"details", v.details}};
}

nlohmann::ordered_json to_json(const DissipationFit& f)
{
    auto j = to_json(f.verdict);
    j["c"] = f.c;
    j["C"] = f.C;
    j["bound"] = f.bound;
    j["satisfied_fraction"] = f.satisfied_fraction;
    return j;
}

nlohmann::ordered_json to_json(const RegimeVerdict& v)
{
    return {{"classification", to_string(v.classification)},
            {"sup_u_linf", v.sup_u_linf},
            {"growth_rate_estimate", v.growth_rate_estimate},
            {"terminal_status", to_string(v.terminal_status)}};
}

nlohmann::ordered_json to_json(const EpsRefinement& e)
{
    return {{"eps", e.eps},
            {"distances", e.distances},
            {"comparison_time", e.comparison_time},
            {"slack", e.slack},
            {"verdict", to_json(e.verdict)}};
}

} // namespace ksflux
