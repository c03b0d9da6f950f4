#include "ksflux/regime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ksflux {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nd(int n) { return static_cast<double>(n); }

// min{2, (2 theta + 1)/(2 theta - 1)}; the fraction is only meaningful for theta > 1/2.
double one_d_threshold(double theta)
{
    return theta > 0.5 ? std::min(2.0, (2.0 * theta + 1.0) / (2.0 * theta - 1.0)) : 2.0;
}

} // namespace

void RegimeSpec::validate() const
{
    if (n < 1) throw std::invalid_argument("n >= 1 required");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta > 0 required");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p > 1 required");
}

double critical_exponent(int n, double theta)
{
    const double nt = nd(n) * theta;
    if (!(nt > 1.0)) {
        throw std::invalid_argument("critical_exponent: n * theta must exceed 1");
    }
    return nt / (nt - 1.0);
}

SRule s_rule(int n, double p, double theta)
{
    if (!(p > 1.0)) {
        throw std::invalid_argument("s_rule: p > 1 required");
    }
    SRule rule;
    if (n == 1 && p >= one_d_threshold(theta)) {
        rule.infinite = true;
        rule.lower_bound = kInf;
        rule.default_value = kInf;
        return rule;
    }
    rule.lower_bound = std::max(nd(n), (nd(n) + 2.0) * (p - 1.0));
    rule.default_value = std::max(rule.lower_bound, 2.0) + 1.0;
    return rule;
}

QRanges q_ranges(const RegimeSpec& spec)
{
    const double n = nd(spec.n);
    const double p = spec.p;
    const double theta = spec.theta;
    QRanges out;
    if (p < std::min(2.0, 1.0 + 2.0 / n)) {
        out.f1_interval.lo = std::max(0.0, 1.0 - 2.0 / n);
        out.f1_interval.hi = 2.0 * (2.0 - p) / (n * (p - 1.0));
        out.f1_interval.empty = !(out.f1_interval.hi > out.f1_interval.lo);
        out.f1_interval.excludes_one = true;
    }
    out.f1_lower_bound = std::max({0.0, 2.0 * theta - 4.0 / n, 2.0 * theta - 1.0 - 2.0 / n});
    out.f2_lower_bound = 2.0 * theta - 2.0 / n;
    return out;
}

AuxiliaryExponents auxiliary_exponents(int n, double p, double q, double r)
{
    const double nn = nd(n);
    const double gap = r - nn * (p - 1.0);
    if (!(gap > 0.0)) {
        throw std::invalid_argument("auxiliary_exponents: r > n(p-1) required");
    }
    AuxiliaryExponents out;
    out.a_star = r * (nn * q + 2.0 - nn) / (2.0 * gap);
    // (1/2 + 1/n - 1/r) / (2/n), arranged to be exactly 1/2 at r = 2.
    out.b_star = 0.5 + nn * (r - 2.0) / (4.0 * r);
    out.condition_2ab = 2.0 * out.a_star * out.b_star * (p - 1.0);
    return out;
}

double condition_1d(double theta, double p, double q, double r)
{
    return (theta - 1.0 / r) * (p - 1.0) + (1.0 - 1.0 / q);
}

std::string to_string(AuditBranch branch)
{
    return branch == AuditBranch::Entropy ? "entropy" : "one-dimensional";
}

namespace {

struct Witness {
    double q = 0.0;
    double r = 0.0;
};

// q for F1: inside f1_interval and above f1_lower_bound, away from 1.
std::optional<Witness> entropy1_witness(const RegimeSpec& spec, const QRanges& ranges)
{
    if (ranges.f1_interval.empty) {
        return std::nullopt;
    }
    const double lo = std::max(ranges.f1_interval.lo, ranges.f1_lower_bound);
    const double hi = ranges.f1_interval.hi;
    if (!(hi > lo)) {
        return std::nullopt;
    }
    double q;
    if (lo < 1.0 && 1.0 < hi) {
        q = (1.0 - lo >= hi - 1.0) ? 0.5 * (lo + 1.0) : 0.5 * (1.0 + hi);
    } else {
        q = 0.5 * (lo + hi);
    }

    // Auxiliary r > max{1, 2n/(n+2)} with q > 2 theta + 1 - 2/n - 2/r and
    // q > (1 - 2/n) theta r.
    const double n = nd(spec.n);
    const double r_lo = std::max(1.0, 2.0 * n / (n + 2.0));
    double r_hi = kInf;
    const double young = 2.0 * spec.theta + 1.0 - 2.0 / n - q;
    if (young > 0.0) {
        r_hi = std::min(r_hi, 2.0 / young);
    }
    if (spec.n > 2) {
        r_hi = std::min(r_hi, q / ((1.0 - 2.0 / n) * spec.theta));
    }
    if (!(r_hi > r_lo)) {
        return std::nullopt;
    }
    const double r = std::isinf(r_hi) ? r_lo + 1.0 : 0.5 * (r_lo + r_hi);
    return Witness{q, r};
}

struct F2Bounds {
    double q_lo = 0.0;
    double q_hi = 0.0;
    double r_lo = 0.0;
    bool r_lo_strict = false;
    double r_hi = kInf;
};

std::optional<F2Bounds> entropy2_bounds(const RegimeSpec& spec, const QRanges& ranges)
{
    const double n = nd(spec.n);
    const double p = spec.p;
    F2Bounds b;
    b.q_lo = std::max(1.0, ranges.f2_lower_bound);
    if (spec.n <= 2) {
        if (!(p < (n + 6.0) / (n + 2.0))) return std::nullopt;
        b.q_hi = (n * n * p - n * n - 4.0 * p + 12.0) / (n * n * p - n * n + 2.0 * n * p - 2.0 * n);
    } else {
        if (!(p < (n + 2.0) / n)) return std::nullopt;
        b.q_hi = 2.0 / (n * (p - 1.0));
        b.r_hi = 2.0 * n / (n - 2.0);
    }
    const double strict = std::max(2.0, n) * (p - 1.0);
    if (strict >= 2.0) {
        b.r_lo = strict;
        b.r_lo_strict = true;
    } else {
        b.r_lo = 2.0;
    }
    if (!(b.q_hi > b.q_lo) || !(b.r_hi > b.r_lo)) {
        return std::nullopt;
    }
    return b;
}

// Supremum of q keeping 2 a* b* (p-1) < 2 at this r; the condition is affine in q.
double q_sup_for_r(int n, double p, double r)
{
    const double nn = nd(n);
    const double b = 0.5 + nn * (r - 2.0) / (4.0 * r);
    const double gap = r - nn * (p - 1.0);
    return (2.0 * gap / (r * b * (p - 1.0)) - 2.0 + nn) / nn;
}

std::optional<Witness> entropy2_witness(const RegimeSpec& spec, const F2Bounds& b)
{
    auto width = [&](double r) {
        return std::min(b.q_hi, q_sup_for_r(spec.n, spec.p, r)) - b.q_lo;
    };
    auto admissible_r = [&](double r) {
        return (b.r_lo_strict ? r > b.r_lo : r >= b.r_lo) && r < b.r_hi;
    };

    // Coarse lattice in r: geometric towards infinity, or towards the open
    // upper end 2n/(n-2) when it is finite.
    std::vector<double> lattice;
    if (!b.r_lo_strict) {
        lattice.push_back(b.r_lo);
    }
    if (std::isinf(b.r_hi)) {
        for (int k = 1; k <= 72; ++k) {
            lattice.push_back(b.r_lo * std::pow(10.0, k / 8.0));
        }
    } else {
        for (int k = 1; k <= 120; ++k) {
            lattice.push_back(b.r_lo + (b.r_hi - b.r_lo) * (1.0 - std::pow(2.0, -k / 4.0)));
        }
    }
    std::erase_if(lattice, [&](double r) { return !admissible_r(r); });
    if (lattice.empty()) {
        return std::nullopt;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < lattice.size(); ++k) {
        if (width(lattice[k]) > width(lattice[best])) {
            best = k;
        }
    }

    // Golden-section refinement between the lattice neighbours of the best node.
    double lo = lattice[best > 0 ? best - 1 : best];
    double hi = lattice[best + 1 < lattice.size() ? best + 1 : best];
    double r = lattice[best];
    if (hi > lo) {
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = lo, d = hi;
        for (int it = 0; it < 100; ++it) {
            const double x1 = d - phi * (d - a);
            const double x2 = a + phi * (d - a);
            if (width(x1) < width(x2)) a = x1; else d = x2;
        }
        const double cand = 0.5 * (a + d);
        if (admissible_r(cand) && width(cand) > width(r)) {
            r = cand;
        }
    }
    const double w = width(r);
    if (!(w > 0.0)) {
        return std::nullopt;
    }
    return Witness{b.q_lo + 0.5 * w, r};
}

} // namespace

ExponentAudit audit(const RegimeSpec& spec)
{
    spec.validate();
    ExponentAudit out;
    out.spec = spec;
    const double n = nd(spec.n);
    const double p = spec.p;
    const double theta = spec.theta;

    out.theta_admissible = theta > 1.0;
    if (n * theta > 1.0) {
        out.p_critical = critical_exponent(spec.n, theta);
        out.at_critical_boundary = std::abs(p - out.p_critical) <= 1e-12 * out.p_critical;
        out.subcritical = p < out.p_critical && !out.at_critical_boundary;
    } else {
        out.p_critical = kInf;
        out.subcritical = true;
    }
    out.s = s_rule(spec.n, p, theta);
    out.q = q_ranges(spec);

    if (spec.n == 1 && p >= one_d_threshold(theta)) {
        out.branch = AuditBranch::OneDimensional;
    }

    if (!out.theta_admissible) {
        out.notes = "theta <= 1 lies outside the hypotheses of the boundedness estimates";
    }
    if (out.at_critical_boundary) {
        out.notes = "p equals the critical exponent; treated as supercritical (open case)";
    }

    if (out.branch == AuditBranch::OneDimensional) {
        const double delta = 1.0 - (theta - 1.0) * (p - 1.0);
        double q = 2.0;
        double r = 2.0;
        if (delta > 0.0) {
            // x(p-1) + y < delta with x = 1 - 1/r, y = 1 - 1/q in (0, 1).
            const double x = std::min(0.5, delta / (3.0 * (p - 1.0)));
            const double y = std::min(0.5, delta / 3.0);
            r = 1.0 / (1.0 - x);
            q = 1.0 / (1.0 - y);
        }
        out.chosen_q = q;
        out.chosen_r = r;
        out.condition_1d = condition_1d(theta, p, q, r);
        out.feasible = out.theta_admissible && out.subcritical && delta > 0.0 && p < theta / (theta - 1.0)
                       && *out.condition_1d < 1.0 && q > 1.0 && r > 1.0;
        if (out.notes.empty()) {
            out.notes = "a* and b* do not enter the one-dimensional route";
        }
        return out;
    }

    const auto w1 = entropy1_witness(spec, out.q);
    if (w1) {
        out.q_entropy1 = w1->q;
        out.r_entropy1 = w1->r;
    }
    std::optional<Witness> w2;
    if (const auto bounds = entropy2_bounds(spec, out.q)) {
        w2 = entropy2_witness(spec, *bounds);
    }
    if (w2) {
        const auto aux = auxiliary_exponents(spec.n, p, w2->q, w2->r);
        out.chosen_q = w2->q;
        out.chosen_r = w2->r;
        out.a_star = aux.a_star;
        out.b_star = aux.b_star;
        out.condition_2ab = aux.condition_2ab;
    }
    if (spec.n == 1 && w2) {
        out.condition_1d = condition_1d(theta, p, w2->q, w2->r);
    }
    const bool f2_ok = w2 && *out.a_star > 1.0 && *out.b_star >= 0.5 && *out.b_star < 1.0
                       && *out.condition_2ab < 2.0;
    out.feasible = out.theta_admissible && out.subcritical && w1.has_value() && f2_ok;
    if (!out.feasible && out.notes.empty()) {
        out.notes = !w1 ? "no q satisfies the F1 constraints" : "no (q, r) satisfies the F2 constraints";
    }
    return out;
}

namespace {

nlohmann::ordered_json number_or_null(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

nlohmann::ordered_json optional_number(const std::optional<double>& v)
{
    return v ? number_or_null(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace

nlohmann::ordered_json to_json(const ExponentAudit& a)
{
    nlohmann::ordered_json j;
    j["n"] = a.spec.n;
    j["theta"] = a.spec.theta;
    j["p"] = a.spec.p;
    j["p_critical"] = number_or_null(a.p_critical);
    j["subcritical"] = a.subcritical;
    j["at_critical_boundary"] = a.at_critical_boundary;
    j["theta_admissible"] = a.theta_admissible;
    j["branch"] = to_string(a.branch);
    j["s_rule"] = {
        {"kind", a.s.infinite ? "infinite" : "finite"},
        {"lower_bound", number_or_null(a.s.lower_bound)},
        {"default", number_or_null(a.s.default_value)},
    };
    j["q_range_lemma31"] = {
        {"lo", a.q.f1_interval.lo},
        {"hi", a.q.f1_interval.hi},
        {"empty", a.q.f1_interval.empty},
        {"excludes_one", a.q.f1_interval.excludes_one},
    };
    j["q_range_lemma32"] = a.q.f1_lower_bound;
    j["q_range_lemma36"] = a.q.f2_lower_bound;
    j["q_entropy1"] = optional_number(a.q_entropy1);
    j["r_entropy1"] = optional_number(a.r_entropy1);
    j["chosen_q"] = optional_number(a.chosen_q);
    j["chosen_r"] = optional_number(a.chosen_r);
    j["a_star"] = optional_number(a.a_star);
    j["b_star"] = optional_number(a.b_star);
    j["condition_2ab"] = optional_number(a.condition_2ab);
    j["condition_1d"] = optional_number(a.condition_1d);
    j["feasible"] = a.feasible;
    j["notes"] = a.notes;
    return j;
}

} // namespace ksflux
