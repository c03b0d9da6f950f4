#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace ksflux {

struct RegimeSpec {
    int n = 1;
    double theta = 2.0;
    double p = 1.5;

    void validate() const;
};

/// n theta / (n theta - 1). Throws std::invalid_argument when n theta <= 1.
double critical_exponent(int n, double theta);

struct SRule {
    bool infinite = false;
    /// Strict lower bound max(n, (n+2)(p-1)); s >= 2 is required as well.
    double lower_bound = 0.0;
    /// max(n, (n+2)(p-1), 2) + 1; infinity for the infinite branch.
    double default_value = 0.0;
};

SRule s_rule(int n, double p, double theta);

struct OpenInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;
    /// True if the point 1 is removed from the interval.
    bool excludes_one = false;

    bool contains(double x) const { return !empty && x > lo && x < hi && !(excludes_one && x == 1.0); }
};

struct QRanges {
    /// (max{0, 1 - 2/n}, 2(2-p)/(n(p-1))) \ {1}; empty unless p < min{2, 1 + 2/n}.
    OpenInterval f1_interval;
    /// q > max{0, 2 theta - 4/n, 2 theta - 1 - 2/n}.
    double f1_lower_bound = 0.0;
    /// q > 2 theta - 2/n.
    double f2_lower_bound = 0.0;
};

QRanges q_ranges(const RegimeSpec& spec);

struct AuxiliaryExponents {
    double a_star = 0.0;
    double b_star = 0.0;
    /// 2 a* b* (p - 1).
    double condition_2ab = 0.0;
};

/// a* = r(nq + 2 - n) / (2(r - n(p-1))), b* = (1/2 + 1/n - 1/r) / (2/n).
/// Throws std::invalid_argument if r <= n(p-1).
AuxiliaryExponents auxiliary_exponents(int n, double p, double q, double r);

/// (theta - 1/r)(p - 1) + (1 - 1/q).
double condition_1d(double theta, double p, double q, double r);

enum class AuditBranch {
    /// Entropy functionals F1 then F2 (all n; for n = 1 below min{2, (2 theta+1)/(2 theta-1)}).
    Entropy,
    /// n = 1 with p >= min{2, (2 theta+1)/(2 theta-1)}: semigroup route.
    OneDimensional,
};

std::string to_string(AuditBranch branch);

struct ExponentAudit {
    RegimeSpec spec;
    double p_critical = 0.0;
    bool subcritical = false;
    /// p equals p_critical to rounding; reported as supercritical.
    bool at_critical_boundary = false;
    /// theta > 1, the standing hypothesis of the boundedness estimates.
    bool theta_admissible = false;
    AuditBranch branch = AuditBranch::Entropy;
    SRule s;
    QRanges q;

    /// Witness q for F1 (in f1_interval, above f1_lower_bound) and the auxiliary r
    /// of the v-energy estimate that goes with it.
    std::optional<double> q_entropy1;
    std::optional<double> r_entropy1;

    /// Witness (q, r) for F2, or the pair of the one-dimensional condition.
    std::optional<double> chosen_q;
    std::optional<double> chosen_r;
    std::optional<double> a_star;
    std::optional<double> b_star;
    std::optional<double> condition_2ab;
    std::optional<double> condition_1d;

    bool feasible = false;
    std::string notes;
};

/// Searches witnesses for every side condition of the boundedness proofs.
/// Deterministic; infeasible is a valid verdict.
ExponentAudit audit(const RegimeSpec& spec);

nlohmann::ordered_json to_json(const ExponentAudit& audit);

} // namespace ksflux
