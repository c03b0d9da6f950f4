#include "ksflux/gn_verifier.hpp"

#include "ksflux/regime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ksflux {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

// Rounding slack for the admissibility windows of a and b.
constexpr double kWindowSlack = 1e-12;

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double gn_exponent(double p, double q, double r, int n)
{
    if (!(p > 0.0) || !(q > 0.0) || !(r > 0.0) || n < 1) {
        throw std::invalid_argument("gn_exponent: exponents must be positive and n >= 1");
    }
    const double den = inv(q) + 1.0 / n - inv(r);
    if (den == 0.0) {
        throw std::invalid_argument("gn_exponent: zero denominator");
    }
    const double a = (inv(q) - inv(p)) / den;
    if (!(a >= -kWindowSlack && a <= 1.0 + kWindowSlack)) {
        throw std::invalid_argument("gn_exponent: a = " + std::to_string(a) + " lies outside [0, 1]");
    }
    return std::clamp(a, 0.0, 1.0);
}

double gn2_exponent(double p, double q, int n)
{
    if (!(p > 0.0) || !(q > 0.0) || n < 1) {
        throw std::invalid_argument("gn2_exponent: exponents must be positive and n >= 1");
    }
    const double den = inv(q) + 2.0 / n - 0.5;
    if (den == 0.0) {
        throw std::invalid_argument("gn2_exponent: zero denominator");
    }
    const double b = (inv(q) + 1.0 / n - inv(p)) / den;
    if (!(b >= 0.5 - kWindowSlack && b <= 1.0 + kWindowSlack)) {
        throw std::invalid_argument("gn2_exponent: b = " + std::to_string(b) + " lies outside [1/2, 1]");
    }
    return std::clamp(b, 0.5, 1.0);
}

GNExponents GNExponents::make(double p, double q, double r, double s, int n, std::string label)
{
    if (!(r >= 1.0)) throw std::invalid_argument("GN exponents: r >= 1 required");
    if (!(s > 0.0)) throw std::invalid_argument("GN exponents: s > 0 required");
    GNExponents e{p, q, r, s, n, gn_exponent(p, q, r, n), std::move(label)};
    return e;
}

GN2Exponents GN2Exponents::make(double p, double q, double r, double s, int n, std::string label)
{
    if (!(p >= 1.0)) throw std::invalid_argument("GN2 exponents: p >= 1 required");
    if (!(q >= 1.0)) throw std::invalid_argument("GN2 exponents: q >= 1 required");
    if (!(r >= 2.0 && r <= q)) throw std::invalid_argument("GN2 exponents: r in [2, q] required");
    if (!(s > 0.0)) throw std::invalid_argument("GN2 exponents: s > 0 required");
    GN2Exponents e{p, q, r, s, n, gn2_exponent(p, q, n), std::move(label)};
    return e;
}

double lebesgue_norm(const GridFunction& f, double p)
{
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p > 0.0)) {
        throw std::invalid_argument("lebesgue_norm: p > 0 required");
    }
    const auto w = f.grid().cell_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s += std::pow(std::abs(f[i]), p) * w[i];
    }
    return std::pow(s, 1.0 / p);
}

double gradient_norm(const GridFunction& f, double r)
{
    if (std::isinf(r)) {
        return gradient_max(f);
    }
    const auto sq = cell_gradient_squared(f);
    GridFunction mag(f.grid_ptr());
    for (std::size_t i = 0; i < mag.size(); ++i) {
        mag[i] = std::sqrt(sq[i]);
    }
    return lebesgue_norm(mag, r);
}

double gn_ratio(const GridFunction& f, const GNExponents& e)
{
    const double lhs = lebesgue_norm(f, e.p);
    const double grad = gradient_norm(f, e.r);
    const double rhs = (e.a > 0.0 ? std::pow(grad, e.a) : 1.0) * std::pow(lebesgue_norm(f, e.q), 1.0 - e.a)
                       + lebesgue_norm(f, e.s);
    if (!(rhs > 0.0)) {
        throw std::domain_error("gn_ratio: zero right-hand side");
    }
    return lhs / rhs;
}

double gn2_ratio(const GridFunction& f, const GN2Exponents& e)
{
    const double lhs = gradient_norm(f, e.p);
    const double lap = lebesgue_norm(laplacian(f), 2.0);
    const double rhs = (std::pow(lap, e.b) + std::pow(lebesgue_norm(f, e.r), e.b))
                           * std::pow(lebesgue_norm(f, e.q), 1.0 - e.b)
                       + lebesgue_norm(f, e.s);
    if (!(rhs > 0.0)) {
        throw std::domain_error("gn2_ratio: zero right-hand side");
    }
    return lhs / rhs;
}

double poincare_ratio(const GridFunction& f)
{
    // Mean from the discrete weights, so the centered function is mean-free on the grid.
    double wsum = 0.0;
    for (double w : f.grid().cell_weights()) wsum += w;
    const double mean = integrate(f) / wsum;
    GridFunction centered(f.grid_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) {
        centered[i] = f[i] - mean;
    }
    const double grad = std::sqrt(gradient_energy(f));
    if (!(grad > 0.0)) {
        throw std::domain_error("poincare_ratio: constant function");
    }
    return lebesgue_norm(centered, 2.0) / grad;
}

std::vector<GridFunction> gn_ensemble(const GridPtr& grid, std::size_t size, std::uint64_t seed)
{
    std::vector<GridFunction> out;
    out.reserve(size);
    const bool two_d = grid->axes() == 2;
    const double lx = grid->extent(0);
    const double ly = grid->extent(1);
    for (std::size_t k = 0; k < size; ++k) {
        std::mt19937_64 rng(splitmix(seed ^ splitmix(k)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        switch (k % 4) {
        case 0: {
            const int modes = 1 + static_cast<int>(rng() % 8);
            std::vector<double> ax(modes + 1), ay(modes + 1);
            for (int m = 0; m <= modes; ++m) {
                ax[m] = normal(rng) / (1.0 + m);
                ay[m] = normal(rng) / (1.0 + m);
            }
            out.push_back(sample(grid, [&](double x, double y) {
                double s = 0.0;
                for (int m = 0; m <= modes; ++m) {
                    s += ax[m] * std::cos(m * std::numbers::pi * x / lx);
                    if (two_d) s += ay[m] * std::cos(m * std::numbers::pi * y / ly);
                }
                return s;
            }));
            break;
        }
        case 1: {
            const int degree = 1 + static_cast<int>(rng() % 4);
            std::vector<double> cx(degree + 1), cy(degree + 1);
            for (int m = 0; m <= degree; ++m) {
                cx[m] = 2.0 * unit(rng) - 1.0;
                cy[m] = 2.0 * unit(rng) - 1.0;
            }
            out.push_back(sample(grid, [&](double x, double y) {
                double s = 0.0, px = 1.0, py = 1.0;
                for (int m = 0; m <= degree; ++m) {
                    s += cx[m] * px;
                    if (two_d && m > 0) s += cy[m] * py;
                    px *= x / lx;
                    py *= y / ly;
                }
                return s;
            }));
            break;
        }
        case 2: {
            const double delta = std::pow(10.0, -3.0 + 2.0 * unit(rng));
            const int m = 1 + static_cast<int>(rng() % 4);
            out.push_back(sample(grid, [&](double x, double y) {
                double s = 1.0 + delta * std::cos(m * std::numbers::pi * x / lx);
                if (two_d) s += delta * std::cos(m * std::numbers::pi * y / ly);
                return s;
            }));
            break;
        }
        default: {
            const double width = 0.05 + 0.15 * unit(rng);
            const double x0 = unit(rng);
            const double y0 = unit(rng);
            const double offset = 0.1 * unit(rng);
            out.push_back(sample(grid, [&](double x, double y) {
                const double dx = x / lx - x0;
                const double dy = two_d ? y / ly - y0 : 0.0;
                return offset + std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
            }));
            break;
        }
        }
    }
    return out;
}

namespace {

template <class Ratio>
ConstantEstimate sup_ratio(const std::vector<GridFunction>& ensemble, Ratio&& ratio)
{
    std::vector<double> values(ensemble.size(), 0.0);
    const auto count = static_cast<std::int64_t>(ensemble.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t k = 0; k < count; ++k) {
        values[k] = ratio(ensemble[k]);
    }
    ConstantEstimate est;
    est.evaluated = ensemble.size();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] > est.c_est) {
            est.c_est = values[k];
            est.argmax = k;
        }
    }
    return est;
}

} // namespace

ConstantEstimate gn_constant_estimate(const GridPtr& grid, const GNExponents& e, std::size_t ensemble_size,
                                      std::uint64_t seed)
{
    return sup_ratio(gn_ensemble(grid, ensemble_size, seed), [&](const GridFunction& f) { return gn_ratio(f, e); });
}

ConstantEstimate gn2_constant_estimate(const GridPtr& grid, const GN2Exponents& e, std::size_t ensemble_size,
                                       std::uint64_t seed)
{
    return sup_ratio(gn_ensemble(grid, ensemble_size, seed), [&](const GridFunction& f) { return gn2_ratio(f, e); });
}

ConstantEstimate poincare_constant_estimate(const GridPtr& grid, std::size_t ensemble_size, std::uint64_t seed)
{
    return sup_ratio(gn_ensemble(grid, ensemble_size, seed), [](const GridFunction& f) { return poincare_ratio(f); });
}

std::vector<GNExponents> proof_exponent_sets(const ExponentAudit& audit)
{
    std::vector<GNExponents> out;
    const int n = audit.spec.n;
    const double p = audit.spec.p;
    const double theta = audit.spec.theta;
    if (audit.q_entropy1) {
        const double q = *audit.q_entropy1;
        out.push_back(GNExponents::make(2.0 / (2.0 - p), 2.0 / q, 2.0, 2.0 / q, n, "Lq-functional"));
        if (audit.r_entropy1) {
            const double r = *audit.r_entropy1;
            out.push_back(GNExponents::make(2.0 * theta * r / q, 2.0 / q, 2.0, 2.0 / q, n, "v-energy"));
        }
    }
    if (audit.branch == AuditBranch::Entropy && audit.chosen_q) {
        const double q = *audit.chosen_q;
        out.push_back(GNExponents::make(4.0 * theta / q, 2.0 / q, 2.0, 2.0 / q, n, "gradient-energy"));
    }
    return out;
}

std::vector<GN2Exponents> proof_exponent_sets_gn2(const ExponentAudit& audit)
{
    std::vector<GN2Exponents> out;
    if (audit.branch == AuditBranch::Entropy && audit.chosen_r) {
        out.push_back(GN2Exponents::make(*audit.chosen_r, 2.0, 2.0, 2.0, audit.spec.n, "second-order"));
    }
    return out;
}

namespace {

DomainSpec doubled(DomainSpec spec)
{
    spec.cells[0] *= 2;
    if (spec.mode == GridMode::Cartesian2D) spec.cells[1] *= 2;
    return spec;
}

RefinementStudy finish(std::string label, double exponent, double coarse, double fine, double tol)
{
    RefinementStudy s;
    s.label = std::move(label);
    s.exponent = exponent;
    s.coarse = coarse;
    s.fine = fine;
    s.relative_change = std::abs(fine / coarse - 1.0);
    s.stable = std::isfinite(coarse) && std::isfinite(fine) && s.relative_change <= tol;
    return s;
}

} // namespace

RefinementStudy gn_refinement(const DomainSpec& coarse, const GNExponents& e, std::size_t ensemble_size,
                              double tolerance, std::uint64_t seed)
{
    const double c0 = gn_constant_estimate(build_grid(coarse), e, ensemble_size, seed).c_est;
    const double c1 = gn_constant_estimate(build_grid(doubled(coarse)), e, ensemble_size, seed).c_est;
    return finish(e.label, e.a, c0, c1, tolerance);
}

RefinementStudy gn2_refinement(const DomainSpec& coarse, const GN2Exponents& e, std::size_t ensemble_size,
                               double tolerance, std::uint64_t seed)
{
    const double c0 = gn2_constant_estimate(build_grid(coarse), e, ensemble_size, seed).c_est;
    const double c1 = gn2_constant_estimate(build_grid(doubled(coarse)), e, ensemble_size, seed).c_est;
    return finish(e.label, e.b, c0, c1, tolerance);
}

nlohmann::ordered_json to_json(const RefinementStudy& s)
{
    return {{"label", s.label},
            {"exponent", s.exponent},
            {"c_est_coarse", s.coarse},
            {"c_est_fine", s.fine},
            {"relative_change", s.relative_change},
            {"stable", s.stable}};
}

} // namespace ksflux
