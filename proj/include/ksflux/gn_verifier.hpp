#pragma once

#include "ksflux/grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ksflux {

struct ExponentAudit;

/// (1/q - 1/p) / (1/q + 1/n - 1/r). Throws std::invalid_argument for a zero
/// denominator or a result outside [0, 1]. p may be infinite.
double gn_exponent(double p, double q, double r, int n);

/// (1/q + 1/n - 1/p) / (1/q + 2/n - 1/2). Throws outside [1/2, 1].
double gn2_exponent(double p, double q, int n);

/// ||f||_p <= C ||grad f||_r^a ||f||_q^(1-a) + C ||f||_s.
struct GNExponents {
    double p = 2.0;
    double q = 2.0;
    double r = 2.0;
    double s = 2.0;
    int n = 1;
    double a = 0.0;
    std::string label;

    static GNExponents make(double p, double q, double r, double s, int n, std::string label = {});
};

/// ||grad f||_p <= C (||lap f||_2^b + ||f||_r^b) ||f||_q^(1-b) + C ||f||_s.
struct GN2Exponents {
    double p = 2.0;
    double q = 2.0;
    double r = 2.0;
    double s = 2.0;
    int n = 1;
    double b = 0.5;
    std::string label;

    static GN2Exponents make(double p, double q, double r, double s, int n, std::string label = {});
};

/// (sum |f_i|^p w_i)^(1/p) for any p > 0 (a quasi-norm below 1); max |f_i| for p = inf.
double lebesgue_norm(const GridFunction& f, double p);

/// Lebesgue norm of the cell-reconstructed |grad f|; max face gradient for r = inf.
double gradient_norm(const GridFunction& f, double r);

/// LHS / RHS with C = 1. Throws std::domain_error for a zero right-hand side.
double gn_ratio(const GridFunction& f, const GNExponents& e);
double gn2_ratio(const GridFunction& f, const GN2Exponents& e);

/// ||f - mean f||_2 / ||grad f||_2. Throws std::domain_error for constant f.
double poincare_ratio(const GridFunction& f);

/// Seeded test ensemble on a grid: random cosine series, polynomials,
/// near-constant perturbations and resolved Gaussian spikes (width >= 0.05
/// of the extent). Member k depends only on (seed, k), not on the grid.
std::vector<GridFunction> gn_ensemble(const GridPtr& grid, std::size_t size, std::uint64_t seed);

struct ConstantEstimate {
    double c_est = 0.0;
    std::size_t argmax = 0;
    std::size_t evaluated = 0;
};

ConstantEstimate gn_constant_estimate(const GridPtr& grid, const GNExponents& e, std::size_t ensemble_size,
                                      std::uint64_t seed = 0x5eed);
ConstantEstimate gn2_constant_estimate(const GridPtr& grid, const GN2Exponents& e, std::size_t ensemble_size,
                                       std::uint64_t seed = 0x5eed);
ConstantEstimate poincare_constant_estimate(const GridPtr& grid, std::size_t ensemble_size,
                                            std::uint64_t seed = 0x5eed);

/// Exponent sets the boundedness proofs invoke at the audit's witnesses:
/// the u^{q/2} estimates behind the L^q, v-energy and grad-v-energy estimates.
std::vector<GNExponents> proof_exponent_sets(const ExponentAudit& audit);
/// The second-order set (r, 2, 2, 2) behind b*, when the audit has one.
std::vector<GN2Exponents> proof_exponent_sets_gn2(const ExponentAudit& audit);

struct RefinementStudy {
    std::string label;
    double exponent = 0.0;
    double coarse = 0.0;
    double fine = 0.0;
    /// |fine / coarse - 1|.
    double relative_change = 0.0;
    bool stable = false;
};

/// C_est on `coarse` and on the grid with twice the cells per axis.
RefinementStudy gn_refinement(const DomainSpec& coarse, const GNExponents& e, std::size_t ensemble_size,
                              double tolerance = 0.15, std::uint64_t seed = 0x5eed);
RefinementStudy gn2_refinement(const DomainSpec& coarse, const GN2Exponents& e, std::size_t ensemble_size,
                               double tolerance = 0.15, std::uint64_t seed = 0x5eed);

nlohmann::ordered_json to_json(const RefinementStudy& s);

} // namespace ksflux
