#pragma once
#include <string>
#include <vector>

#include "maxstab/censor.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

enum class RateFamily { LogPower, Power, Tabulated };

// g(h) = (log 1/h)^-beta, g(h) = h^p, or a user table of (h, g) pairs.
struct RateFunction {
    RateFamily family = RateFamily::LogPower;
    double param = 1.0;
    std::vector<double> h, g;

    static RateFunction log_power(double beta) { return {RateFamily::LogPower, beta, {}, {}}; }
    static RateFunction power(double p) { return {RateFamily::Power, p, {}, {}}; }
    static RateFunction tabulated(std::vector<double> h, std::vector<double> g);
    double operator()(double h) const;
    std::string describe() const;
};

enum class Integral { Converges, Diverges, Inconclusive };
const char* to_string(Integral v);

// Classifies the integral of g(h) dh/h near 0+.
Integral g_integral_classify(const RateFunction& g, double h_floor = 1e-12);

struct DensityProfile {
    double t = 0.0;
    std::vector<double> h;          // positive scales, decreasing
    std::vector<double> deficit_right;  // h - E_{t,t+h}, NaN when t+h leaves the window
    std::vector<double> deficit_left;   // h - E_{t-h,t}
};

DensityProfile density_profile(const CensorSet& set, double t, const std::vector<double>& scales);

enum class RateVerdict { StableCriterionMet, UnstableCriterionMet, Gap };
const char* to_string(RateVerdict v);

struct CertifyOptions {
    double bounded_exponent = 0.75;  // growth exponent (in log 1/h) still read as bounded
    double floor_exponent = -0.5;    // decay exponent still read as bounded below
};

struct RateReport {
    std::vector<double> scales;
    std::vector<double> median_fraction;  // median over points of max-side deficit / h
    std::vector<double> ratio_i;          // medians of the (i) ratio per scale
    std::vector<double> ratio_ii_right, ratio_ii_left;
    double exponent = 0.0;       // fitted alpha in deficit/h ~ (log 1/h)^-alpha
    double band_lo = 0.0, band_hi = 0.0;  // range of (deficit/h) * (log 1/h)^alpha
    double growth_i = 0.0;       // fitted exponent of the (i) ratio
    double growth_ii = 0.0;      // larger of the two one-sided (ii) exponents
    bool zero_deficit = false;
    bool bounded_i = false;
    bool bounded_below_ii = false;
    Integral integral = Integral::Inconclusive;
    RateVerdict verdict = RateVerdict::Gap;
    std::size_t points = 0;
};

RateReport certify_rate(const CensorSet& set, const std::vector<double>& points, const std::vector<double>& scales,
                        const RateFunction& g, const CertifyOptions& opt = {});

// Points drawn from the normalised measure of E (inverse-CDF sampling).
std::vector<double> sample_points(const CensorSet& set, std::size_t n, Engine& rng);
std::vector<double> dyadic_scales(int j_lo, int j_hi);

struct CantorBuild {
    CensorSet set;
    RateReport report;
    bool certified = false;
    double tolerance = 0.0;
    std::string message;
};

struct BuildOptions {
    std::size_t points = 400;
    int j_lo = 4, j_hi = 16;
    std::uint64_t seed = 1;
};

// Nested middle-gap set with deficit rate h (log 1/h)^-alpha, certified by
// certify_rate. `schedule` overrides the derived gap fractions.
CantorBuild build_cantor(double alpha, int depth, Interval window = {0.0, 1.0},
                         const BuildOptions& opt = {}, const std::vector<double>* schedule = nullptr);

struct PhiBoundReport {
    bool holds_below_threshold = false;
    double log_threshold = 0.0;  // log(1/u*) : holds for every sampled u <= u*
    double threshold = 0.0;      // u* (0 when it underflows)
    std::size_t samples = 0;
    std::size_t failures = 0;
};

// Checks phi(u^2 / (C' loglog(1/u))) <= u with phi(t) = sqrt(C t loglog(1/t)) over
// log(1/u) in [log_lo, log_hi], sampled geometrically.
PhiBoundReport phi_bound_check(double C, double C_prime, double log_lo = 1.5, double log_hi = 1e300,
                               std::size_t samples = 4000);

}  // namespace maxstab
