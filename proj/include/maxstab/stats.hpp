#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace maxstab {

// Sufficient-statistic estimate. Proportions get Wilson intervals.
struct Estimate {
    std::string label;
    bool proportion = true;
    std::uint64_t n = 0;
    double sum = 0.0;
    double sumsq = 0.0;

    static Estimate of_proportion(std::string label, std::uint64_t hits, std::uint64_t n);
    static Estimate of_values(std::string label, const std::vector<double>& xs);

    void add(double x) { ++n; sum += x; sumsq += x * x; }
    double mean() const;
    double stderr_() const;
    double ci_lo() const;
    double ci_hi() const;
    bool empty() const { return n == 0; }
};

Estimate merge(const Estimate& a, const Estimate& b);

struct WilsonInterval { double lo, hi; };
WilsonInterval wilson(double hits, double n, double z = 1.959963984540054);

enum class Trend { Increasing, Decreasing, Flat, Mixed };
enum class Step { Up, Down, Tie };

struct TrendReport {
    std::vector<double> params;
    std::vector<Estimate> points;
    std::vector<Step> steps;
    Trend verdict = Trend::Mixed;
};

TrendReport trend(const std::vector<double>& params, const std::vector<Estimate>& points);
const char* to_string(Trend t);

struct KsResult {
    double statistic = 0.0;
    double critical = 0.0;
    std::size_t n = 0;
    bool pass = false;
};

// Kolmogorov-Smirnov against a continuous reference CDF at level 0.01.
KsResult ks_uniformity(std::vector<double> sample, const std::function<double(double)>& cdf);

double arcsine_cdf(double x);

}  // namespace maxstab
