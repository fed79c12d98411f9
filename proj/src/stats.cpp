#include "maxstab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maxstab {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

Estimate Estimate::of_proportion(std::string label, std::uint64_t hits, std::uint64_t n) {
    if (hits > n) throw std::invalid_argument("hits exceed trials");
    Estimate e;
    e.label = std::move(label);
    e.proportion = true;
    e.n = n;
    e.sum = static_cast<double>(hits);
    e.sumsq = e.sum;
    return e;
}

Estimate Estimate::of_values(std::string label, const std::vector<double>& xs) {
    Estimate e;
    e.label = std::move(label);
    e.proportion = false;
    for (double x : xs) e.add(x);
    return e;
}

double Estimate::mean() const { return n ? sum / static_cast<double>(n) : 0.0; }

double Estimate::stderr_() const {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double m = sum / nn;
    const double var = std::max(0.0, (sumsq - nn * m * m) / (nn - 1.0));
    return std::sqrt(var / nn);
}

double Estimate::ci_lo() const {
    if (n == 0) return 0.0;
    if (proportion) return std::min(wilson(sum, static_cast<double>(n)).lo, mean());
    return mean() - kZ95 * stderr_();
}

double Estimate::ci_hi() const {
    if (n == 0) return 0.0;
    if (proportion) return std::max(wilson(sum, static_cast<double>(n)).hi, mean());
    return mean() + kZ95 * stderr_();
}

Estimate merge(const Estimate& a, const Estimate& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.label != b.label) throw std::invalid_argument("merge: label mismatch '" + a.label + "' vs '" + b.label + "'");
    Estimate e = a;
    e.proportion = a.proportion && b.proportion;
    e.n = a.n + b.n;
    e.sum = a.sum + b.sum;
    e.sumsq = a.sumsq + b.sumsq;
    return e;
}

WilsonInterval wilson(double hits, double n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double p = hits / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TrendReport trend(const std::vector<double>& params, const std::vector<Estimate>& points) {
    if (points.size() < 3) throw std::invalid_argument("trend needs at least 3 ladder points");
    if (params.size() != points.size()) throw std::invalid_argument("trend: params/points size mismatch");
    TrendReport r;
    r.params = params;
    r.points = points;
    auto cmp = [](const Estimate& a, const Estimate& b) {
        if (b.ci_lo() > a.ci_hi()) return Step::Up;
        if (b.ci_hi() < a.ci_lo()) return Step::Down;
        return Step::Tie;
    };
    int ups = 0, downs = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        r.steps.push_back(cmp(points[i], points[i + 1]));
        ups += r.steps.back() == Step::Up;
        downs += r.steps.back() == Step::Down;
    }
    const Step overall = cmp(points.front(), points.back());
    if (ups == 0 && downs == 0)
        r.verdict = Trend::Flat;
    else if (downs == 0 && overall == Step::Up)
        r.verdict = Trend::Increasing;
    else if (ups == 0 && overall == Step::Down)
        r.verdict = Trend::Decreasing;
    else
        r.verdict = Trend::Mixed;
    return r;
}

const char* to_string(Trend t) {
    switch (t) {
        case Trend::Increasing: return "INCREASING";
        case Trend::Decreasing: return "DECREASING";
        case Trend::Flat: return "FLAT";
        case Trend::Mixed: return "MIXED";
    }
    return "?";
}

KsResult ks_uniformity(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.size() < 100) throw std::invalid_argument("ks_uniformity: need at least 100 samples");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    KsResult r;
    r.n = sample.size();
    r.statistic = d;
    // Asymptotic Kolmogorov quantile at 0.01 with the usual small-sample correction.
    const double sq = std::sqrt(n);
    r.critical = 1.6276 / (sq + 0.12 + 0.11 / sq);
    r.pass = d <= r.critical;
    return r;
}

double arcsine_cdf(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(x));
}

}  // namespace maxstab
