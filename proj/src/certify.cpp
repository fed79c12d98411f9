#include "maxstab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace maxstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return kNaN;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + m);
    return 0.5 * (lo + hi);
}

struct Fit {
    double slope = 0.0;
    std::size_t used = 0;
};

// Least-squares slope of log(y) against x, skipping non-positive y.
Fit log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0) || std::isnan(y[i])) continue;
        const double ly = std::log(y[i]);
        sx += x[i];
        sy += ly;
        sxx += x[i] * x[i];
        sxy += x[i] * ly;
        ++n;
    }
    Fit f;
    f.used = n;
    if (n < 2) return f;
    const double d = n * sxx - sx * sx;
    if (d == 0) return f;
    f.slope = (n * sxy - sx * sy) / d;
    return f;
}

}  // namespace

RateFunction RateFunction::tabulated(std::vector<double> h, std::vector<double> g) {
    if (h.size() != g.size() || h.size() < 3) throw std::invalid_argument("tabulated rate needs >= 3 (h, g) pairs");
    std::vector<std::size_t> idx(h.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return h[a] > h[b]; });
    RateFunction r{RateFamily::Tabulated, 0.0, {}, {}};
    for (auto i : idx) {
        if (!(h[i] > 0 && h[i] < 1)) throw std::invalid_argument("tabulated rate: h must lie in (0,1)");
        if (!(g[i] > 0)) throw std::invalid_argument("tabulated rate: g must be positive");
        if (!r.h.empty() && g[i] > r.g.back()) throw std::invalid_argument("tabulated rate: g must be nondecreasing in h");
        r.h.push_back(h[i]);
        r.g.push_back(g[i]);
    }
    return r;
}

double RateFunction::operator()(double x) const {
    switch (family) {
        case RateFamily::LogPower: return std::pow(std::log(1.0 / x), -param);
        case RateFamily::Power: return std::pow(x, param);
        case RateFamily::Tabulated: {
            // log-log interpolation, flat extrapolation
            if (x >= h.front()) return g.front();
            if (x <= h.back()) return g.back();
            auto it = std::lower_bound(h.begin(), h.end(), x, [](double a, double b) { return a > b; });
            const std::size_t i = static_cast<std::size_t>(it - h.begin());
            const double w = std::log(x / h[i - 1]) / std::log(h[i] / h[i - 1]);
            return std::exp(std::log(g[i - 1]) + w * (std::log(g[i]) - std::log(g[i - 1])));
        }
    }
    return kNaN;
}

std::string RateFunction::describe() const {
    std::ostringstream os;
    switch (family) {
        case RateFamily::LogPower: os << "(log 1/h)^-" << param; break;
        case RateFamily::Power: os << "h^" << param; break;
        case RateFamily::Tabulated: os << "tabulated[" << h.size() << "]"; break;
    }
    return os.str();
}

const char* to_string(Integral v) {
    switch (v) {
        case Integral::Converges: return "CONVERGES";
        case Integral::Diverges: return "DIVERGES";
        case Integral::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

const char* to_string(RateVerdict v) {
    switch (v) {
        case RateVerdict::StableCriterionMet: return "STABLE-CRITERION-MET";
        case RateVerdict::UnstableCriterionMet: return "UNSTABLE-CRITERION-MET";
        case RateVerdict::Gap: return "GAP";
    }
    return "?";
}

Integral g_integral_classify(const RateFunction& g, double h_floor) {
    switch (g.family) {
        case RateFamily::LogPower:
            if (!(g.param > 0)) throw std::invalid_argument("g must be nondecreasing near 0: need beta > 0");
            return g.param > 1 ? Integral::Converges : Integral::Diverges;
        case RateFamily::Power:
            if (!(g.param > 0)) throw std::invalid_argument("g must be nondecreasing near 0: need p > 0");
            return Integral::Converges;
        case RateFamily::Tabulated: break;
    }
    // Tabulated: bound the unseen tail below the smallest tabulated scale by the
    // two supported families fitted to the last decade of the table.
    const auto& h = g.h;
    const auto& v = g.g;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] < h_floor) continue;
        if (h[i] <= h.back() * 10.0) {
            lx.push_back(std::log(std::log(1.0 / h[i])));
            ly.push_back(v[i]);
        }
    }
    if (lx.size() < 2) return Integral::Inconclusive;
    const double beta = -log_slope(lx, ly).slope;
    std::vector<double> px, py;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h[i] <= h.back() * 10.0) {
            px.push_back(std::log(h[i]));
            py.push_back(v[i]);
        }
    const double p = log_slope(px, py).slope;
    // A clear power decay or a log-power decay well above 1 converges; a log-power
    // exponent well below 1 diverges; anything close to the boundary is left open.
    if (p > 0.05) return Integral::Converges;
    if (beta > 1.2) return Integral::Converges;
    if (beta < 0.8) return Integral::Diverges;
    return Integral::Inconclusive;
}

DensityProfile density_profile(const CensorSet& set, double t, const std::vector<double>& scales) {
    DensityProfile d;
    d.t = t;
    d.h = scales;
    const Interval w = set.window();
    for (double h : scales) {
        d.deficit_right.push_back(t + h <= w.hi ? std::clamp(h - set.measure(t, t + h), 0.0, h) : kNaN);
        d.deficit_left.push_back(t - h >= w.lo ? std::clamp(h - set.measure(t - h, t), 0.0, h) : kNaN);
    }
    return d;
}

std::vector<double> sample_points(const CensorSet& set, std::size_t n, Engine& rng) {
    const double total = set.total();
    if (!(total > 0)) throw std::invalid_argument("cannot sample points from a null set");
    std::uniform_real_distribution<double> U(0.0, total);
    std::vector<double> pts(n);
    for (auto& x : pts) x = set.quantile(U(rng));
    std::sort(pts.begin(), pts.end());
    return pts;
}

std::vector<double> dyadic_scales(int j_lo, int j_hi) {
    std::vector<double> s;
    for (int j = j_lo; j <= j_hi; ++j) s.push_back(std::ldexp(1.0, -j));
    return s;
}

RateReport certify_rate(const CensorSet& set, const std::vector<double>& points, const std::vector<double>& scales,
                        const RateFunction& g, const CertifyOptions& opt) {
    if (points.empty()) throw std::invalid_argument("certify_rate: empty point sample");
    if (scales.size() < 8) throw std::invalid_argument("certify_rate: need at least 8 scales");
    RateReport r;
    r.points = points.size();
    r.scales = scales;
    const std::size_t S = scales.size();
    std::vector<std::vector<double>> frac(S), ri(S), rr(S), rl(S);
    for (double t : points) {
        const DensityProfile d = density_profile(set, t, scales);
        for (std::size_t j = 0; j < S; ++j) {
            const double h = scales[j];
            const double gh = g(h);
            const double den_ii = h * gh * gh;
            const double den_i = den_ii / std::log(std::log(1.0 / (std::sqrt(h) * gh)));
            const double dr = d.deficit_right[j], dl = d.deficit_left[j];
            const double both = std::isnan(dr) ? dl : std::isnan(dl) ? dr : std::max(dr, dl);
            frac[j].push_back(both / h);
            ri[j].push_back(both / den_i);
            rr[j].push_back(dr / den_ii);
            rl[j].push_back(dl / den_ii);
        }
    }
    std::vector<double> x(S);
    for (std::size_t j = 0; j < S; ++j) {
        x[j] = std::log(std::log(1.0 / scales[j]));
        r.median_fraction.push_back(median(frac[j]));
        r.ratio_i.push_back(median(ri[j]));
        r.ratio_ii_right.push_back(median(rr[j]));
        r.ratio_ii_left.push_back(median(rl[j]));
    }
    r.zero_deficit = std::all_of(r.median_fraction.begin(), r.median_fraction.end(), [](double v) { return !(v > 0); });
    if (r.zero_deficit) {
        r.exponent = std::numeric_limits<double>::infinity();
        r.bounded_i = true;
        r.bounded_below_ii = false;
    } else {
        r.exponent = -log_slope(x, r.median_fraction).slope;
        r.band_lo = std::numeric_limits<double>::infinity();
        r.band_hi = 0.0;
        for (std::size_t j = 0; j < S; ++j) {
            if (!(r.median_fraction[j] > 0)) continue;
            const double b = r.median_fraction[j] * std::pow(std::log(1.0 / scales[j]), r.exponent);
            r.band_lo = std::min(r.band_lo, b);
            r.band_hi = std::max(r.band_hi, b);
        }
        r.growth_i = log_slope(x, r.ratio_i).slope;
        r.bounded_i = r.growth_i <= opt.bounded_exponent;
        const Fit fr = log_slope(x, r.ratio_ii_right), fl = log_slope(x, r.ratio_ii_left);
        const bool ok_r = fr.used == S, ok_l = fl.used == S;
        r.growth_ii = -std::numeric_limits<double>::infinity();
        if (ok_r) r.growth_ii = std::max(r.growth_ii, fr.slope);
        if (ok_l) r.growth_ii = std::max(r.growth_ii, fl.slope);
        r.bounded_below_ii = (ok_r || ok_l) && r.growth_ii >= opt.floor_exponent;
    }
    r.integral = g_integral_classify(g);
    const bool positive = set.total() > 0;
    if (r.integral == Integral::Converges && r.bounded_i)
        r.verdict = RateVerdict::StableCriterionMet;
    else if (r.integral == Integral::Diverges && r.bounded_below_ii && positive)
        r.verdict = RateVerdict::UnstableCriterionMet;
    else
        r.verdict = RateVerdict::Gap;
    return r;
}

CantorBuild build_cantor(double alpha, int depth, Interval window, const BuildOptions& opt,
                         const std::vector<double>* schedule) {
    if (!(alpha > 0)) throw std::invalid_argument("build_cantor: alpha must be > 0");
    if (depth < 1 || depth > 40) throw std::invalid_argument("build_cantor: depth must lie in [1,40]");
    CantorBuild b;
    std::vector<double> r = schedule ? *schedule : alpha_schedule(alpha, depth);
    b.set = make_cantor(r, window, alpha);
    Engine rng = make_engine(opt.seed, {kTagPoints, static_cast<std::uint64_t>(depth)});
    const auto pts = sample_points(b.set, opt.points, rng);
    // scales are relative to the window length
    auto scales = dyadic_scales(opt.j_lo, opt.j_hi);
    for (auto& h : scales) h *= (window.hi - window.lo);
    b.report = certify_rate(b.set, pts, scales, RateFunction::log_power(alpha / 2.0));
    b.tolerance = std::max(0.5, 0.2 * alpha);
    b.certified = std::abs(b.report.exponent - alpha) <= b.tolerance;
    std::ostringstream os;
    os << "target alpha " << alpha << ", fitted exponent " << b.report.exponent << " (tolerance " << b.tolerance
       << "), band [" << b.report.band_lo << ", " << b.report.band_hi << "]";
    b.message = os.str();
    return b;
}

PhiBoundReport phi_bound_check(double C, double C_prime, double log_lo, double log_hi, std::size_t samples) {
    if (!(C > 0) || !(C_prime > C)) throw std::invalid_argument("phi_bound_check: need C' > C > 0");
    if (!(log_lo > 1.0) || !(log_hi > log_lo) || samples < 2) throw std::invalid_argument("phi_bound_check: bad range");
    PhiBoundReport rep;
    rep.samples = samples;
    // In logs: with l = log(1/u), log(1/t) = 2l + log C' + log log l, and the
    // inequality reads (C/C') * log(log(1/t)) / log(l) <= 1.
    double smallest_failing = -1.0;
    const double step = std::log(log_hi / log_lo) / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        const double l = log_lo * std::exp(step * static_cast<double>(i));
        const double ll = std::log(l);
        const double log_inv_t = 2.0 * l + std::log(C_prime) + std::log(ll);
        const bool ok = (C / C_prime) * std::log(log_inv_t) <= ll;
        if (!ok) {
            ++rep.failures;
            smallest_failing = std::max(smallest_failing, l);
        }
    }
    // holds for every sampled u below u* = exp(-l*), l* = the next sample past the last failure
    if (smallest_failing < 0) {
        rep.log_threshold = log_lo;
    } else {
        rep.log_threshold = smallest_failing * std::exp(step);
    }
    rep.holds_below_threshold = rep.log_threshold <= log_hi;
    rep.threshold = std::exp(-rep.log_threshold);
    return rep;
}

}  // namespace maxstab
