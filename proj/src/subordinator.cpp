#include "maxstab/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maxstab {

namespace {

void validate(const SubordinatorParams& p) {
    if (!(p.drift > 0)) throw std::invalid_argument("subordinator drift must be > 0");
    if (!(p.x_min > 0)) throw std::invalid_argument("subordinator x_min must be > 0");
    if (p.tail == TailKind::Stable) {
        if (!(p.rho > 0 && p.rho < 1)) throw std::invalid_argument("stable index must lie in (0,1)");
        if (!(p.scale > 0)) throw std::invalid_argument("stable scale must be > 0");
    }
    if (p.tail == TailKind::LogTail) {
        if (!(p.gamma > 1)) throw std::invalid_argument("log-tail exponent must be > 1");
        if (!(p.x_min < std::exp(-p.gamma))) throw std::invalid_argument("log-tail x_min must lie below exp(-gamma)");
    }
}

// x^-1 (log 1/x)^-gamma
double log_profile(double x, double gamma) { return 1.0 / (x * std::pow(std::log(1.0 / x), gamma)); }

}  // namespace

double tail_cutoff(const SubordinatorParams& p) {
    if (p.tail == TailKind::LogTail) return std::exp(-p.gamma);
    return std::numeric_limits<double>::infinity();
}

double tail_mass(const SubordinatorParams& p, double x) {
    switch (p.tail) {
        case TailKind::None: return 0.0;
        case TailKind::Stable: return p.scale * std::pow(x, -p.rho);
        case TailKind::LogTail: {
            const double x0 = tail_cutoff(p);
            if (x >= x0) return 0.0;
            // the profile is decreasing only below exp(-gamma); shift so the mass vanishes there
            return log_profile(x, p.gamma) - log_profile(x0, p.gamma);
        }
    }
    return 0.0;
}

double truncation_bias_rate(const SubordinatorParams& p) {
    switch (p.tail) {
        case TailKind::None: return 0.0;
        case TailKind::Stable: return p.scale * p.rho / (1.0 - p.rho) * std::pow(p.x_min, 1.0 - p.rho);
        case TailKind::LogTail: {
            const double l = std::log(1.0 / p.x_min);
            return std::pow(l, 1.0 - p.gamma) / (p.gamma - 1.0) - std::pow(l, -p.gamma);
        }
    }
    return 0.0;
}

Predicted predicted_label(const SubordinatorParams& p) {
    switch (p.tail) {
        case TailKind::None:
        case TailKind::Stable: return Predicted::Stable;
        case TailKind::LogTail:
            if (p.gamma <= 3.0) return Predicted::Unstable;
            if (p.gamma < 3.0 + p.gap_eps) return Predicted::Gap;
            return Predicted::Stable;
    }
    return Predicted::Gap;
}

SubordinatorSample sample_subordinator_range(const SubordinatorParams& p, double horizon, Engine& rng, double cover) {
    validate(p);
    const double T = horizon > 0 ? horizon : cover / p.drift;
    const double lambda = tail_mass(p, p.x_min);
    std::vector<double> times;
    if (lambda > 0) {
        std::poisson_distribution<long long> P(lambda * T);
        const long long n = P(rng);
        std::uniform_real_distribution<double> U(0.0, T);
        times.resize(static_cast<std::size_t>(n));
        for (auto& t : times) t = U(rng);
        std::sort(times.begin(), times.end());
    }
    std::uniform_real_distribution<double> U01(0.0, 1.0);
    std::vector<double> sizes(times.size());
    for (auto& s : sizes) {
        const double u = 1.0 - U01(rng);  // (0,1]
        if (p.tail == TailKind::Stable) {
            s = p.x_min * std::pow(u, -1.0 / p.rho);
        } else {
            // invert the tail on the log scale: find x with tail_mass(x) = u * lambda
            const double target = u * lambda;
            double lo = std::log(p.x_min), hi = std::log(tail_cutoff(p));
            for (int i = 0; i < 64; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (tail_mass(p, std::exp(mid)) > target) lo = mid;
                else hi = mid;
            }
            s = std::exp(0.5 * (lo + hi));
        }
    }
    std::vector<Interval> gaps(times.size());
    double jumped = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double start = p.drift * times[i] + jumped;
        gaps[i] = {start, start + sizes[i]};
        jumped += sizes[i];
    }
    SubordinatorInfo info;
    info.params = p;
    info.horizon = T;
    info.range_end = p.drift * T + jumped;
    info.jumps = times.size();
    info.truncation_bias = truncation_bias_rate(p) * T;
    info.predicted = predicted_label(p);
    return {make_subordinator_range(info, std::move(gaps)), info};
}

}  // namespace maxstab
