#include "maxstab/time_change.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxstab {

namespace {

int range_level(double total, const TimeGrid& grid) {
    // coarsest spacing not finer than the time grid keeps nearest-node reads distinct
    const double ratio = total / grid.dt();
    return ratio >= 1.0 ? static_cast<int>(std::floor(std::log2(ratio))) : 0;
}

}  // namespace

TimeChange build_time_change(const CensorSet& set, const TimeGrid& grid) {
    const double total = set.measure(grid.t_start(), grid.t_end());
    if (!(total > 0)) throw std::invalid_argument("degenerate time change: E has zero measure in the window");
    TimeChange tc{grid, TimeGrid(0.0, total, range_level(total, grid)), {}, {}, total};
    tc.rho.resize(grid.nodes());
    for (std::size_t k = 0; k < tc.rho.size(); ++k) tc.rho[k] = set.measure(grid.t_start(), grid.time(k));
    tc.zeta.resize(tc.range.nodes());
    for (std::size_t j = 0; j < tc.zeta.size(); ++j) {
        const double s = tc.range.time(j);
        double lo = grid.t_start(), hi = grid.t_end();
        if (set.measure(grid.t_start(), hi) <= s) {
            tc.zeta[j] = hi;
            continue;
        }
        // invariant: rho(lo) <= s < rho(hi)
        for (int it = 0; it < 200; ++it) {
            const double mid = lo + (hi - lo) / 2;
            if (mid <= lo || mid >= hi) break;
            if (set.measure(grid.t_start(), mid) > s) hi = mid;
            else lo = mid;
        }
        tc.zeta[j] = hi;
    }
    return tc;
}

PushforwardCheck check_pushforward(const CensorSet& set, const TimeChange& tc, std::size_t count, Engine& rng) {
    PushforwardCheck c;
    c.intervals = count;
    const double ds = tc.range.dt();
    c.tolerance = 2.0 * ds;
    const auto& g = tc.grid;
    std::uniform_int_distribution<int> lev(1, std::max(1, g.level()));
    for (std::size_t i = 0; i < count; ++i) {
        const int l = lev(rng);
        std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << l) - 1);
        const std::uint64_t k = pick(rng);
        const double w = g.t_end() - g.t_start();
        const double a = g.t_start() + std::ldexp(w * static_cast<double>(k), -l);
        const double b = g.t_start() + std::ldexp(w * static_cast<double>(k + 1), -l);
        std::size_t inside = 0;
        for (std::size_t j = 0; j < tc.range.cells(); ++j) {
            // the cell [s_j, s_j+1] maps into I when both tabulated ends do
            if (tc.zeta[j] >= a && tc.zeta[j + 1] <= b) ++inside;
        }
        const double err = std::abs(static_cast<double>(inside) * ds - set.measure(a, b));
        c.max_error = std::max(c.max_error, err);
        c.passed += err <= c.tolerance;
    }
    c.pass = c.passed == c.intervals;
    return c;
}

GridPath time_changed_censored(const CoupledSample& sample, const TimeChange& tc) {
    if (!(sample.grid == tc.grid)) throw std::invalid_argument("time change built on a different grid");
    GridPath y{tc.range, std::vector<double>(tc.range.nodes())};
    for (std::size_t j = 0; j < y.values.size(); ++j) y.values[j] = sample.censored[tc.grid.nearest(tc.zeta[j])];
    y.values[0] = 0.0;
    return y;
}

double Correspondence::rate() const {
    const auto tot = forward_total + reverse_total;
    return tot ? static_cast<double>(forward_hit + reverse_hit) / static_cast<double>(tot) : 1.0;
}

Correspondence maxima_correspondence(const CoupledSample& sample, const TimeChange& tc, int w, int eta) {
    const GridPath y = time_changed_censored(sample, tc);
    const auto mc = maxima_indices(sample.censored, w);
    const auto my = maxima_indices(y.values, w);
    Correspondence c;
    c.forward_total = mc.size();
    for (auto k : mc) {
        const std::size_t j = tc.range.nearest(tc.rho[k]);
        c.forward_hit += match_node(my, j, eta).has_value();
    }
    c.reverse_total = my.size();
    for (auto j : my) {
        const std::size_t k = tc.grid.nearest(tc.zeta[j]);
        c.reverse_hit += match_node(mc, k, eta).has_value();
    }
    return c;
}

TimeChangeRun run_time_change(const CensorSet& set, const TimeChange& tc, std::size_t replicas,
                              std::size_t checkpoints, int w, int eta, std::uint64_t seed, Exec exec) {
    if (checkpoints == 0 || replicas < 2) throw std::invalid_argument("run_time_change: need checkpoints and >= 2 replicas");
    TimeChangeRun out;
    std::vector<std::size_t> nodes;
    for (std::size_t j = 1; j <= checkpoints; ++j) {
        const std::size_t k = tc.range.nearest(tc.total * static_cast<double>(j) / static_cast<double>(checkpoints + 1));
        nodes.push_back(k);
        out.s.push_back(tc.range.time(k));
    }
    const std::size_t C = nodes.size();
    std::vector<double> sq(replicas * C);
    std::vector<Correspondence> corr(replicas);
    const long long R = static_cast<long long>(replicas);
    auto one = [&](long long r) {
        Engine rng = make_engine(seed, {kTagCoupled, static_cast<std::uint64_t>(tc.grid.level()),
                                        static_cast<std::uint64_t>(r)});
        const CoupledSample smp = draw_coupled(set, tc.grid, rng);
        const GridPath y = time_changed_censored(smp, tc);
        for (std::size_t c = 0; c < C; ++c) sq[r * C + c] = y.values[nodes[c]] * y.values[nodes[c]];
        corr[r] = maxima_correspondence(smp, tc, w, eta);
    };
    if (exec == Exec::Serial) {
        for (long long r = 0; r < R; ++r) one(r);
    } else {
#pragma omp parallel for schedule(dynamic, 4)
        for (long long r = 0; r < R; ++r) one(r);
    }
    for (std::size_t c = 0; c < C; ++c) {
        Estimate e;
        e.label = "second_moment";
        e.proportion = false;
        for (std::size_t r = 0; r < replicas; ++r) e.add(sq[r * C + c]);
        out.within.push_back(std::abs(e.mean() - out.s[c]) <= 3.0 * e.stderr_());
        out.second_moment.push_back(e);
    }
    for (const auto& c : corr) {
        out.corr.forward_total += c.forward_total;
        out.corr.forward_hit += c.forward_hit;
        out.corr.reverse_total += c.reverse_total;
        out.corr.reverse_hit += c.reverse_hit;
    }
    return out;
}

}  // namespace maxstab
