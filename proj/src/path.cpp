#include "maxstab/path.hpp"

#include <cmath>
#include <stdexcept>

namespace maxstab {

TimeGrid::TimeGrid(double t_start, double t_end, int level)
    : t_start_(t_start), t_end_(t_end), level_(level) {
    if (!(t_start < t_end)) throw std::invalid_argument("TimeGrid: t_start must be < t_end");
    if (level < 0 || level > 30) throw std::invalid_argument("TimeGrid: level out of range [0,30]");
    dt_ = std::ldexp(t_end - t_start, -level);
}

double TimeGrid::time(std::size_t k) const {
    if (k == cells()) return t_end_;
    return t_start_ + static_cast<double>(k) * dt_;
}

std::size_t TimeGrid::nearest(double t) const {
    const double x = std::round((t - t_start_) / dt_);
    if (x <= 0) return 0;
    if (x >= static_cast<double>(cells())) return cells();
    return static_cast<std::size_t>(x);
}

GridPath sample_path(const TimeGrid& grid, Engine& rng) {
    std::normal_distribution<double> N(0.0, std::sqrt(grid.dt()));
    GridPath p{grid, std::vector<double>(grid.nodes(), 0.0)};
    for (std::size_t k = 1; k < p.values.size(); ++k) p.values[k] = p.values[k - 1] + N(rng);
    return p;
}

GridPath sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream) {
    Engine rng = make_engine(seed, {kTagPath, stream});
    return sample_path(grid, rng);
}

GridPath refine_bridge(const GridPath& path, int target_level, Engine& rng) {
    const int L = path.grid.level();
    if (target_level < L) throw std::invalid_argument("refine_bridge: target level below current level");
    GridPath cur = path;
    std::normal_distribution<double> N(0.0, 1.0);
    for (int l = L; l < target_level; ++l) {
        TimeGrid fine(cur.grid.t_start(), cur.grid.t_end(), l + 1);
        const double sd = std::sqrt(fine.dt() / 2.0);
        std::vector<double> v(fine.nodes());
        for (std::size_t k = 0; k < cur.values.size(); ++k) v[2 * k] = cur.values[k];
        for (std::size_t k = 0; k + 1 < cur.values.size(); ++k)
            v[2 * k + 1] = 0.5 * (cur.values[k] + cur.values[k + 1]) + sd * N(rng);
        cur = GridPath{fine, std::move(v)};
    }
    return cur;
}

GridPath restrict_to(const GridPath& path, int level) {
    const int L = path.grid.level();
    if (level > L || level < 0) throw std::invalid_argument("restrict_to: level must not exceed path level");
    TimeGrid g(path.grid.t_start(), path.grid.t_end(), level);
    const std::size_t step = std::size_t{1} << (L - level);
    std::vector<double> v(g.nodes());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = path.values[k * step];
    return GridPath{g, std::move(v)};
}

namespace {

bool dominates(const std::vector<double>& v, std::size_t k, int w) {
    const double x = v[k];
    for (int d = 1; d <= w; ++d)
        if (!(x > v[k - d]) || !(x > v[k + d])) return false;
    return true;
}

}  // namespace

std::vector<std::size_t> maxima_indices(const std::vector<double>& v, int w) {
    std::vector<std::size_t> out;
    if (w < 1) throw std::invalid_argument("maxima: w must be >= 1");
    const std::size_t n = v.size();
    if (n < static_cast<std::size_t>(2 * w + 1)) return out;
    for (std::size_t k = w; k + w < n; ++k) {
        // cheap reject on the immediate neighbours first
        if (!(v[k] > v[k - 1]) || !(v[k] > v[k + 1])) continue;
        if (dominates(v, k, w)) out.push_back(k);
    }
    return out;
}

std::vector<MaxRecord> detect_maxima(const GridPath& path, int w, int cap) {
    const std::size_t cells = path.grid.cells();
    if (w < 1 || static_cast<std::size_t>(w) > std::max<std::size_t>(1, cells / 2))
        throw std::invalid_argument("detect_maxima: need 1 <= w <= 2^(L-1)");
    if (cap < w) cap = w;
    std::vector<MaxRecord> out;
    const auto& v = path.values;
    for (std::size_t k : maxima_indices(v, w)) {
        int r = w;
        while (r < cap && k >= static_cast<std::size_t>(r + 1) && k + r + 1 < v.size() &&
               v[k] > v[k - r - 1] && v[k] > v[k + r + 1])
            ++r;
        out.push_back({k, path.grid.time(k), v[k], r, false});
    }
    return out;
}

std::optional<std::size_t> argmax_nodes(const std::vector<double>& v, std::size_t lo, std::size_t hi,
                                        bool* tie) {
    std::size_t best = lo;
    bool tied = false;
    for (std::size_t k = lo + 1; k <= hi; ++k) {
        if (v[k] > v[best]) {
            best = k;
            tied = false;
        } else if (v[k] == v[best]) {
            tied = true;
        }
    }
    if (tie) *tie = tied;
    if (best == lo || best == hi) return std::nullopt;
    return best;
}

std::optional<MaxRecord> argmax_on_interval(const GridPath& path, double a, double b) {
    const auto& g = path.grid;
    if (a > b) std::swap(a, b);
    if (a < g.t_start() || b > g.t_end()) throw std::invalid_argument("argmax_on_interval: interval outside window");
    if (b - a < 2 * g.dt() * (1 - 1e-12)) throw std::invalid_argument("argmax_on_interval: interval shorter than 2 cells");
    const std::size_t lo = static_cast<std::size_t>(std::ceil((a - g.t_start()) / g.dt() - 1e-9));
    const std::size_t hi = static_cast<std::size_t>(std::floor((b - g.t_start()) / g.dt() + 1e-9));
    bool tie = false;
    auto k = argmax_nodes(path.values, lo, std::min(hi, g.cells()), &tie);
    if (!k) return std::nullopt;
    return MaxRecord{*k, g.time(*k), path.values[*k], 1, tie};
}

}  // namespace maxstab
