#include "maxstab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <omp.h>

namespace maxstab {

void MatchConfig::validate() const {
    if (eta < 0) throw std::invalid_argument("match tolerance eta must be >= 0");
    if (!(theta_mem > 0 && theta_mem <= 1)) throw std::invalid_argument("theta_mem must lie in (0,1]");
    if (w < 1) throw std::invalid_argument("robustness w must be >= 1");
}

CellSplit split_cells(const CensorSet& set, const TimeGrid& grid, double theta_mem) {
    const Interval win = set.window();
    if (grid.t_start() < win.lo || grid.t_end() > win.hi)
        throw std::invalid_argument("grid window must lie inside the set window");
    CellSplit s{grid, set.cell_masses(grid), {}, {}, {}, 0};
    const double dt = grid.dt();
    s.sd_in.resize(s.mass.size());
    s.sd_out.resize(s.mass.size());
    for (std::size_t i = 0; i < s.mass.size(); ++i) {
        s.sd_in[i] = std::sqrt(s.mass[i]);
        s.sd_out[i] = std::sqrt(std::max(0.0, dt - s.mass[i]));
    }
    const auto nm = set.node_masses(grid);
    s.node_in.resize(nm.size());
    for (std::size_t k = 0; k < nm.size(); ++k) {
        s.node_in[k] = nm[k] >= theta_mem * dt;
        s.nodes_in += s.node_in[k];
    }
    return s;
}

CoupledSample draw_coupled(const CensorSet& set, const TimeGrid& grid, Engine& rng) {
    const CellSplit s = split_cells(set, grid, 0.5);
    const std::size_t n = grid.cells();
    CoupledSample c{grid, {}, {}, {}, {}, {}, {}};
    for (auto* v : {&c.W, &c.Wprime, &c.censored, &c.WE, &c.comp, &c.comp_prime}) v->assign(n + 1, 0.0);
    std::normal_distribution<double> N(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = s.sd_in[i] * N(rng);
        const double b = s.sd_out[i] * N(rng);
        const double bp = s.sd_out[i] * N(rng);
        const double ap = s.sd_in[i] * N(rng);
        c.censored[i + 1] = c.censored[i] + a;
        c.comp[i + 1] = c.comp[i] + b;
        c.comp_prime[i + 1] = c.comp_prime[i] + bp;
        c.W[i + 1] = c.W[i] + (a + b);
        c.WE[i + 1] = c.WE[i] + (a + bp);
        c.Wprime[i + 1] = c.Wprime[i] + (ap + bp);
    }
    return c;
}

std::optional<std::size_t> match_node(const std::vector<std::size_t>& ref, std::size_t k, int eta) {
    auto it = std::lower_bound(ref.begin(), ref.end(), k);
    if (it != ref.end() && *it == k) return k;
    std::optional<std::size_t> best;
    std::size_t best_d = static_cast<std::size_t>(eta) + 1;
    if (it != ref.begin()) {
        const std::size_t d = k - *(it - 1);
        if (d < best_d) {
            best = *(it - 1);
            best_d = d;
        }
    }
    if (it != ref.end()) {
        const std::size_t d = *it - k;
        if (d < best_d) best = *it;  // strict: the left neighbour wins ties
    }
    return best;
}

FractionCounts& FractionCounts::operator+=(const FractionCounts& o) {
    w_in_E += o.w_in_E;
    shared += o.shared;
    contained += o.contained;
    censored_max += o.censored_max;
    censored_hit += o.censored_hit;
    we_in_E += o.we_in_E;
    we_shared += o.we_shared;
    return *this;
}

namespace {

FractionCounts count_one(const CellSplit& s, const MatchConfig& cfg, Engine& rng, std::vector<double>& W,
                         std::vector<double>& WE, std::vector<double>& C) {
    const std::size_t n = s.grid.cells();
    std::normal_distribution<double> N(0.0, 1.0);
    W[0] = WE[0] = C[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = s.sd_in[i] * N(rng);
        const double b = s.sd_out[i] * N(rng);
        const double bp = s.sd_out[i] * N(rng);
        (void)N(rng);  // A' keeps the stream aligned with draw_coupled
        C[i + 1] = C[i] + a;
        W[i + 1] = W[i] + (a + b);
        WE[i + 1] = WE[i] + (a + bp);
    }
    auto in_E = [&](std::vector<std::size_t> v) {
        v.erase(std::remove_if(v.begin(), v.end(), [&](std::size_t k) { return !s.node_in[k]; }), v.end());
        return v;
    };
    const auto mw = in_E(maxima_indices(W, cfg.w));
    const auto me = in_E(maxima_indices(WE, cfg.w));
    const auto mc = maxima_indices(C, cfg.w);
    FractionCounts f;
    f.w_in_E = mw.size();
    f.we_in_E = me.size();
    f.censored_max = mc.size();
    for (auto k : mw) {
        f.shared += match_node(me, k, cfg.eta).has_value();
        f.contained += match_node(mc, k, cfg.eta).has_value();
    }
    for (auto k : me) f.we_shared += match_node(mw, k, cfg.eta).has_value();
    for (auto k : mc) f.censored_hit += match_node(mw, k, cfg.eta).has_value();
    return f;
}

FractionCounts reduce(const std::vector<FractionCounts>& per) {
    FractionCounts t;
    for (const auto& f : per) t += f;
    return t;
}

}  // namespace

FractionCounts fraction_counts(const CellSplit& split, const MatchConfig& cfg, std::size_t replicas,
                               std::uint64_t seed, Exec exec) {
    cfg.validate();
    const auto level = static_cast<std::uint64_t>(split.grid.level());
    const std::size_t nodes = split.grid.nodes();
    std::vector<FractionCounts> per(replicas);
    const long long R = static_cast<long long>(replicas);
    if (exec == Exec::Serial) {
        std::vector<double> W(nodes), WE(nodes), C(nodes);
        for (long long r = 0; r < R; ++r) {
            Engine rng = make_engine(seed, {kTagCoupled, level, static_cast<std::uint64_t>(r)});
            per[r] = count_one(split, cfg, rng, W, WE, C);
        }
    } else {
#pragma omp parallel
        {
            std::vector<double> W(nodes), WE(nodes), C(nodes);
#pragma omp for schedule(dynamic, 4)
            for (long long r = 0; r < R; ++r) {
                Engine rng = make_engine(seed, {kTagCoupled, level, static_cast<std::uint64_t>(r)});
                per[r] = count_one(split, cfg, rng, W, WE, C);
            }
        }
    }
    return reduce(per);
}

FractionCounts fraction_counts_reference(const CensorSet& set, const TimeGrid& grid, const MatchConfig& cfg,
                                         std::size_t replicas, std::uint64_t seed) {
    cfg.validate();
    const auto nm = set.node_masses(grid);
    auto in_E = [&](std::size_t k) { return nm[k] >= cfg.theta_mem * grid.dt(); };
    auto near = [&](const std::vector<std::size_t>& ref, std::size_t k) {
        for (auto j : ref) {
            const std::size_t d = j > k ? j - k : k - j;
            if (d <= static_cast<std::size_t>(cfg.eta)) return true;
        }
        return false;
    };
    auto idx = [&](const GridPath& p, bool only_E) {
        std::vector<std::size_t> out;
        if (p.values.size() < static_cast<std::size_t>(2 * cfg.w + 1)) return out;
        for (const auto& m : detect_maxima(p, cfg.w))
            if (!only_E || in_E(m.index)) out.push_back(m.index);
        return out;
    };
    FractionCounts t;
    for (std::size_t r = 0; r < replicas; ++r) {
        Engine rng = make_engine(seed, {kTagCoupled, static_cast<std::uint64_t>(grid.level()), r});
        const CoupledSample c = draw_coupled(set, grid, rng);
        const auto mw = idx({grid, c.W}, true);
        const auto me = idx({grid, c.WE}, true);
        const auto mc = idx({grid, c.censored}, false);
        t.w_in_E += mw.size();
        t.we_in_E += me.size();
        t.censored_max += mc.size();
        for (auto k : mw) {
            t.shared += near(me, k);
            t.contained += near(mc, k);
        }
        for (auto k : me) t.we_shared += near(mw, k);
        for (auto k : mc) t.censored_hit += near(mw, k);
    }
    return t;
}

Estimate shared_maxima_fraction(const CensorSet& set, const TimeGrid& grid, const MatchConfig& cfg,
                                std::size_t replicas, std::uint64_t seed, Exec exec) {
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    const auto f = fraction_counts(split_cells(set, grid, cfg.theta_mem), cfg, replicas, seed, exec);
    return Estimate::of_proportion("shared", f.shared, f.w_in_E);
}

Containment censored_maxima_containment(const CensorSet& set, const TimeGrid& grid, const MatchConfig& cfg,
                                        std::size_t replicas, std::uint64_t seed, Exec exec) {
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    const auto f = fraction_counts(split_cells(set, grid, cfg.theta_mem), cfg, replicas, seed, exec);
    return {Estimate::of_proportion("contained", f.contained, f.w_in_E),
            Estimate::of_proportion("dual", f.censored_hit, f.censored_max)};
}

MatchProb maximizer_match_prob(const CensorSet& set, Interval ab, const std::optional<CensorSet>& G,
                               const TimeGrid& grid, const MatchConfig& cfg, std::size_t replicas,
                               std::uint64_t seed, Exec exec) {
    cfg.validate();
    if (ab.lo > ab.hi) std::swap(ab.lo, ab.hi);
    if (ab.lo < grid.t_start() || ab.hi > grid.t_end()) throw std::invalid_argument("interval outside window");
    const CellSplit s = split_cells(set, grid, cfg.theta_mem);
    std::vector<char> in_G(grid.nodes(), 1);
    if (G) {
        const auto gm = G->node_masses(grid);
        for (std::size_t k = 0; k < in_G.size(); ++k) in_G[k] = gm[k] >= cfg.theta_mem * grid.dt();
    }
    const std::size_t lo = static_cast<std::size_t>(std::ceil((ab.lo - grid.t_start()) / grid.dt() - 1e-9));
    const std::size_t hi = std::min(grid.cells(),
                                    static_cast<std::size_t>(std::floor((ab.hi - grid.t_start()) / grid.dt() + 1e-9)));
    if (hi < lo + 2) throw std::invalid_argument("interval shorter than 2 cells");
    struct Out {
        char hit, none_w, none_we;
    };
    std::vector<Out> per(replicas);
    const auto level = static_cast<std::uint64_t>(grid.level());
    auto one = [&](std::size_t r, std::vector<double>& W, std::vector<double>& WE) {
        Engine rng = make_engine(seed, {kTagMatch, level, r});
        std::normal_distribution<double> N(0.0, 1.0);
        W[0] = WE[0] = 0.0;
        for (std::size_t i = 0; i < grid.cells(); ++i) {
            const double a = s.sd_in[i] * N(rng);
            const double b = s.sd_out[i] * N(rng);
            const double bp = s.sd_out[i] * N(rng);
            (void)N(rng);
            W[i + 1] = W[i] + (a + b);
            WE[i + 1] = WE[i] + (a + bp);
        }
        const auto t = argmax_nodes(W, lo, hi);
        const auto te = argmax_nodes(WE, lo, hi);
        Out o{0, !t, !te};
        if (t && te && s.node_in[*t] && s.node_in[*te] && in_G[*t]) {
            const std::size_t d = *t > *te ? *t - *te : *te - *t;
            o.hit = d <= static_cast<std::size_t>(cfg.eta);
        }
        per[r] = o;
    };
    const long long R = static_cast<long long>(replicas);
    if (exec == Exec::Serial) {
        std::vector<double> W(grid.nodes()), WE(grid.nodes());
        for (long long r = 0; r < R; ++r) one(r, W, WE);
    } else {
#pragma omp parallel
        {
            std::vector<double> W(grid.nodes()), WE(grid.nodes());
#pragma omp for schedule(dynamic, 16)
            for (long long r = 0; r < R; ++r) one(r, W, WE);
        }
    }
    MatchProb m;
    std::uint64_t hits = 0;
    for (const auto& o : per) {
        hits += o.hit;
        m.none_W += o.none_w;
        m.none_WE += o.none_we;
    }
    m.estimate = Estimate::of_proportion("match", hits, replicas);
    return m;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "STABLE";
        case Verdict::Unstable: return "UNSTABLE";
        case Verdict::Negligible: return "NEGLIGIBLE";
        case Verdict::Undecided: return "UNDECIDED";
    }
    return "?";
}

int LadderProtocol::window_for(int level) const {
    const int base = L0 >= 0 ? L0 : levels.front();
    const double w = w0 * std::pow(2.0, growth * (level - base));
    return std::max(1, static_cast<int>(std::lround(w)));
}

std::vector<LevelEvidence> run_ladder(const CensorSet& set, const LadderProtocol& p, Exec exec) {
    if (p.levels.empty()) throw std::invalid_argument("ladder needs at least one level");
    std::vector<LevelEvidence> out;
    for (int L : p.levels) {
        TimeGrid grid(p.window.lo, p.window.hi, L);
        MatchConfig cfg{p.eta, p.theta_mem, p.window_for(L)};
        const CellSplit split = split_cells(set, grid, p.theta_mem);
        LevelEvidence e;
        e.level = L;
        e.w = cfg.w;
        e.nodes_in_E = split.nodes_in;
        if (split.nodes_in > 0) e.counts = fraction_counts(split, cfg, p.replicas, p.seed, exec);
        const std::string tag = "L" + std::to_string(L);
        e.shared = Estimate::of_proportion("shared", e.counts.shared, e.counts.w_in_E);
        e.contained = Estimate::of_proportion("contained", e.counts.contained, e.counts.w_in_E);
        e.dual = Estimate::of_proportion("dual", e.counts.censored_hit, e.counts.censored_max);
        out.push_back(e);
    }
    return out;
}

Verdict verdict_from(const TrendReport& t, const LadderProtocol& p) {
    const double top = t.points.back().mean();
    if (t.verdict == Trend::Increasing && top >= p.stable_threshold) return Verdict::Stable;
    if (t.verdict == Trend::Flat && top >= p.flat_stable_threshold) return Verdict::Stable;
    if (t.verdict == Trend::Decreasing && top <= p.unstable_threshold) return Verdict::Unstable;
    return Verdict::Undecided;
}

Classification classify_set(const CensorSet& set, const LadderProtocol& p, Exec exec) {
    Classification c;
    c.measure = set.measure(p.window.lo, p.window.hi);
    if (!(c.measure > 0)) {
        c.verdict = c.by_shared = c.by_containment = Verdict::Negligible;
        c.reason = "set has zero measure in the window";
        return c;
    }
    c.levels = run_ladder(set, p, exec);
    std::uint64_t total = 0;
    for (const auto& e : c.levels) total += e.counts.w_in_E;
    if (total == 0) {
        c.verdict = c.by_shared = c.by_containment = Verdict::Negligible;
        c.reason = "no maxima landed in E at any level";
        return c;
    }
    if (c.levels.size() < 3) {
        c.reason = "ladder shorter than 3 levels";
        return c;
    }
    std::vector<double> params;
    std::vector<Estimate> sh, co, du;
    for (const auto& e : c.levels) {
        params.push_back(e.level);
        sh.push_back(e.shared);
        co.push_back(e.contained);
        du.push_back(e.dual);
    }
    c.shared_trend = trend(params, sh);
    c.contained_trend = trend(params, co);
    c.dual_trend = trend(params, du);
    c.by_shared = verdict_from(*c.shared_trend, p);
    c.by_containment = verdict_from(*c.contained_trend, p);
    std::ostringstream os;
    os << "shared " << to_string(c.shared_trend->verdict) << " top " << sh.back().mean() << "; contained "
       << to_string(c.contained_trend->verdict) << " top " << co.back().mean();
    if (c.by_shared == c.by_containment) {
        c.verdict = c.by_shared;
    } else {
        c.verdict = Verdict::Undecided;
        os << "; estimators disagree";
    }
    c.reason = os.str();
    return c;
}

}  // namespace maxstab
