#include "maxstab/signs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxstab {

int SignField::sign_at(std::size_t k) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), k,
                               [](const SignEntry& e, std::size_t x) { return e.index < x; });
    return it != entries.end() && it->index == k ? it->sign : 0;
}

std::vector<std::size_t> SignField::indices() const {
    std::vector<std::size_t> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.index);
    return out;
}

SignField attach_signs(const std::vector<double>& values, int w, Engine& rng) {
    SignField f;
    std::bernoulli_distribution coin(0.5);
    for (auto k : maxima_indices(values, w)) f.entries.push_back({k, coin(rng) ? 1 : -1, Provenance::Original});
    return f;
}

SignField attach_signs(const GridPath& path, int w, Engine& rng) { return attach_signs(path.values, w, rng); }

ConditionalCopy conditional_copy(const CoupledSample& sample, const CensorSet& set, const SignField& field,
                                 const MatchConfig& cfg, Engine& rng) {
    cfg.validate();
    const auto nm = set.node_masses(sample.grid);
    const double cut = cfg.theta_mem * sample.grid.dt();
    std::vector<std::size_t> w_in;
    for (const auto& e : field.entries)
        if (nm[e.index] >= cut) w_in.push_back(e.index);
    ConditionalCopy out{sample.WE, {}, 0};
    std::bernoulli_distribution coin(0.5);
    for (auto k : maxima_indices(sample.WE, cfg.w)) {
        std::optional<std::size_t> m;
        if (nm[k] >= cut) m = match_node(w_in, k, cfg.eta);
        const int fresh = coin(rng) ? 1 : -1;  // drawn for every maximum so streams stay aligned
        if (m) {
            out.field.entries.push_back({k, field.sign_at(*m), Provenance::Original});
            ++out.matched;
        } else {
            out.field.entries.push_back({k, fresh, Provenance::Resampled});
        }
    }
    return out;
}

double evaluate_piece(const Piece& p, const std::vector<double>& incr, std::size_t lo, std::size_t hi) {
    auto delta = [&] {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += incr[i];
        return s;
    };
    switch (p.g) {
        case GKind::Const: return p.a;
        case GKind::ClipExp: return std::min(std::exp(p.a * delta()), p.b);
        case GKind::Indicator: return delta() > p.a ? 1.0 : 0.0;
        case GKind::Custom:
            if (!p.custom) throw std::invalid_argument("custom piece without a function");
            return p.custom(incr, lo, hi);
    }
    return 0.0;
}

namespace {

struct PieceNodes {
    std::size_t lo, hi;          // cell range of the span
    std::size_t sel_lo, sel_hi;  // node range of the selection
};

std::vector<PieceNodes> resolve(const ProductFunctional& f, const TimeGrid& grid) {
    if (f.pieces.empty()) throw std::invalid_argument("functional needs at least one piece");
    auto node = [&](double t) {
        const double x = (t - grid.t_start()) / grid.dt();
        if (x < -1e-9 || x > static_cast<double>(grid.cells()) + 1e-9)
            throw std::invalid_argument("functional piece outside the window");
        return static_cast<std::size_t>(std::llround(x));
    };
    std::vector<PieceNodes> out;
    for (const auto& p : f.pieces) {
        PieceNodes n{node(p.span.lo), node(p.span.hi), node(p.select.lo), node(p.select.hi)};
        if (n.lo >= n.hi) throw std::invalid_argument("functional piece spans no cells");
        if (n.sel_lo < n.lo || n.sel_hi > n.hi || n.sel_hi < n.sel_lo + 2)
            throw std::invalid_argument("selection must lie in its piece and cover >= 2 cells");
        out.push_back(n);
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (out[i + 1].lo < out[i].hi) throw std::invalid_argument("functional pieces overlap");
    return out;
}

}  // namespace

void check_locality(const ProductFunctional& f, const TimeGrid& grid, std::uint64_t seed) {
    const auto nodes = resolve(f, grid);
    Engine rng = make_engine(seed, {kTagFormula, 0xfeedULL});
    std::normal_distribution<double> N(0.0, std::sqrt(grid.dt()));
    std::vector<double> x(grid.cells());
    for (int trial = 0; trial < 4; ++trial) {
        for (auto& v : x) v = N(rng);
        for (std::size_t p = 0; p < nodes.size(); ++p) {
            const double g0 = evaluate_piece(f.pieces[p], x, nodes[p].lo, nodes[p].hi);
            std::vector<double> y = x;
            for (std::size_t i = 0; i < y.size(); ++i)
                if (i < nodes[p].lo || i >= nodes[p].hi) y[i] = N(rng) * 3.0;
            const double g1 = evaluate_piece(f.pieces[p], y, nodes[p].lo, nodes[p].hi);
            if (!(g0 == g1 || (std::isnan(g0) && std::isnan(g1))))
                throw std::invalid_argument("functional piece " + std::to_string(p) +
                                            " depends on increments outside its span");
        }
    }
}

FormulaCheck verify_probability_formula(const CensorSet& set, const ProductFunctional& f, const TimeGrid& grid,
                                        const MatchConfig& cfg, std::size_t replicas, std::uint64_t seed,
                                        Exec exec) {
    cfg.validate();
    if (replicas < 1000) throw std::invalid_argument("verify_probability_formula needs >= 1000 replicas");
    check_locality(f, grid, seed);
    const auto nodes = resolve(f, grid);
    const CellSplit split = split_cells(set, grid, cfg.theta_mem);
    const std::size_t P = nodes.size();
    struct Row {
        double lhs, rhs;
        std::vector<double> piece;
        std::uint32_t in_E, matched;
    };
    std::vector<Row> rows(replicas);
    const auto level = static_cast<std::uint64_t>(grid.level());
    auto one = [&](std::size_t r) {
        Engine rng = make_engine(seed, {kTagFormula, level, r});
        std::normal_distribution<double> N(0.0, 1.0);
        const std::size_t n = grid.cells();
        std::vector<double> dW(n), dWE(n), W(n + 1, 0.0), WE(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = split.sd_in[i] * N(rng);
            const double b = split.sd_out[i] * N(rng);
            const double bp = split.sd_out[i] * N(rng);
            (void)N(rng);
            dW[i] = a + b;
            dWE[i] = a + bp;
            W[i + 1] = W[i] + dW[i];
            WE[i + 1] = WE[i] + dWE[i];
        }
        // copy 1 is W with its own signs; copy 2 is WE with the conditional copy of them
        const SignField s1 = attach_signs(W, cfg.w, rng);
        std::vector<std::size_t> w_in;
        for (const auto& e : s1.entries)
            if (split.node_in[e.index]) w_in.push_back(e.index);
        std::bernoulli_distribution coin(0.5);
        SignField s2;
        Row row{1.0, 1.0, std::vector<double>(P), 0, 0};
        std::vector<std::optional<std::size_t>> matched_to;
        for (auto k : maxima_indices(WE, cfg.w)) {
            std::optional<std::size_t> m;
            if (split.node_in[k]) {
                ++row.in_E;
                m = match_node(w_in, k, cfg.eta);
                row.matched += m.has_value();
            }
            const int fresh = coin(rng) ? 1 : -1;
            s2.entries.push_back({k, m ? s1.sign_at(*m) : fresh, m ? Provenance::Original : Provenance::Resampled});
            matched_to.push_back(m);
        }
        auto matched_of = [&](std::size_t k) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < s2.entries.size(); ++i)
                if (s2.entries[i].index == k) return matched_to[i];
            return std::nullopt;
        };
        for (std::size_t p = 0; p < P; ++p) {
            const auto& pn = nodes[p];
            const double g1 = evaluate_piece(f.pieces[p], dW, pn.lo, pn.hi);
            const double g2 = evaluate_piece(f.pieces[p], dWE, pn.lo, pn.hi);
            const auto t1 = argmax_nodes(W, pn.sel_lo, pn.sel_hi);
            const auto t2 = argmax_nodes(WE, pn.sel_lo, pn.sel_hi);
            const int e1 = t1 ? s1.sign_at(*t1) : 0;
            const int e2 = t2 ? s2.sign_at(*t2) : 0;
            row.lhs *= g1 * e1 * g2 * e2;
            bool same = false;
            if (t1 && t2) {
                const auto m = matched_of(*t2);
                same = m && *m == *t1;
            }
            row.piece[p] = same ? g1 * g2 : 0.0;
            row.rhs *= row.piece[p];
        }
        rows[r] = std::move(row);
    };
    const long long R = static_cast<long long>(replicas);
    if (exec == Exec::Serial) {
        for (long long r = 0; r < R; ++r) one(r);
    } else {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long r = 0; r < R; ++r) one(r);
    }
    FormulaCheck c;
    c.lhs.label = "lhs";
    c.lhs.proportion = false;
    c.rhs.label = "rhs";
    c.rhs.proportion = false;
    c.rhs_pieces.resize(P);
    for (std::size_t p = 0; p < P; ++p) {
        c.rhs_pieces[p].label = "rhs_piece_" + std::to_string(p);
        c.rhs_pieces[p].proportion = false;
    }
    std::uint64_t in_E = 0, matched = 0;
    for (const auto& row : rows) {
        c.lhs.add(row.lhs);
        c.rhs.add(row.rhs);
        for (std::size_t p = 0; p < P; ++p) c.rhs_pieces[p].add(row.piece[p]);
        in_E += row.in_E;
        matched += row.matched;
    }
    c.matched_signs = Estimate::of_proportion("matched_signs", matched, in_E);
    const double se = std::sqrt(c.lhs.stderr_() * c.lhs.stderr_() + c.rhs.stderr_() * c.rhs.stderr_());
    const double diff = std::abs(c.lhs.mean() - c.rhs.mean());
    c.z = se > 0 ? diff / se : (diff == 0 ? 0.0 : INFINITY);
    c.compatible = diff <= 3.0 * se;
    return c;
}

}  // namespace maxstab
