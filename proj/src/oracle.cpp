#include "maxstab/oracle.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maxstab {

namespace {

struct Walk {
    std::vector<int> s;  // partial sums, s[0] = 0
};

Walk walk_from(const std::vector<int>& x) {
    Walk w{std::vector<int>(x.size() + 1, 0)};
    for (std::size_t i = 0; i < x.size(); ++i) w.s[i + 1] = w.s[i] + x[i];
    return w;
}

std::vector<bool> maxima(const Walk& w) {
    std::vector<bool> m(w.s.size(), false);
    for (std::size_t k = 1; k + 1 < w.s.size(); ++k) m[k] = w.s[k] > w.s[k - 1] && w.s[k] > w.s[k + 1];
    return m;
}

// -1 for NONE: endpoint or tied maximum.
int argmax(const Walk& w, int lo, int hi) {
    int best = lo;
    bool tie = false;
    for (int k = lo + 1; k <= hi; ++k) {
        if (w.s[k] > w.s[best]) {
            best = k;
            tie = false;
        } else if (w.s[k] == w.s[best]) {
            tie = true;
        }
    }
    if (tie || best == lo || best == hi) return -1;
    return best;
}

Rational g_value(const DPiece& p, const Walk& w) {
    const int d = w.s[p.hi] - w.s[p.lo];
    switch (p.g) {
        case DGKind::One: return 1;
        case DGKind::Const: return p.c;
        case DGKind::PosIndicator: return d > 0 ? 1 : 0;
        case DGKind::Affine: return Rational(1) + p.c * d;
        case DGKind::Square: return Rational(d) * d;
    }
    return 0;
}

void validate(const OracleCase& c) {
    if (c.n < 1 || c.n > 6) throw std::invalid_argument("oracle: n_steps must lie in [1,6]");
    if (static_cast<int>(c.E.size()) != c.n) throw std::invalid_argument("oracle: E must list one flag per cell");
    for (const auto& p : c.pieces) {
        if (p.lo < 0 || p.hi > c.n || p.lo >= p.hi) throw std::invalid_argument("oracle: bad piece span");
        if (p.sel_lo < p.lo || p.sel_hi > p.hi || p.sel_hi < p.sel_lo + 2)
            throw std::invalid_argument("oracle: bad selection range");
    }
}

// Node k lies in E when at least half of its centred cell does.
std::vector<bool> node_in(const OracleCase& c) {
    std::vector<bool> in(c.n + 1, false);
    for (int k = 1; k < c.n; ++k) in[k] = c.E[k - 1] || c.E[k];
    return in;
}

std::vector<int> bits(std::uint32_t code, int n) {
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = (code >> i) & 1 ? 1 : -1;
    return x;
}

}  // namespace

OracleResult brute_force_oracle(const OracleCase& c) {
    validate(c);
    const int n = c.n;
    const auto inE = node_in(c);
    Rational lhs_sum = 0, rhs_sum = 0;
    std::uint64_t outcomes = 0;
    for (std::uint32_t cx = 0; cx < (1u << n); ++cx) {
        for (std::uint32_t cy = 0; cy < (1u << n); ++cy) {
            const auto x = bits(cx, n), xp = bits(cy, n);
            std::vector<int> xe(n);
            for (int i = 0; i < n; ++i) xe[i] = c.E[i] ? x[i] : xp[i];
            const Walk W = walk_from(x), WE = walk_from(xe);
            const auto m1 = maxima(W), m2 = maxima(WE);
            // sign slots: one per W maximum, one per unmatched WE maximum
            std::vector<int> slot1(n + 1, -1), slot2(n + 1, -1);
            int slots = 0;
            for (int k = 0; k <= n; ++k)
                if (m1[k]) slot1[k] = slots++;
            for (int k = 0; k <= n; ++k) {
                if (!m2[k]) continue;
                const bool matched = inE[k] && m1[k];
                slot2[k] = matched ? slot1[k] : slots++;
            }
            std::vector<int> t1, t2;
            std::vector<Rational> gg;
            Rational rhs_term = 1;
            for (const auto& p : c.pieces) {
                t1.push_back(argmax(W, p.sel_lo, p.sel_hi));
                t2.push_back(argmax(WE, p.sel_lo, p.sel_hi));
                gg.push_back(g_value(p, W) * g_value(p, WE));
                const bool same = t1.back() >= 0 && t1.back() == t2.back() && inE[t1.back()];
                rhs_term *= same ? gg.back() : Rational(0);
            }
            rhs_sum += rhs_term;
            // explicit sum over all sign assignments
            Rational lhs_inner = 0;
            for (std::uint32_t cs = 0; cs < (1u << slots); ++cs) {
                Rational term = 1;
                for (std::size_t p = 0; p < c.pieces.size() && term != 0; ++p) {
                    const int a = t1[p] >= 0 ? ((cs >> slot1[t1[p]]) & 1 ? 1 : -1) : 0;
                    const int b = t2[p] >= 0 ? ((cs >> slot2[t2[p]]) & 1 ? 1 : -1) : 0;
                    term *= gg[p] * (a * b);
                }
                lhs_inner += term;
                ++outcomes;
            }
            lhs_sum += lhs_inner / Rational(1u << slots);
        }
    }
    const Rational pairs = Rational(std::uint64_t{1} << (2 * n));
    return {lhs_sum / pairs, rhs_sum / pairs, outcomes};
}

OracleMC oracle_monte_carlo(const OracleCase& c, std::size_t samples, std::uint64_t seed) {
    validate(c);
    const int n = c.n;
    const auto inE = node_in(c);
    Engine rng = make_engine(seed, {kTagCalibration, 0x0a11ULL});
    std::bernoulli_distribution coin(0.5);
    OracleMC out;
    out.lhs.label = "lhs";
    out.lhs.proportion = false;
    out.rhs.label = "rhs";
    out.rhs.proportion = false;
    auto to_d = [](const Rational& r) { return static_cast<double>(r); };
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<int> x(n), xe(n);
        for (int i = 0; i < n; ++i) x[i] = coin(rng) ? 1 : -1;
        for (int i = 0; i < n; ++i) {
            const int y = coin(rng) ? 1 : -1;
            xe[i] = c.E[i] ? x[i] : y;
        }
        const Walk W = walk_from(x), WE = walk_from(xe);
        const auto m1 = maxima(W), m2 = maxima(WE);
        std::vector<int> e1(n + 1, 0), e2(n + 1, 0);
        for (int k = 0; k <= n; ++k)
            if (m1[k]) e1[k] = coin(rng) ? 1 : -1;
        for (int k = 0; k <= n; ++k) {
            if (!m2[k]) continue;
            const int fresh = coin(rng) ? 1 : -1;
            e2[k] = inE[k] && m1[k] ? e1[k] : fresh;
        }
        double l = 1, r = 1;
        for (const auto& p : c.pieces) {
            const int a = argmax(W, p.sel_lo, p.sel_hi), b = argmax(WE, p.sel_lo, p.sel_hi);
            const double gg = to_d(g_value(p, W) * g_value(p, WE));
            l *= gg * (a >= 0 ? e1[a] : 0) * (b >= 0 ? e2[b] : 0);
            r *= (a >= 0 && a == b && inE[a]) ? gg : 0.0;
        }
        out.lhs.add(l);
        out.rhs.add(r);
    }
    return out;
}

OracleCase parse_oracle_case(const std::string& line) {
    // case <id> n=<n> E=<bits> pieces=<lo:hi:g:c:sel_lo:sel_hi>[;...] [rhs=<p/q>]
    std::istringstream is(line);
    std::string word;
    OracleCase c;
    is >> word;
    if (word != "case") throw std::runtime_error("oracle fixture: expected 'case'");
    is >> c.id;
    while (is >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw std::runtime_error("oracle fixture: bad token '" + word + "'");
        const std::string key = word.substr(0, eq), val = word.substr(eq + 1);
        if (key == "n") {
            c.n = std::stoi(val);
        } else if (key == "E") {
            for (char ch : val) c.E.push_back(ch == '1');
        } else if (key == "pieces") {
            std::istringstream ps(val);
            std::string item;
            while (std::getline(ps, item, ';')) {
                std::istringstream fs(item);
                std::string f[6];
                for (auto& s : f)
                    if (!std::getline(fs, s, ':')) throw std::runtime_error("oracle fixture: bad piece '" + item + "'");
                DPiece p;
                p.lo = std::stoi(f[0]);
                p.hi = std::stoi(f[1]);
                if (f[2] == "one") p.g = DGKind::One;
                else if (f[2] == "const") p.g = DGKind::Const;
                else if (f[2] == "pos") p.g = DGKind::PosIndicator;
                else if (f[2] == "affine") p.g = DGKind::Affine;
                else if (f[2] == "square") p.g = DGKind::Square;
                else throw std::runtime_error("oracle fixture: unknown g '" + f[2] + "'");
                p.c = Rational(f[3]);
                p.sel_lo = std::stoi(f[4]);
                p.sel_hi = std::stoi(f[5]);
                c.pieces.push_back(p);
            }
        } else if (key == "rhs") {
            c.has_expected = true;
            c.expected_rhs = Rational(val);
        } else {
            throw std::runtime_error("oracle fixture: unknown key '" + key + "'");
        }
    }
    return c;
}

std::vector<OracleCase> read_oracle_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open oracle fixture " + path);
    std::string line;
    std::vector<OracleCase> out;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# oracle-matrix v1", 0) == 0) header = true;
            continue;
        }
        out.push_back(parse_oracle_case(line));
    }
    if (!header) throw std::runtime_error("oracle fixture: missing '# oracle-matrix v1' header");
    return out;
}

}  // namespace maxstab
