#include "maxstab/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/zeta.hpp>

#include "maxstab/rng.hpp"

namespace maxstab {

std::uint64_t AtomTower::atom_of(double x, int n) {
    const double top = std::ldexp(1.0, n);
    const double i = std::floor(x * top);
    return static_cast<std::uint64_t>(std::clamp(i, 0.0, top - 1.0));
}

double PruningPreset::p(int n) const {
    if (n < 1) return 0.0;
    if (mode == PresetMode::SchemeA) return std::min(1.0, p_a * std::pow(static_cast<double>(n), -p_q));
    // 1 - zeta^(2^-n), written to keep precision for tiny values
    return -std::expm1(std::ldexp(std::log(zeta(n)), -n));
}

double PruningPreset::c(int n) const {
    return std::ceil(std::pow(static_cast<double>(n), c_q) * std::log(n + 1.0));
}

double PruningPreset::zeta(int n) const { return std::pow(static_cast<double>(n), -zeta_q); }

PruningPreset shipped_preset() { return PruningPreset{}; }

double delta_m(const PruningPreset& preset, int m) {
    if (preset.mode != PresetMode::SchemeA) throw std::invalid_argument("delta_m is defined for mode A presets");
    if (!(preset.p_q > 1)) return INFINITY;
    double head = 0.0;
    for (int n = 1; n < std::max(m, 1); ++n) head += std::pow(static_cast<double>(n), -preset.p_q);
    const double s = preset.p_a * (boost::math::zeta(preset.p_q) - head);
    return std::sqrt(std::max(0.0, s));
}

PresetValidation validate_preset(const PruningPreset& pr) {
    if (pr.n_max < 2 || pr.n_max > 62) throw std::invalid_argument("n_max must lie in [2,62]");
    if (pr.m < 1) throw std::invalid_argument("start level m must be >= 1");
    PresetValidation v;
    const int N = pr.n_max;
    if (pr.mode == PresetMode::SchemeA) {
        if (!(pr.p_a > 0) || !(pr.p_q > 0) || !(pr.c_q > 0))
            throw std::invalid_argument("unsupported sequence family: need a, q, c_q > 0");
        const double a = pr.p_a, q = pr.p_q;
        Condition s{"sum_p_finite", q > 1, 0, 0, 0, ""};
        for (int n = 1; n <= N; ++n) s.partial += pr.p(n);
        if (q > 1) {
            s.tail_lo = a * std::pow(N + 1.0, 1 - q) / (q - 1);
            s.tail_hi = a * std::pow(static_cast<double>(N), 1 - q) / (q - 1);
        } else {
            s.tail_lo = s.tail_hi = INFINITY;
        }
        s.note = "partial sum to n_max plus integral tail bounds";
        v.conditions.push_back(s);

        Condition d{"delta_summable", q > 3, 0, 0, 0, ""};
        v.delta.assign(N + 1, 0.0);
        for (int m = 1; m <= N; ++m) {
            v.delta[m] = delta_m(pr, m);
            d.partial += v.delta[m];
        }
        if (q > 3) {
            // delta_m <= sqrt(a (m-1)^(1-q) / (q-1)), integrated past n_max
            const double k = std::sqrt(a / (q - 1));
            d.tail_lo = 0.0;
            d.tail_hi = k * std::pow(N - 1.0, (3 - q) / 2) / ((q - 3) / 2);
        } else {
            d.tail_lo = d.tail_hi = INFINITY;
        }
        d.note = "delta_m ~ m^((1-q)/2) is summable iff q > 3";
        v.conditions.push_back(d);

        Condition z{"survival_to_zero", false, 0, 0, 0, ""};
        std::vector<double> seq(N + 1);
        for (int n = 1; n <= N; ++n) seq[n] = std::pow(1.0 - std::min(pr.p(n), 1.0), pr.c(n));
        bool mono = true;
        for (int n = std::max(2, N / 2); n < N; ++n) mono = mono && seq[n + 1] <= seq[n];
        z.partial = seq[N];
        // c(n) p(n) >= a n^(c_q - q) log(n+1) grows without bound iff c_q >= q
        z.pass = pr.c_q >= q && mono && seq[N] < 1.0;
        z.note = "value at n_max in 'partial'; monotone over the upper half of the ladder";
        v.conditions.push_back(z);
    } else {
        if (!(pr.zeta_q > 0)) throw std::invalid_argument("unsupported sequence family: need zeta exponent > 0");
        const double q = pr.zeta_q;
        Condition mono{"zeta_decreasing_to_zero", q > 0, 0, 0, 0, "zeta(n) = n^-q"};
        v.conditions.push_back(mono);
        Condition s{"sum_one_minus_zeta_pow_zeta", q > 1, 0, 0, 0, ""};
        for (int n = 1; n <= N; ++n) {
            const double zn = pr.zeta(n);
            s.partial += -std::expm1(zn * std::log(zn));
        }
        if (q > 1) {
            const double Nd = N;
            s.tail_lo = 0.0;
            s.tail_hi = q * std::pow(Nd, 1 - q) * (std::log(Nd) / (q - 1) + 1 / ((q - 1) * (q - 1)));
        } else {
            s.tail_lo = s.tail_hi = INFINITY;
        }
        s.note = "1 - z^z <= -z log z, integrated past n_max";
        v.conditions.push_back(s);
    }
    v.pass = std::all_of(v.conditions.begin(), v.conditions.end(), [](const Condition& c) { return c.pass; });
    return v;
}

bool atom_pruned(const PruningPreset& preset, std::uint64_t seed, std::uint64_t run, int n, std::uint64_t atom) {
    const double u = hash_uniform(stream_key(seed, {kTagPrune, run, static_cast<std::uint64_t>(n), atom}));
    return u < preset.p(n);
}

bool PruneMemo::pruned(int n, std::uint64_t atom) {
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 58) | atom;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const bool v = atom_pruned(preset_, seed_, run_, n, atom);
    memo_.emplace(key, v);
    return v;
}

std::vector<std::vector<std::uint64_t>> occupied_atoms(const OccupancyProfile& p, int n_max) {
    std::vector<std::vector<std::uint64_t>> out(n_max + 1);
    if (p.kind == ProfileKind::FinitePoints) {
        for (int n = 0; n <= n_max; ++n) {
            for (double x : p.points) out[n].push_back(AtomTower::atom_of(x, n));
            std::sort(out[n].begin(), out[n].end());
            out[n].erase(std::unique(out[n].begin(), out[n].end()), out[n].end());
        }
        return out;
    }
    const int r = p.reserve_level;
    if (r < 0 || r > n_max) throw std::invalid_argument("growth profile reserve level out of range");
    for (int n = 0; n <= r; ++n) out[n] = {p.reserve_index >> (r - n)};
    Engine rng = make_engine(p.placement_seed, {kTagPrune, 0x9a9aULL});
    for (int n = r + 1; n <= n_max; ++n) {
        const auto& prev = out[n - 1];
        const double fn = n < static_cast<int>(p.f.size()) ? p.f[n] : p.f.back();
        const double room = std::ldexp(1.0, n - r);
        const double want = std::min({fn, room, 2.0 * static_cast<double>(prev.size())});
        const std::size_t K = std::max(prev.size(), static_cast<std::size_t>(want));
        // keep one child per parent, then add siblings at random
        std::vector<std::uint64_t> chosen, spare;
        chosen.reserve(K);
        std::bernoulli_distribution coin(0.5);
        for (auto a : prev) {
            const bool right = coin(rng);
            chosen.push_back(2 * a + right);
            spare.push_back(2 * a + !right);
        }
        std::size_t extra = K - prev.size();
        for (std::size_t i = 0; i < extra; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, spare.size() - 1);
            std::swap(spare[i], spare[pick(rng)]);
            chosen.push_back(spare[i]);
        }
        std::sort(chosen.begin(), chosen.end());
        out[n] = std::move(chosen);
    }
    return out;
}

std::vector<std::uint64_t> occupancy_counts(const OccupancyProfile& p, int n_max) {
    const auto atoms = occupied_atoms(p, n_max);
    std::vector<std::uint64_t> K(n_max + 1);
    for (int n = 0; n <= n_max; ++n) K[n] = atoms[n].size();
    return K;
}

namespace {

template <class Draw>
std::vector<char> scan_levels(const std::vector<std::vector<std::uint64_t>>& atoms, Draw&& pruned, int n_max) {
    std::vector<char> s(n_max + 2, 1);
    // the highest pruned level decides every start level at or below it
    for (int n = n_max; n >= 1; --n) {
        bool hit = false;
        for (auto a : atoms[n])
            if (pruned(n, a)) {
                hit = true;
                break;
            }
        if (hit) {
            for (int m = 1; m <= n; ++m) s[m] = 0;
            break;
        }
    }
    s[0] = s[1];
    return s;
}

}  // namespace

std::vector<char> survival_record(const std::vector<std::vector<std::uint64_t>>& atoms, PruneMemo& memo, int n_max) {
    return scan_levels(atoms, [&](int n, std::uint64_t a) { return memo.pruned(n, a); }, n_max);
}

std::vector<char> survival_record_direct(const std::vector<std::vector<std::uint64_t>>& atoms,
                                         const PruningPreset& preset, std::uint64_t seed, std::uint64_t run,
                                         int n_max) {
    return scan_levels(atoms, [&](int n, std::uint64_t a) { return atom_pruned(preset, seed, run, n, a); }, n_max);
}

std::vector<char> survival_record_eager(const std::vector<std::vector<std::uint64_t>>& atoms,
                                        const PruningPreset& preset, std::uint64_t seed, std::uint64_t run,
                                        int n_max) {
    // materialise every atom of every level, then read the occupied ones
    std::vector<std::vector<char>> all(n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        all[n].resize(std::size_t{1} << n);
        for (std::uint64_t i = 0; i < all[n].size(); ++i) all[n][i] = atom_pruned(preset, seed, run, n, i);
    }
    std::vector<char> bad(n_max + 2, 0);
    for (int n = 1; n <= n_max; ++n)
        for (auto a : atoms[n]) bad[n] = bad[n] || all[n][a];
    std::vector<char> s(n_max + 2, 1);
    for (int m = n_max; m >= 1; --m) s[m] = s[m + 1] && !bad[m];
    s[0] = s[1];
    return s;
}

Estimate SurvivalStats::survival(std::size_t config, int m) const {
    return Estimate::of_proportion(labels[config], survive.at(config).at(m), runs);
}

double survival_oracle(const PruningPreset& preset, const std::vector<std::uint64_t>& K, int m) {
    double logs = 0.0;
    for (int n = std::max(m, 1); n <= preset.n_max && n < static_cast<int>(K.size()); ++n) {
        const double p = preset.p(n);
        if (p >= 1.0) return 0.0;
        logs += static_cast<double>(K[n]) * std::log1p(-p);
    }
    return std::exp(logs);
}

namespace {

bool is_singleton(const OccupancyProfile& p) { return p.kind == ProfileKind::FinitePoints && p.points.size() == 1; }

}  // namespace

SurvivalStats run_pruning(const std::vector<OccupancyProfile>& population, const PruningPreset& preset,
                          std::size_t runs, std::uint64_t seed, Exec exec) {
    const int N = preset.n_max;
    if (preset.mode == PresetMode::SchemeA) {
        for (const auto& p : population) {
            if (p.kind != ProfileKind::Growth) continue;
            for (int n = preset.m; n <= N; ++n) {
                const double fn = n < static_cast<int>(p.f.size()) ? p.f[n] : p.f.back();
                if (fn < preset.c(n))
                    throw std::invalid_argument("growth profile '" + p.label + "' violates f(n) >= c(n) at n = " +
                                                std::to_string(n));
            }
        }
    }
    SurvivalStats st;
    st.n_max = N;
    st.runs = runs;
    std::vector<std::vector<std::vector<std::uint64_t>>> atoms;
    std::vector<std::size_t> singles;
    for (std::size_t c = 0; c < population.size(); ++c) {
        st.labels.push_back(population[c].label.empty() ? "config_" + std::to_string(c) : population[c].label);
        atoms.push_back(occupied_atoms(population[c], N));
        if (is_singleton(population[c])) singles.push_back(c);
    }
    st.singletons = singles.size();
    // records[run][config] = survives_from bitmap
    std::vector<std::vector<std::vector<char>>> records(runs);
    const long long R = static_cast<long long>(runs);
    auto one = [&](long long run) {
        PruneMemo memo(preset, seed, static_cast<std::uint64_t>(run));
        auto& rec = records[run];
        rec.reserve(population.size());
        for (std::size_t c = 0; c < atoms.size(); ++c) {
            // growth profiles sit in reserved atoms, so caching their draws buys nothing
            if (population[c].kind == ProfileKind::Growth)
                rec.push_back(survival_record_direct(atoms[c], preset, seed, static_cast<std::uint64_t>(run), N));
            else
                rec.push_back(survival_record(atoms[c], memo, N));
        }
    };
    if (exec == Exec::Serial) {
        for (long long r = 0; r < R; ++r) one(r);
    } else {
#pragma omp parallel for schedule(dynamic, 8)
        for (long long r = 0; r < R; ++r) one(r);
    }
    st.survive.assign(population.size(), std::vector<std::uint64_t>(N + 1, 0));
    st.retention.assign(N + 1, std::vector<double>(runs, 0.0));
    for (std::size_t run = 0; run < runs; ++run) {
        for (std::size_t c = 0; c < population.size(); ++c)
            for (int m = 0; m <= N; ++m) st.survive[c][m] += records[run][c][m];
        if (!singles.empty())
            for (int m = 0; m <= N; ++m) {
                std::size_t alive = 0;
                for (auto c : singles) alive += records[run][c][m];
                st.retention[m][run] = static_cast<double>(alive) / static_cast<double>(singles.size());
            }
    }
    return st;
}

std::vector<RetentionRow> check_retention_bound(const SurvivalStats& stats, const PruningPreset& preset) {
    if (stats.runs < 500) throw std::invalid_argument("check_retention_bound needs >= 500 runs");
    if (stats.singletons == 0) throw std::invalid_argument("check_retention_bound needs singleton configurations");
    std::vector<RetentionRow> rows;
    for (int m = 1; m <= stats.n_max; ++m) {
        RetentionRow r;
        r.m = m;
        r.delta = delta_m(preset, m);
        const auto& rv = stats.retention[m];
        const Estimate e = Estimate::of_values("r_m", rv);
        r.mean_r = e.mean();
        r.mean_r_se = e.stderr_();
        if (r.delta >= 1.0) {
            r.vacuous = true;
            r.pass = true;
            r.expectation_ok = true;
            rows.push_back(r);
            continue;
        }
        std::size_t below = 0;
        for (double x : rv) below += x <= 1.0 - r.delta;
        const double n = static_cast<double>(rv.size());
        r.freq_below = static_cast<double>(below) / n;
        r.limit = r.delta + 3.0 * std::sqrt(r.delta * (1 - r.delta) / n);
        r.expectation_ok = r.mean_r >= 1.0 - r.delta * r.delta - 3.0 * r.mean_r_se;
        r.pass = r.freq_below <= r.limit && r.expectation_ok;
        rows.push_back(r);
    }
    return rows;
}

ReportB run_pruning_B(const std::vector<OccupancyProfile>& population, const std::vector<Target>& targets,
                      const PruningPreset& preset, std::size_t runs, std::uint64_t seed, Exec exec) {
    if (preset.mode != PresetMode::SchemeB) throw std::invalid_argument("run_pruning_B needs a mode B preset");
    const auto val = validate_preset(preset);
    if (!val.pass) throw std::invalid_argument("mode B preset failed validation");
    const int N = preset.n_max;
    ReportB rep;
    for (const auto& t : targets) {
        if (t.atoms.empty()) throw std::invalid_argument("target '" + t.label + "' has no atoms");
        if (t.level < 0 || t.level > N) throw std::invalid_argument("target level out of range");
        std::vector<std::uint64_t> tat = t.atoms;
        std::sort(tat.begin(), tat.end());
        tat.erase(std::unique(tat.begin(), tat.end()), tat.end());
        HitReport h;
        h.label = t.label;
        h.fraction = std::ldexp(static_cast<double>(tat.size()), -t.level);
        // atoms of level n that lie inside x, as index ranges
        std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> ranges(N + 1);
        double log_miss = 0.0;
        for (int n = std::max(1, preset.m); n <= N; ++n) {
            std::uint64_t count = 0;
            if (n >= t.level) {
                const int s = n - t.level;
                for (auto a : tat) {
                    ranges[n].push_back({a << s, (a + 1) << s});
                    count += std::uint64_t{1} << s;
                }
            } else {
                const int s = t.level - n;
                for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
                    const auto lo = std::lower_bound(tat.begin(), tat.end(), i << s);
                    const auto hi = std::lower_bound(tat.begin(), tat.end(), (i + 1) << s);
                    if (static_cast<std::uint64_t>(hi - lo) == (std::uint64_t{1} << s)) {
                        ranges[n].push_back({i, i + 1});
                        ++count;
                    }
                }
            }
            log_miss += static_cast<double>(count) * std::log1p(-preset.p(n));
        }
        h.oracle = -std::expm1(log_miss);
        std::vector<char> hit(runs, 0);
        const long long R = static_cast<long long>(runs);
        auto one = [&](long long run) {
            for (int n = std::max(1, preset.m); n <= N; ++n)
                for (const auto& [lo, hi] : ranges[n])
                    for (std::uint64_t a = lo; a < hi; ++a)
                        if (atom_pruned(preset, seed, static_cast<std::uint64_t>(run), n, a)) {
                            hit[run] = 1;
                            return;
                        }
        };
        if (exec == Exec::Serial) {
            for (long long r = 0; r < R; ++r) one(r);
        } else {
#pragma omp parallel for schedule(dynamic, 8)
            for (long long r = 0; r < R; ++r) one(r);
        }
        h.hit = Estimate::of_proportion(t.label, std::accumulate(hit.begin(), hit.end(), std::uint64_t{0}), runs);
        rep.hits.push_back(h);
    }
    rep.survival = run_pruning(population, preset, runs, seed, exec);
    for (const auto& p : population) {
        const auto K = occupancy_counts(p, N);
        rep.oracle.push_back(survival_oracle(preset, K, preset.m));
        rep.low_occupancy.push_back(std::ldexp(static_cast<double>(K[N]), -N) < 0.01);
    }
    return rep;
}

}  // namespace maxstab
