// Acceptance run: one PASS/FAIL line per criterion; exits 1 when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maxstab/certify.hpp"
#include "maxstab/coupling.hpp"
#include "maxstab/oracle.hpp"
#include "maxstab/path.hpp"
#include "maxstab/pruning.hpp"
#include "maxstab/signs.hpp"
#include "maxstab/subordinator.hpp"
#include "maxstab/time_change.hpp"

using namespace maxstab;

namespace {

// pinned tolerances
constexpr double kSigmas = 3.0;
constexpr double kOpenSharedMin = 0.95;
constexpr double kCorrespondenceMin = 0.98;
constexpr double kHitMin = 0.99;
constexpr double kGrowthTopMax = 1e-2;
constexpr double kWilsonCoverageMin = 0.93;

constexpr std::uint64_t kSeed = 20240611;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail, double seconds) {
    std::printf("%s [%d] %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !ok;
}

template <class F>
void criterion(int id, const std::string& name, F body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << "exception: " << e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, name, ok, detail.str(), s);
}

bool within_sigmas(double observed, double expected, std::size_t n) {
    const double sd = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
    return std::abs(observed - expected) <= kSigmas * sd + 1e-12;
}

bool monotone(const std::optional<TrendReport>& t) {
    return t && (t->verdict == Trend::Increasing || t->verdict == Trend::Decreasing);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

ProductFunctional functional(std::vector<Piece> pieces) {
    ProductFunctional f;
    f.pieces = std::move(pieces);
    return f;
}

OccupancyProfile singleton(double x, std::string label) {
    OccupancyProfile p;
    p.points = {x};
    p.label = std::move(label);
    return p;
}

OccupancyProfile growth_profile(const PruningPreset& pr) {
    OccupancyProfile g;
    g.kind = ProfileKind::Growth;
    g.reserve_level = 4;
    g.reserve_index = 3;
    g.label = "growth";
    g.f.resize(pr.n_max + 1);
    for (int n = 0; n <= pr.n_max; ++n) g.f[n] = pr.c(n);
    return g;
}

}  // namespace

int main() {
    criterion(1, "oracle identity on the fixture matrix", [](std::ostream& d) {
        const auto cases = read_oracle_matrix(std::string(FIXTURE_DIR) + "/oracle_matrix_v1.txt");
        std::size_t exact = 0;
        for (const auto& c : cases) {
            const OracleResult r = brute_force_oracle(c);
            exact += r.lhs == r.rhs && (!c.has_expected || r.rhs == c.expected_rhs);
        }
        d << exact << "/" << cases.size() << " exact matches";
        return cases.size() >= 200 && exact == cases.size();
    });

    criterion(2, "Monte Carlo probability formula", [](std::ostream& d) {
        const TimeGrid g(0.0, 1.0, 12);
        const std::vector<CensorSet> sets{make_elementary({{0.1, 0.4}, {0.6, 0.9}}),
                                          make_elementary({{0.0, 0.5}}),
                                          make_cantor(alpha_schedule(3.0, 20)),
                                          make_cantor(alpha_schedule(1.5, 20)),
                                          complement(make_elementary({{0.3, 0.7}}))};
        const std::vector<ProductFunctional> fs{
            functional({{{0.0, 1.0}, GKind::Const, 1.0, 1.0, {}, {0.0, 1.0}}}),
            functional({{{0.0, 0.5}, GKind::ClipExp, 1.0, 3.0, {}, {0.0, 0.5}},
                        {{0.5, 1.0}, GKind::Indicator, 0.0, 1.0, {}, {0.5, 1.0}}})};
        std::size_t ok = 0, total = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (std::size_t j = 0; j < fs.size(); ++j) {
                const FormulaCheck c =
                    verify_probability_formula(sets[i], fs[j], g, MatchConfig{}, 10000, kSeed + 10 * i + j);
                ok += c.compatible;
                ++total;
                worst = std::max(worst, c.z);
            }
        d << ok << "/" << total << " pairs compatible, max |z| " << fmt(worst);
        return total >= 10 && ok == total;
    });

    criterion(3, "open set is stable", [](std::ostream& d) {
        LadderProtocol p;
        p.seed = kSeed;
        const Classification c = classify_set(make_elementary({{0.1, 0.35}, {0.5, 0.9}}), p);
        const double top = c.levels.back().shared.mean();
        d << to_string(c.verdict) << ", shared at L=" << c.levels.back().level << " " << fmt(top) << ", trend "
          << (c.shared_trend ? to_string(c.shared_trend->verdict) : "none");
        return c.verdict == Verdict::Stable && top >= kOpenSharedMin && c.shared_trend &&
               c.shared_trend->verdict == Trend::Increasing;
    });

    criterion(4, "density dichotomy on certified Cantor sets", [](std::ostream& d) {
        LadderProtocol p;
        p.seed = kSeed;
        const CantorBuild b4 = build_cantor(4.0, 20), b2 = build_cantor(2.0, 20);
        const Classification c4 = classify_set(b4.set, p), c2 = classify_set(b2.set, p);
        d << "alpha=4 " << to_string(c4.verdict) << " (fit " << fmt(b4.report.exponent) << ", "
          << to_string(b4.report.verdict) << "), alpha=2 " << to_string(c2.verdict) << " (fit "
          << fmt(b2.report.exponent) << ", " << to_string(b2.report.verdict) << ")";
        return b4.certified && b2.certified && c4.verdict == Verdict::Stable && c2.verdict == Verdict::Unstable &&
               monotone(c4.shared_trend) && monotone(c2.shared_trend) &&
               b4.report.verdict == RateVerdict::StableCriterionMet &&
               b2.report.verdict == RateVerdict::UnstableCriterionMet && c4.levels.size() >= 3;
    });

    criterion(5, "subordinator ranges", [](std::ostream& d) {
        LadderProtocol p;
        p.seed = kSeed;
        SubordinatorParams st;
        st.tail = TailKind::Stable;
        st.rho = 0.5;
        st.scale = 1.0;
        st.drift = 1.0;
        st.x_min = 1e-6;
        SubordinatorParams lt;
        lt.tail = TailKind::LogTail;
        lt.gamma = 3.0;
        lt.drift = 0.25;
        lt.x_min = 1e-9;
        Engine r1 = make_engine(kSeed, {kTagSubordinator, 0});
        Engine r2 = make_engine(kSeed, {kTagSubordinator, 1});
        const SubordinatorSample s1 = sample_subordinator_range(st, 0.0, r1);
        const SubordinatorSample s2 = sample_subordinator_range(lt, 0.0, r2);
        const Classification c1 = classify_set(s1.set, p), c2 = classify_set(s2.set, p);
        d << "stable " << to_string(c1.verdict) << " (measure " << fmt(c1.measure) << "), log-tail "
          << to_string(c2.verdict) << " (measure " << fmt(c2.measure) << ")";
        // further realizations, reported but not gated: the rho = 1/2 range varies a lot between draws
        int st_ok = 0, lt_ok = 0;
        for (std::uint64_t k = 1; k <= 10; ++k) {
            Engine a = make_engine(kSeed, {kTagSubordinator, 2 * k}), b = make_engine(kSeed, {kTagSubordinator, 2 * k + 1});
            st_ok += classify_set(sample_subordinator_range(st, 0.0, a).set, p).verdict == Verdict::Stable;
            lt_ok += classify_set(sample_subordinator_range(lt, 0.0, b).set, p).verdict == Verdict::Unstable;
        }
        d << "; other draws: stable " << st_ok << "/10 STABLE, log-tail " << lt_ok << "/10 UNSTABLE";
        return c1.verdict == Verdict::Stable && c2.verdict == Verdict::Unstable && monotone(c1.shared_trend) &&
               monotone(c2.shared_trend);
    });

    criterion(6, "middle-third Cantor set is negligible", [](std::ostream& d) {
        LadderProtocol p;
        p.seed = kSeed;
        const Classification c = classify_set(make_cantor(uniform_schedule(1.0 / 3.0, 20)), p);
        std::uint64_t in_E = 0;
        for (const auto& l : c.levels) in_E += l.counts.w_in_E;
        d << to_string(c.verdict) << ", measure " << fmt(c.measure) << ", maxima in E " << in_E;
        return c.verdict == Verdict::Negligible && in_E == 0 && c.levels.back().level == 14;
    });

    criterion(7, "match probability along a nested chain", [](std::ostream& d) {
        const std::vector<CensorSet> chain{make_elementary({}), make_elementary({{0.0, 0.3}}),
                                           make_elementary({{0.0, 0.6}}), make_elementary({{0.0, 1.0}})};
        const TimeGrid g(0.0, 1.0, 12);
        std::vector<Estimate> est;
        for (const auto& e : chain)
            est.push_back(maximizer_match_prob(e, {0.0, 1.0}, std::nullopt, g, MatchConfig{}, 10000, kSeed).estimate);
        std::size_t decreases = 0, violations = 0;
        for (std::size_t i = 1; i < est.size(); ++i) {
            decreases += est[i].mean() < est[i - 1].mean();
            violations += est[i].ci_hi() < est[i - 1].ci_lo();
        }
        for (const auto& e : est) d << fmt(e.mean()) << " ";
        d << "; decreases " << decreases << ", separated violations " << violations;
        return decreases == 0 && violations == 0;
    });

    criterion(8, "time change of the censored path", [](std::ostream& d) {
        const CensorSet e = make_cantor(alpha_schedule(3.0, 20));
        const TimeChange tc = build_time_change(e, TimeGrid(0.0, 1.0, 14));
        Engine rng = make_engine(kSeed, {kTagPoints, 14, 1});
        const PushforwardCheck pf = check_pushforward(e, tc, 50, rng);
        const TimeChangeRun r = run_time_change(e, tc, 10000, 10, 1, 1, kSeed);
        std::size_t within = 0;
        for (char w : r.within) within += w;
        d << "pushforward " << pf.passed << "/" << pf.intervals << ", variance " << within << "/" << r.s.size()
          << ", correspondence " << fmt(r.corr.rate());
        return pf.pass && pf.intervals == 50 && within == r.s.size() && r.s.size() == 10 &&
               r.corr.rate() >= kCorrespondenceMin;
    });

    criterion(9, "pruning scheme A", [](std::ostream& d) {
        const PruningPreset pr = shipped_preset();
        const PresetValidation v = validate_preset(pr);
        bool ok = v.pass;
        d << "preset " << (v.pass ? "valid" : "invalid");

        // singletons: survival oracle and retention
        std::vector<OccupancyProfile> pts;
        for (int i = 0; i < 64; ++i) pts.push_back(singleton((i + 0.5) / 64.0, "s" + std::to_string(i)));
        const SurvivalStats sp = run_pruning(pts, pr, 10000, kSeed);
        const std::vector<std::uint64_t> one(pr.n_max + 1, 1);
        for (int m : {1, 2, 5}) ok = ok && within_sigmas(sp.survival(0, m).mean(), survival_oracle(pr, one, m), 10000);
        d << ", singleton m=2 " << fmt(sp.survival(0, 2).mean()) << " vs " << fmt(survival_oracle(pr, one, 2));

        const SurvivalStats sr = run_pruning(pts, pr, 2000, kSeed + 1);
        std::size_t ret_ok = 0;
        for (const auto& row : check_retention_bound(sr, pr))
            if (row.m >= 2 && row.m <= 6) ret_ok += row.pass;
        ok = ok && ret_ok == 5;
        d << ", retention " << ret_ok << "/5";

        // isolated growth: oracle at n_max = 25, then the n_max ladder
        const OccupancyProfile g = growth_profile(pr);
        const SurvivalStats sg = run_pruning({g}, pr, 10000, kSeed + 2);
        const auto K = occupancy_counts(g, pr.n_max);
        std::size_t g_ok = 0;
        for (int m : {2, 12, 18, 22}) g_ok += within_sigmas(sg.survival(0, m).mean(), survival_oracle(pr, K, m), 10000);
        ok = ok && g_ok == 4;
        d << ", growth oracle " << g_ok << "/4";

        std::vector<double> ladder;
        for (int n_max : {15, 20, 25}) {
            PruningPreset q = pr;
            q.n_max = n_max;
            ladder.push_back(run_pruning({growth_profile(q)}, q, 10000, kSeed + 3).survival(0, 2).mean());
        }
        const bool decreasing = ladder[0] > ladder[1] && ladder[1] > ladder[2];
        ok = ok && decreasing && ladder.back() < kGrowthTopMax;
        d << ", growth survival " << fmt(ladder[0]) << " > " << fmt(ladder[1]) << " > " << fmt(ladder[2]);
        return ok;
    });

    criterion(10, "pruning scheme B", [](std::ostream& d) {
        PruningPreset pr;
        pr.mode = PresetMode::SchemeB;
        pr.zeta_q = 3.0;
        pr.n_max = 20;
        const std::vector<Target> targets{{1, {0}, "left half"}, {1, {1}, "right half"}};
        const ReportB r = run_pruning_B({singleton(0.3, "singleton")}, targets, pr, 10000, kSeed);
        bool ok = validate_preset(pr).pass;
        for (const auto& h : r.hits) {
            ok = ok && h.hit.mean() >= kHitMin;
            d << h.label << " hit " << fmt(h.hit.mean()) << ", ";
        }
        const double s = r.survival.survival(0, 1).mean();
        ok = ok && r.oracle[0] > 0.0 && within_sigmas(s, r.oracle[0], 10000);
        d << "singleton survival " << fmt(s) << " vs " << fmt(r.oracle[0]);
        return ok;
    });

    criterion(11, "calibration", [](std::ostream& d) {
        // arcsine law of the argmax
        const TimeGrid g(0.0, 1.0, 12);
        std::vector<double> tau;
        for (std::uint64_t r = 0; r < 2000; ++r) {
            const GridPath p = sample_path(g, kSeed, r);
            const auto m = argmax_on_interval(p, 0.0, 1.0);
            tau.push_back(m ? m->time : (p.values.back() > 0 ? 1.0 : 0.0));
        }
        const KsResult ks = ks_uniformity(tau, arcsine_cdf);

        // Wilson coverage over a grid of (p, n)
        std::size_t covered = 0, trials = 0;
        for (double p : {0.01, 0.1, 0.5, 0.9, 0.99})
            for (int n : {100, 1000}) {
                Engine rng = make_engine(kSeed, {kTagCalibration, static_cast<std::uint64_t>(p * 100),
                                                 static_cast<std::uint64_t>(n)});
                std::binomial_distribution<int> B(n, p);
                for (int r = 0; r < 1000; ++r) {
                    const auto w = wilson(B(rng), n);
                    covered += w.lo <= p && p <= w.hi;
                    ++trials;
                }
            }
        const double coverage = static_cast<double>(covered) / static_cast<double>(trials);

        // refine then restrict
        bool exact = true;
        for (std::uint64_t r = 0; r < 20; ++r) {
            const GridPath coarse = sample_path(TimeGrid(0.0, 1.0, 6), kSeed, r);
            Engine rng = make_engine(kSeed, {kTagPath, 100 + r});
            exact = exact && restrict_to(refine_bridge(coarse, 12, rng), 6).values == coarse.values;
        }

        // merge associativity on proportion shards
        const Estimate a = Estimate::of_proportion("p", 3, 10), b = Estimate::of_proportion("p", 7, 20),
                       c = Estimate::of_proportion("p", 11, 40);
        const Estimate l = merge(merge(a, b), c), rr = merge(a, merge(b, c));
        const bool assoc = l.n == rr.n && l.sum == rr.sum && l.sumsq == rr.sumsq;

        d << "KS " << fmt(ks.statistic) << " (crit " << fmt(ks.critical) << "), Wilson coverage " << fmt(coverage)
          << ", refine-restrict " << (exact ? "exact" : "inexact") << ", merge " << (assoc ? "associative" : "not associative");
        return ks.pass && coverage >= kWilsonCoverageMin && exact && assoc;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
