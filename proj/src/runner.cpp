#include "maxstab/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "maxstab/certify.hpp"
#include "maxstab/oracle.hpp"
#include "maxstab/pruning.hpp"
#include "maxstab/report.hpp"
#include "maxstab/signs.hpp"
#include "maxstab/subordinator.hpp"
#include "maxstab/time_change.hpp"

namespace maxstab {

namespace fs = std::filesystem;
using OJson = nlohmann::ordered_json;

namespace {

OJson estimate_json(const Estimate& e) {
    return OJson{{"n", e.n}, {"mean", e.mean()}, {"stderr", e.stderr_()}, {"ci_lo", e.ci_lo()}, {"ci_hi", e.ci_hi()}};
}

OJson ordered(const Json& j) { return OJson::parse(j.dump()); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class Emitter {
public:
    Emitter(fs::path dir, std::string hash, std::uint64_t seed)
        : dir_(std::move(dir)), hash_(std::move(hash)), seed_(seed) {
        fs::create_directories(dir_ / "charts");
    }

    const std::string& hash() const { return hash_; }
    std::uint64_t seed() const { return seed_; }

    void csv(const std::vector<CsvRow>& rows) const { write(dir_ / "evidence.csv", evidence_csv(rows, hash_, seed_)); }

    // JSON has no comment syntax, so the header fields lead the document.
    void summary(const std::string& command, const OJson& body) const {
        OJson j{{"schema_version", 1}, {"config_hash", hash_}, {"seed", seed_}, {"command", command}};
        for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
        write(dir_ / "summary.json", j.dump(2) + "\n");
    }

    void chart(const std::string& name, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series) const {
        write(dir_ / "charts" / (name + ".svg"), svg_chart(title, xlabel, ylabel, series, hash_, seed_));
    }

    void text(const std::string& name, const std::string& body) const {
        write(dir_ / name, "# config_hash=" + hash_ + " seed=" + std::to_string(seed_) + "\n" + body);
    }

private:
    static void write(const fs::path& p, const std::string& s) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << s;
    }

    fs::path dir_;
    std::string hash_;
    std::uint64_t seed_;
};

struct Ctx {
    const Json& cfg;
    std::uint64_t seed;
    fs::path base;
    const Emitter& out;
    std::ostream& log;
};

Series series_of(const std::string& name, const std::vector<double>& x, const std::vector<Estimate>& e) {
    Series s;
    s.name = name;
    s.x = x;
    for (const auto& v : e) {
        s.y.push_back(v.mean());
        s.lo.push_back(v.ci_lo());
        s.hi.push_back(v.ci_hi());
    }
    return s;
}

Interval window_of(const Json& cfg, const CensorSet& set) {
    if (cfg.contains("window")) return interval_from_json(cfg.at("window"));
    // a sampled range extends past the covered span [0, d T] by its last jump
    if (set.kind() == SetKind::SubordinatorRange) {
        const SubordinatorInfo& info = subordinator_info(set);
        return {0.0, info.params.drift * info.horizon};
    }
    return set.window();
}

int classify_cmd(const Ctx& c) {
    const CensorSet set = set_from_json(c.cfg.at("set"), c.seed, c.base);
    LadderProtocol p = ladder_from_json(c.cfg.value("ladder", Json::object()), c.seed);
    p.window = window_of(c.cfg, set);
    const MatchConfig m = match_from_json(c.cfg.value("match", Json::object()));
    p.eta = m.eta;
    p.theta_mem = m.theta_mem;
    const Classification cl = classify_set(set, p);

    std::vector<CsvRow> rows;
    std::vector<double> x;
    std::vector<Estimate> sh, co, du;
    OJson levels = OJson::array();
    for (const auto& e : cl.levels) {
        const double L = e.level;
        rows.push_back({"shared", L, e.shared});
        rows.push_back({"contained", L, e.contained});
        rows.push_back({"dual", L, e.dual});
        x.push_back(L);
        sh.push_back(e.shared);
        co.push_back(e.contained);
        du.push_back(e.dual);
        levels.push_back({{"level", e.level},
                          {"w", e.w},
                          {"nodes_in_E", e.nodes_in_E},
                          {"maxima_W_in_E", e.counts.w_in_E},
                          {"shared", estimate_json(e.shared)},
                          {"contained", estimate_json(e.contained)},
                          {"dual", estimate_json(e.dual)}});
    }
    c.out.csv(rows);
    OJson trends = OJson::object();
    if (cl.shared_trend) trends["shared"] = to_string(cl.shared_trend->verdict);
    if (cl.contained_trend) trends["contained"] = to_string(cl.contained_trend->verdict);
    if (cl.dual_trend) trends["dual"] = to_string(cl.dual_trend->verdict);
    c.out.summary("classify-set", {{"set_descriptor", ordered(c.cfg.at("set"))},
                                   {"verdict", to_string(cl.verdict)},
                                   {"by_shared", to_string(cl.by_shared)},
                                   {"by_containment", to_string(cl.by_containment)},
                                   {"reason", cl.reason},
                                   {"measure", cl.measure},
                                   {"thresholds",
                                    {{"stable", p.stable_threshold},
                                     {"unstable", p.unstable_threshold},
                                     {"flat_stable", p.flat_stable_threshold}}},
                                   {"replicas", p.replicas},
                                   {"trends", trends},
                                   {"levels", levels}});
    if (!x.empty())
        c.out.chart("ladder", "maxima fractions along the refinement ladder", "level", "fraction",
                    {series_of("shared", x, sh), series_of("contained", x, co), series_of("dual", x, du)});
    c.log << "verdict " << to_string(cl.verdict) << " (" << cl.reason << ")\n";
    return cl.verdict == Verdict::Undecided ? kExitUndecided : kExitOk;
}

int match_prob_cmd(const Ctx& c) {
    std::vector<CensorSet> sets;
    for (std::size_t i = 0; i < c.cfg.at("sets").size(); ++i)
        sets.push_back(set_from_json(c.cfg.at("sets")[i], c.seed, c.base, "$.sets[" + std::to_string(i) + "]"));
    std::optional<CensorSet> G;
    if (c.cfg.contains("G")) G = set_from_json(c.cfg.at("G"), c.seed, c.base, "$.G");
    const Interval ab = interval_from_json(c.cfg.at("interval"));
    const Interval win = window_of(c.cfg, sets.front());
    const TimeGrid grid(win.lo, win.hi, c.cfg.value("level", 12));
    const MatchConfig m = match_from_json(c.cfg.value("match", Json::object()));
    const std::size_t replicas = c.cfg.value("replicas", std::size_t{10000});

    std::vector<CsvRow> rows;
    std::vector<Estimate> est;
    std::vector<double> x;
    OJson items = OJson::array();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        // common seed across sets: the estimates share their random numbers
        const MatchProb mp = maximizer_match_prob(sets[i], ab, G, grid, m, replicas, c.seed);
        rows.push_back({"match_prob", static_cast<double>(i), mp.estimate});
        est.push_back(mp.estimate);
        x.push_back(static_cast<double>(i));
        items.push_back({{"set_descriptor", ordered(c.cfg.at("sets")[i])},
                         {"estimate", estimate_json(mp.estimate)},
                         {"none_W", mp.none_W},
                         {"none_WE", mp.none_WE}});
    }
    std::size_t decreases = 0, violations = 0;
    for (std::size_t i = 1; i < est.size(); ++i) {
        decreases += est[i].mean() < est[i - 1].mean();
        violations += est[i].ci_hi() < est[i - 1].ci_lo();
    }
    c.out.csv(rows);
    c.out.summary("match-prob", {{"interval", {ab.lo, ab.hi}},
                                 {"level", grid.level()},
                                 {"replicas", replicas},
                                 {"estimates", items},
                                 {"point_decreases", decreases},
                                 {"separated_violations", violations}});
    c.out.chart("match_prob", "maximizer match probability", "set index", "probability", {series_of("Q", x, est)});
    c.log << sets.size() << " estimates, " << violations << " separated monotonicity violations\n";
    return kExitOk;
}

ProductFunctional functional_from_json(const Json& pieces) {
    ProductFunctional f;
    for (const auto& j : pieces) {
        Piece p;
        p.span = interval_from_json(j.at("span"));
        p.select = interval_from_json(j.at("select"));
        const std::string g = j.at("g");
        p.g = g == "clip_exp" ? GKind::ClipExp : g == "indicator" ? GKind::Indicator : GKind::Const;
        p.a = j.value("a", 1.0);
        p.b = j.value("b", 1.0);
        f.pieces.push_back(p);
    }
    return f;
}

int verify_cmd(const Ctx& c) {
    const MatchConfig m = match_from_json(c.cfg.value("match", Json::object()));
    const int level = c.cfg.value("level", 12);
    const std::size_t replicas = c.cfg.value("replicas", std::size_t{10000});
    std::vector<CsvRow> rows;
    OJson items = OJson::array();
    std::size_t ok = 0;
    const auto& cases = c.cfg.at("cases");
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string where = "$.cases[" + std::to_string(i) + "]";
        const CensorSet set = set_from_json(cases[i].at("set"), c.seed, c.base, where + ".set");
        const Interval win = window_of(c.cfg, set);
        const ProductFunctional f = functional_from_json(cases[i].at("pieces"));
        const FormulaCheck fc = verify_probability_formula(set, f, TimeGrid(win.lo, win.hi, level), m, replicas,
                                                           c.seed + i);
        const double idx = static_cast<double>(i);
        rows.push_back({"lhs", idx, fc.lhs});
        rows.push_back({"rhs", idx, fc.rhs});
        ok += fc.compatible;
        items.push_back({{"label", cases[i].value("label", "case_" + std::to_string(i))},
                         {"lhs", estimate_json(fc.lhs)},
                         {"rhs", estimate_json(fc.rhs)},
                         {"matched_signs", estimate_json(fc.matched_signs)},
                         {"z", fc.z},
                         {"compatible", fc.compatible}});
    }
    c.out.csv(rows);
    c.out.summary("verify-formula", {{"level", level},
                                     {"replicas", replicas},
                                     {"compatible", std::to_string(ok) + "/" + std::to_string(cases.size())},
                                     {"cases", items}});
    c.log << ok << "/" << cases.size() << " cases compatible within 3 sigma\n";
    return ok == cases.size() ? kExitOk : kExitUndecided;
}

int oracle_cmd(const Ctx& c) {
    const fs::path fixture = c.base / c.cfg.at("fixture").get<std::string>();
    const auto cases = read_oracle_matrix(fixture.string());
    const std::size_t mc = c.cfg.value("mc_samples", std::size_t{0});
    std::vector<CsvRow> rows;
    OJson mismatches = OJson::array();
    std::size_t exact = 0, mc_ok = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const OracleResult r = brute_force_oracle(cases[i]);
        const bool hit = r.lhs == r.rhs && (!cases[i].has_expected || r.rhs == cases[i].expected_rhs);
        exact += hit;
        if (!hit) mismatches.push_back({{"id", cases[i].id}, {"lhs", r.lhs.str()}, {"rhs", r.rhs.str()}});
        const double idx = static_cast<double>(i);
        rows.push_back({"lhs_exact", idx, Estimate::of_values("lhs_exact", {static_cast<double>(r.lhs)})});
        if (mc > 0) {
            const OracleMC m = oracle_monte_carlo(cases[i], mc, c.seed + i);
            const double d = m.lhs.mean() - static_cast<double>(r.lhs);
            mc_ok += std::abs(d) <= 3.0 * m.lhs.stderr_() + 1e-12;
            rows.push_back({"lhs_mc", idx, m.lhs});
        }
    }
    c.out.csv(rows);
    const std::string summary = std::to_string(exact) + "/" + std::to_string(cases.size()) + " exact matches";
    OJson body{{"fixture", c.cfg.at("fixture")}, {"cases", cases.size()}, {"result", summary}, {"mismatches", mismatches}};
    if (mc > 0) body["mc_within_3sigma"] = std::to_string(mc_ok) + "/" + std::to_string(cases.size());
    c.out.summary("oracle", body);
    c.log << summary << "\n";
    return exact == cases.size() ? kExitOk : kExitUndecided;
}

int time_change_cmd(const Ctx& c) {
    const CensorSet set = set_from_json(c.cfg.at("set"), c.seed, c.base);
    const Interval win = window_of(c.cfg, set);
    const TimeGrid grid(win.lo, win.hi, c.cfg.value("level", 14));
    const TimeChange tc = build_time_change(set, grid);
    Engine rng = make_engine(c.seed, {kTagPoints, static_cast<std::uint64_t>(grid.level()), 1});
    const PushforwardCheck pf = check_pushforward(set, tc, c.cfg.value("intervals", std::size_t{50}), rng);
    const TimeChangeRun tr = run_time_change(set, tc, c.cfg.value("replicas", std::size_t{10000}),
                                             c.cfg.value("checkpoints", std::size_t{10}), c.cfg.value("w", 1),
                                             c.cfg.value("eta", 1), c.seed);
    std::vector<CsvRow> rows;
    OJson checkpoints = OJson::array();
    std::size_t within = 0;
    for (std::size_t i = 0; i < tr.s.size(); ++i) {
        rows.push_back({"second_moment", tr.s[i], tr.second_moment[i]});
        within += tr.within[i];
        checkpoints.push_back({{"s", tr.s[i]}, {"second_moment", estimate_json(tr.second_moment[i])},
                               {"within_3sigma", static_cast<bool>(tr.within[i])}});
    }
    c.out.csv(rows);
    const double rate = tr.corr.rate();
    c.out.summary("time-change",
                  {{"set_descriptor", ordered(c.cfg.at("set"))},
                   {"level", grid.level()},
                   {"range_level", tc.range.level()},
                   {"measure", tc.total},
                   {"pushforward",
                    {{"intervals", pf.intervals}, {"passed", pf.passed}, {"max_error", pf.max_error},
                     {"tolerance", pf.tolerance}, {"pass", pf.pass}}},
                   {"variance_checkpoints", checkpoints},
                   {"variance_within", std::to_string(within) + "/" + std::to_string(tr.s.size())},
                   {"correspondence",
                    {{"forward", std::to_string(tr.corr.forward_hit) + "/" + std::to_string(tr.corr.forward_total)},
                     {"reverse", std::to_string(tr.corr.reverse_hit) + "/" + std::to_string(tr.corr.reverse_total)},
                     {"rate", rate}}}});
    Series diag{"s", tr.s, tr.s, {}, {}};
    c.out.chart("variance", "second moment of the time-changed censored path", "s", "E[Y(s)^2]",
                {series_of("observed", tr.s, tr.second_moment), diag});
    c.log << "pushforward " << pf.passed << "/" << pf.intervals << ", variance " << within << "/" << tr.s.size()
          << ", correspondence " << rate << "\n";
    return pf.pass && within == tr.s.size() ? kExitOk : kExitUndecided;
}

int generate_cmd(const Ctx& c) {
    const Json& d = c.cfg.at("set");
    const Json cert = c.cfg.value("certify", Json::object());
    OJson body{{"set_descriptor", ordered(d)}};
    CensorSet set;
    int code = kExitOk;
    std::optional<RateReport> report;
    if (d.at("kind") == "cantor_alpha") {
        BuildOptions opt;
        opt.points = cert.value("points", opt.points);
        opt.j_lo = cert.value("j_lo", opt.j_lo);
        opt.j_hi = cert.value("j_hi", opt.j_hi);
        opt.seed = c.seed;
        const Interval win = d.contains("window") ? interval_from_json(d.at("window")) : Interval{0.0, 1.0};
        const CantorBuild b = build_cantor(d.at("alpha"), d.at("depth"), win, opt);
        set = b.set;
        report = b.report;
        body["certified"] = b.certified;
        body["certification"] = b.message;
        if (!b.certified) code = kExitError;
    } else {
        set = set_from_json(d, c.seed, c.base);
        if (!cert.empty()) {
            Engine rng = make_engine(c.seed, {kTagPoints, 0});
            const auto pts = sample_points(set, cert.value("points", std::size_t{400}), rng);
            auto scales = dyadic_scales(cert.value("j_lo", 4), cert.value("j_hi", 16));
            const Interval w = set.window();
            for (auto& h : scales) h *= w.hi - w.lo;
            const double gp = cert.value("g_param", 1.0);
            const RateFunction g = cert.value("g_family", std::string("log_power")) == "power"
                                       ? RateFunction::power(gp)
                                       : RateFunction::log_power(gp);
            report = certify_rate(set, pts, scales, g);
        }
    }
    body["kind"] = to_string(set.kind());
    body["measure"] = set.total();
    if (set.kind() == SetKind::SubordinatorRange) {
        const auto& info = subordinator_info(set);
        body["subordinator"] = {{"horizon", info.horizon},
                                {"range_end", info.range_end},
                                {"jumps", info.jumps},
                                {"truncation_bias", info.truncation_bias},
                                {"predicted", to_string(info.predicted)}};
    }
    std::vector<CsvRow> rows;
    if (report) {
        std::vector<double> x;
        std::vector<Estimate> fr;
        for (std::size_t j = 0; j < report->scales.size(); ++j) {
            Estimate e = Estimate::of_values("median_fraction", {report->median_fraction[j]});
            rows.push_back({"median_fraction", report->scales[j], e});
            x.push_back(std::log(std::log(1.0 / report->scales[j])));
            fr.push_back(e);
        }
        body["rate"] = {{"exponent", report->exponent},
                        {"band", {report->band_lo, report->band_hi}},
                        {"growth_i", report->growth_i},
                        {"growth_ii", report->growth_ii},
                        {"integral", to_string(report->integral)},
                        {"verdict", to_string(report->verdict)}};
        c.out.chart("density_profile", "median max-side deficit fraction", "log log(1/h)", "deficit / h",
                    {series_of("median", x, fr)});
        if (code == kExitOk && report->verdict == RateVerdict::Gap) code = kExitUndecided;
    }
    c.out.csv(rows);
    c.out.summary("generate-set", body);
    c.out.text("set.txt", set_to_string(set));
    if (report) c.log << "rate verdict " << to_string(report->verdict) << ", exponent " << report->exponent << "\n";
    if (code == kExitError) c.log << "certification failed: " << body["certification"].get<std::string>() << "\n";
    return code;
}

PruningPreset preset_from_json(const std::string& mode, const Json& j) {
    PruningPreset p;
    p.mode = mode == "B" ? PresetMode::SchemeB : PresetMode::SchemeA;
    p.p_a = j.value("p_a", p.p_a);
    p.p_q = j.value("p_q", p.p_q);
    p.c_q = j.value("c_q", p.c_q);
    p.zeta_q = j.value("zeta_q", p.zeta_q);
    p.m = j.value("m", p.m);
    p.n_max = j.value("n_max", p.n_max);
    return p;
}

OccupancyProfile profile_from_json(const Json& j, const PruningPreset& preset, const std::string& where) {
    OccupancyProfile p;
    p.label = j.value("label", std::string());
    if (j.at("kind") == "points") {
        p.kind = ProfileKind::FinitePoints;
        p.points = j.value("points", std::vector<double>{});
        if (p.points.empty()) throw ConfigError(where + ".points", "points profile needs at least one point");
        for (double x : p.points)
            if (x >= 1.0) throw ConfigError(where + ".points", "points must lie in [0,1)");
        return p;
    }
    p.kind = ProfileKind::Growth;
    p.reserve_level = j.value("reserve_level", 0);
    p.reserve_index = j.value("reserve_index", std::uint64_t{0});
    p.placement_seed = j.value("placement_seed", std::uint64_t{1});
    if (j.contains("f")) {
        p.f = j.at("f").get<std::vector<double>>();
    } else if (j.contains("f_times_c")) {
        const double k = j.at("f_times_c");
        p.f.resize(preset.n_max + 1);
        for (int n = 0; n <= preset.n_max; ++n) p.f[n] = std::ceil(k * preset.c(n));
    } else {
        throw ConfigError(where, "growth profile needs 'f' or 'f_times_c'");
    }
    if (p.f.empty()) throw ConfigError(where + ".f", "empty occupancy function");
    return p;
}

int prune_cmd(const Ctx& c) {
    const std::string mode = c.cfg.at("mode");
    const PruningPreset preset = preset_from_json(mode, c.cfg.value("preset", Json::object()));
    std::vector<OccupancyProfile> pop;
    const auto& pj = c.cfg.at("population");
    for (std::size_t i = 0; i < pj.size(); ++i)
        pop.push_back(profile_from_json(pj[i], preset, "$.population[" + std::to_string(i) + "]"));
    const std::size_t runs = c.cfg.value("runs", std::size_t{10000});
    const PresetValidation val = validate_preset(preset);
    OJson conds = OJson::array();
    for (const auto& k : val.conditions)
        conds.push_back({{"name", k.name}, {"pass", k.pass}, {"partial", k.partial}, {"tail_lo", k.tail_lo},
                         {"tail_hi", k.tail_hi}, {"note", k.note}});
    OJson body{{"mode", mode}, {"n_max", preset.n_max}, {"runs", runs},
               {"validation", {{"pass", val.pass}, {"conditions", conds}}}};
    if (!val.pass) {
        c.out.csv({});
        c.out.summary("prune", body);
        c.log << "preset failed validation\n";
        return kExitUndecided;
    }
    std::vector<CsvRow> rows;
    std::vector<Series> charts;
    auto survival_block = [&](const SurvivalStats& st, const std::vector<double>* oracle_m1) {
        OJson cfgs = OJson::array();
        for (std::size_t k = 0; k < st.labels.size(); ++k) {
            std::vector<double> x;
            std::vector<Estimate> e;
            for (int m = 1; m <= st.n_max; ++m) {
                const Estimate s = st.survival(k, m);
                rows.push_back({st.labels[k], static_cast<double>(m), s});
                x.push_back(m);
                e.push_back(s);
            }
            charts.push_back(series_of(st.labels[k], x, e));
            const auto K = occupancy_counts(pop[k], st.n_max);
            const double oracle = oracle_m1 ? (*oracle_m1)[k] : survival_oracle(preset, K, 1);
            const Estimate s1 = st.survival(k, 1);
            cfgs.push_back({{"label", st.labels[k]},
                            {"survival_m1", estimate_json(s1)},
                            {"oracle_m1", oracle},
                            {"z", s1.stderr_() > 0 ? (s1.mean() - oracle) / s1.stderr_() : 0.0}});
        }
        return cfgs;
    };
    if (preset.mode == PresetMode::SchemeA) {
        const SurvivalStats st = run_pruning(pop, preset, runs, c.seed);
        body["configurations"] = survival_block(st, nullptr);
        if (st.singletons > 0 && runs >= 500) {
            OJson ret = OJson::array();
            for (const auto& r : check_retention_bound(st, preset))
                ret.push_back({{"m", r.m}, {"delta", r.delta}, {"freq_below", r.freq_below}, {"limit", r.limit},
                               {"mean_r", r.mean_r}, {"vacuous", r.vacuous}, {"pass", r.pass}});
            body["retention"] = ret;
        }
    } else {
        std::vector<Target> targets;
        for (const auto& t : c.cfg.value("targets", Json::array()))
            targets.push_back({t.at("level"), t.at("atoms").get<std::vector<std::uint64_t>>(),
                               t.value("label", std::string("target"))});
        const ReportB rb = run_pruning_B(pop, targets, preset, runs, c.seed);
        body["configurations"] = survival_block(rb.survival, &rb.oracle);
        OJson hits = OJson::array();
        for (const auto& h : rb.hits) {
            hits.push_back({{"label", h.label}, {"fraction", h.fraction}, {"hit", estimate_json(h.hit)},
                            {"oracle", h.oracle}});
            rows.push_back({"hit:" + h.label, h.fraction, h.hit});
        }
        body["hits"] = hits;
    }
    c.out.csv(rows);
    c.out.summary("prune", body);
    c.out.chart("survival", "survival from start level m", "m", "survival", charts);
    c.log << "pruning mode " << mode << " over " << runs << " runs\n";
    return kExitOk;
}

int report_cmd(const Ctx& c) {
    std::map<std::string, std::vector<CsvRow>> by_label;
    OJson inputs = OJson::array();
    for (const auto& in : c.cfg.at("inputs")) {
        const fs::path p = c.base / in.get<std::string>();
        const auto rows = parse_evidence_csv(read_file(p));
        inputs.push_back({{"path", in}, {"rows", rows.size()}});
        for (const auto& r : rows) by_label[r.label].push_back(r);
    }
    std::vector<CsvRow> all;
    std::vector<Series> series;
    OJson labels = OJson::object();
    for (auto& [label, rows] : by_label) {
        std::stable_sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) { return a.param < b.param; });
        std::vector<double> x;
        std::vector<Estimate> e;
        OJson pts = OJson::array();
        for (const auto& r : rows) {
            all.push_back(r);
            x.push_back(r.param);
            e.push_back(r.est);
            pts.push_back({{"param", r.param}, {"n", r.est.n}, {"mean", r.est.mean()}, {"stderr", r.est.stderr_()}});
        }
        series.push_back(series_of(label, x, e));
        labels[label] = pts;
    }
    c.out.csv(all);
    c.out.summary("report", {{"title", c.cfg.value("title", std::string("evidence"))}, {"inputs", inputs},
                             {"labels", labels}});
    c.out.chart("report", c.cfg.value("title", std::string("evidence")), "param", "mean", series);
    c.log << by_label.size() << " series from " << inputs.size() << " files\n";
    return kExitOk;
}

}  // namespace

int run(const RunRequest& req, std::ostream& log) {
    Json cfg = req.config;
    if (!cfg.is_object()) throw ConfigError("$", "config must be a JSON object");
    if (cfg.contains("command") && cfg.at("command") != req.command)
        throw ConfigError("$.command", "config is for " + cfg.at("command").dump() + ", not '" + req.command + "'");
    cfg["command"] = req.command;
    if (req.seed) cfg["seed"] = *req.seed;
    validate(cfg, schema_for(req.command));
    if (!cfg.contains("seed")) throw ConfigError("$.seed", "missing seed: pass --seed or set it in the config");
    const std::uint64_t seed = cfg.at("seed");
    if (cfg.contains("threads")) omp_set_num_threads(cfg.at("threads"));

    const fs::path out = req.out ? *req.out : req.base / cfg.value("out", std::string("maxstab-out"));
    // output location and thread count do not change any emitted byte
    Json hashed = cfg;
    hashed.erase("out");
    hashed.erase("threads");
    const Emitter em(out, config_hash(hashed), seed);
    const Ctx c{cfg, seed, req.base, em, log};
    log << req.command << ": config_hash=" << em.hash() << " seed=" << seed << " out=" << out.string() << "\n";

    if (req.command == "classify-set") return classify_cmd(c);
    if (req.command == "match-prob") return match_prob_cmd(c);
    if (req.command == "verify-formula") return verify_cmd(c);
    if (req.command == "oracle") return oracle_cmd(c);
    if (req.command == "time-change") return time_change_cmd(c);
    if (req.command == "generate-set") return generate_cmd(c);
    if (req.command == "prune") return prune_cmd(c);
    return report_cmd(c);
}

}  // namespace maxstab
