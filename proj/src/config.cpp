#include "maxstab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "maxstab/report.hpp"
#include "maxstab/subordinator.hpp"

namespace maxstab {

namespace {

Json num(double lo = -INFINITY, bool exclusive = false) {
    Json j{{"type", "number"}};
    if (std::isfinite(lo)) j[exclusive ? "exclusiveMinimum" : "minimum"] = lo;
    return j;
}

Json integer(long long lo, long long hi = -1) {
    Json j{{"type", "integer"}, {"minimum", lo}};
    if (hi >= lo) j["maximum"] = hi;
    return j;
}

Json str() { return Json{{"type", "string"}}; }

Json pair() { return Json{{"type", "array"}, {"items", num()}, {"minItems", 2}, {"maxItems", 2}}; }

Json array_of(Json item, int min_items = 0) {
    Json j{{"type", "array"}, {"items", std::move(item)}};
    if (min_items > 0) j["minItems"] = min_items;
    return j;
}

Json object(Json props, std::vector<std::string> required = {}) {
    Json j{{"type", "object"}, {"properties", std::move(props)}, {"additionalProperties", false}};
    if (!required.empty()) j["required"] = required;
    return j;
}

Json set_ref() { return Json{{"$ref", "#/definitions/set"}}; }

Json kind(const char* k) { return Json{{"const", k}}; }

Json set_definition() {
    Json variants = Json::array();
    variants.push_back(object({{"kind", kind("elementary")}, {"intervals", array_of(pair())}, {"window", pair()}},
                              {"kind", "intervals"}));
    variants.push_back(object({{"kind", kind("cantor_alpha")},
                               {"alpha", num(0.0, true)},
                               {"depth", integer(1, 40)},
                               {"window", pair()}},
                              {"kind", "alpha", "depth"}));
    variants.push_back(object({{"kind", kind("cantor_schedule")}, {"r", array_of(num(0.0), 1)}, {"window", pair()}},
                              {"kind", "r"}));
    variants.push_back(object({{"kind", kind("cantor_uniform")},
                               {"r", num(0.0)},
                               {"depth", integer(1, 40)},
                               {"window", pair()}},
                              {"kind", "r", "depth"}));
    variants.push_back(object({{"kind", kind("subordinator")},
                               {"tail", Json{{"enum", {"none", "stable", "log_tail"}}}},
                               {"drift", num(0.0, true)},
                               {"rho", num(0.0, true)},
                               {"scale", num(0.0, true)},
                               {"gamma", num(1.0, true)},
                               {"x_min", num(0.0, true)},
                               {"gap_eps", num(0.0)},
                               {"cover", num(0.0, true)},
                               {"horizon", num(0.0)},
                               {"stream", integer(0)}},
                              {"kind", "tail"}));
    variants.push_back(object({{"kind", kind("complement")}, {"of", set_ref()}}, {"kind", "of"}));
    variants.push_back(object({{"kind", kind("file")}, {"path", str()}}, {"kind", "path"}));
    return Json{{"oneOf", variants}};
}

Json match_schema() {
    return object({{"eta", integer(0)}, {"theta_mem", num(0.0, true)}, {"w", integer(1)}});
}

Json ladder_schema() {
    return object({{"levels", array_of(integer(4, 22), 3)},
                   {"w0", integer(1)},
                   {"L0", integer(1)},
                   {"growth", num(0.0)},
                   {"replicas", integer(1)},
                   {"stable_threshold", num(0.0)},
                   {"unstable_threshold", num(0.0)},
                   {"flat_stable_threshold", num(0.0)}});
}

Json piece_schema() {
    return object({{"span", pair()},
                   {"g", Json{{"enum", {"const", "clip_exp", "indicator"}}}},
                   {"a", num()},
                   {"b", num()},
                   {"select", pair()}},
                  {"span", "g", "select"});
}

Json profile_schema() {
    return object({{"kind", Json{{"enum", {"points", "growth"}}}},
                   {"points", array_of(num(0.0))},
                   {"f", array_of(num(0.0))},
                   {"f_times_c", num(0.0, true)},
                   {"reserve_level", integer(0)},
                   {"reserve_index", integer(0)},
                   {"placement_seed", integer(0)},
                   {"label", str()}},
                  {"kind"});
}

Json root(const std::string& command, Json props, std::vector<std::string> required) {
    props["command"] = kind(command.c_str());
    props["seed"] = integer(0);
    props["out"] = str();
    props["threads"] = integer(1);
    props["window"] = pair();
    props["notes"] = str();
    Json j = object(std::move(props), std::move(required));
    j["$schema"] = "http://json-schema.org/draft-07/schema#";
    j["title"] = "maxstab " + command;
    j["definitions"] = Json{{"set", set_definition()}};
    return j;
}

std::string type_of(const Json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number()) return "number";
    return "null";
}

bool type_ok(const Json& v, const std::string& t) {
    const std::string actual = type_of(v);
    if (t == "number") return actual == "number" || actual == "integer";
    return actual == t;
}

void check(const Json& v, const Json& s, const Json& rootdoc, const std::string& where);

void check_one_of(const Json& v, const Json& s, const Json& rootdoc, const std::string& where) {
    const Json& variants = s.at("oneOf");
    // discriminate on a const "kind" property when the variants carry one
    if (v.is_object() && v.contains("kind")) {
        std::string allowed;
        for (const auto& var : variants) {
            const Json& k = var.at("properties").at("kind").at("const");
            if (v.at("kind") == k) return check(v, var, rootdoc, where);
            allowed += (allowed.empty() ? "" : ", ") + k.get<std::string>();
        }
        throw ConfigError(where + ".kind", "unknown kind " + v.at("kind").dump() + " (expected one of " + allowed + ")");
    }
    if (v.is_object()) throw ConfigError(where, "missing required key 'kind'");
    throw ConfigError(where, "expected object, got " + type_of(v));
}

void check(const Json& v, const Json& s, const Json& rootdoc, const std::string& where) {
    if (s.contains("$ref")) {
        const std::string ref = s.at("$ref");
        const std::string prefix = "#/definitions/";
        if (ref.rfind(prefix, 0) != 0) throw std::logic_error("schema: unsupported $ref " + ref);
        return check(v, rootdoc.at("definitions").at(ref.substr(prefix.size())), rootdoc, where);
    }
    if (s.contains("oneOf")) return check_one_of(v, s, rootdoc, where);
    if (s.contains("const") && v != s.at("const"))
        throw ConfigError(where, "expected " + s.at("const").dump() + ", got " + v.dump());
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s.at("enum")) found = found || v == e;
        if (!found) throw ConfigError(where, "value " + v.dump() + " not in " + s.at("enum").dump());
    }
    if (s.contains("type") && !type_ok(v, s.at("type")))
        throw ConfigError(where, "expected " + s.at("type").get<std::string>() + ", got " + type_of(v));
    if (v.is_number()) {
        const double x = v.get<double>();
        if (s.contains("minimum") && x < s.at("minimum").get<double>())
            throw ConfigError(where, "value " + v.dump() + " below minimum " + s.at("minimum").dump());
        if (s.contains("exclusiveMinimum") && !(x > s.at("exclusiveMinimum").get<double>()))
            throw ConfigError(where, "value " + v.dump() + " must exceed " + s.at("exclusiveMinimum").dump());
        if (s.contains("maximum") && x > s.at("maximum").get<double>())
            throw ConfigError(where, "value " + v.dump() + " above maximum " + s.at("maximum").dump());
    }
    if (v.is_array()) {
        if (s.contains("minItems") && v.size() < s.at("minItems").get<std::size_t>())
            throw ConfigError(where, "needs at least " + s.at("minItems").dump() + " items");
        if (s.contains("maxItems") && v.size() > s.at("maxItems").get<std::size_t>())
            throw ConfigError(where, "allows at most " + s.at("maxItems").dump() + " items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                check(v[i], s.at("items"), rootdoc, where + "[" + std::to_string(i) + "]");
    }
    if (v.is_object()) {
        const Json empty = Json::object();
        const Json& props = s.contains("properties") ? s.at("properties") : empty;
        if (s.contains("required"))
            for (const auto& k : s.at("required"))
                if (!v.contains(k.get<std::string>()))
                    throw ConfigError(where, "missing required key '" + k.get<std::string>() + "'");
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (props.contains(it.key())) {
                check(it.value(), props.at(it.key()), rootdoc, where + "." + it.key());
            } else if (s.value("additionalProperties", true) == false) {
                throw ConfigError(where + "." + it.key(), "unknown key");
            }
        }
    }
}

Interval window_or(const Json& j, Interval fallback) {
    return j.contains("window") ? interval_from_json(j.at("window")) : fallback;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"classify-set", "match-prob", "verify-formula", "oracle",
                                                "time-change",  "generate-set", "prune",        "report"};
    return names;
}

Json schema_for(const std::string& command) {
    if (command == "classify-set")
        return root(command, {{"set", set_ref()}, {"ladder", ladder_schema()}, {"match", match_schema()}}, {"set"});
    if (command == "match-prob")
        return root(command,
                    {{"sets", array_of(set_ref(), 1)},
                     {"G", set_ref()},
                     {"interval", pair()},
                     {"level", integer(2, 22)},
                     {"replicas", integer(1)},
                     {"match", match_schema()}},
                    {"sets", "interval"});
    if (command == "verify-formula")
        return root(command,
                    {{"cases", array_of(object({{"set", set_ref()}, {"pieces", array_of(piece_schema(), 1)},
                                                {"label", str()}},
                                               {"set", "pieces"}),
                                        1)},
                     {"level", integer(4, 20)},
                     {"replicas", integer(1000)},
                     {"match", match_schema()}},
                    {"cases"});
    if (command == "oracle")
        return root(command, {{"fixture", str()}, {"mc_samples", integer(0)}}, {"fixture"});
    if (command == "time-change")
        return root(command,
                    {{"set", set_ref()},
                     {"level", integer(4, 20)},
                     {"intervals", integer(1)},
                     {"replicas", integer(1)},
                     {"checkpoints", integer(1)},
                     {"w", integer(1)},
                     {"eta", integer(0)}},
                    {"set"});
    if (command == "generate-set")
        return root(command,
                    {{"set", set_ref()},
                     {"certify", object({{"points", integer(1)},
                                         {"j_lo", integer(1)},
                                         {"j_hi", integer(2)},
                                         {"g_family", Json{{"enum", {"log_power", "power"}}}},
                                         {"g_param", num()}})}},
                    {"set"});
    if (command == "prune")
        return root(command,
                    {{"mode", Json{{"enum", {"A", "B"}}}},
                     {"preset", object({{"p_a", num(0.0, true)},
                                        {"p_q", num(0.0, true)},
                                        {"c_q", num(0.0)},
                                        {"zeta_q", num(0.0, true)},
                                        {"m", integer(1)},
                                        {"n_max", integer(1, 62)}})},
                     {"population", array_of(profile_schema(), 1)},
                     {"targets", array_of(object({{"level", integer(0, 62)}, {"atoms", array_of(integer(0), 1)},
                                                  {"label", str()}},
                                                 {"level", "atoms"}))},
                     {"runs", integer(1)}},
                    {"mode", "population"});
    if (command == "report")
        return root(command, {{"inputs", array_of(str(), 1)}, {"title", str()}}, {"inputs"});
    throw ConfigError("$.command", "unknown subcommand '" + command + "'");
}

Json all_schemas() {
    Json all = Json::object();
    for (const auto& c : subcommands()) all[c] = schema_for(c);
    return all;
}

void validate(const Json& value, const Json& schema) { check(value, schema, schema, "$"); }

Interval interval_from_json(const Json& j) {
    const Interval iv{j.at(0).get<double>(), j.at(1).get<double>()};
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("interval [" + format_real(iv.lo) + ", " + format_real(iv.hi) + "] is empty");
    return iv;
}

MatchConfig match_from_json(const Json& j) {
    MatchConfig m;
    m.eta = j.value("eta", m.eta);
    m.theta_mem = j.value("theta_mem", m.theta_mem);
    m.w = j.value("w", m.w);
    m.validate();
    return m;
}

LadderProtocol ladder_from_json(const Json& j, std::uint64_t seed) {
    LadderProtocol p;
    p.seed = seed;
    if (j.contains("levels")) p.levels = j.at("levels").get<std::vector<int>>();
    p.w0 = j.value("w0", p.w0);
    p.L0 = j.value("L0", p.L0);
    p.growth = j.value("growth", p.growth);
    p.replicas = j.value("replicas", p.replicas);
    p.stable_threshold = j.value("stable_threshold", p.stable_threshold);
    p.unstable_threshold = j.value("unstable_threshold", p.unstable_threshold);
    p.flat_stable_threshold = j.value("flat_stable_threshold", p.flat_stable_threshold);
    return p;
}

CensorSet set_from_json(const Json& d, std::uint64_t seed, const std::filesystem::path& base,
                        const std::string& where) {
    const std::string k = d.at("kind");
    try {
        if (k == "elementary") {
            std::vector<Interval> iv;
            for (const auto& p : d.at("intervals")) iv.push_back(interval_from_json(p));
            return d.contains("window") ? make_elementary(iv, interval_from_json(d.at("window"))) : make_elementary(iv);
        }
        if (k == "cantor_alpha") {
            const double a = d.at("alpha");
            return make_cantor(alpha_schedule(a, d.at("depth")), window_or(d, {0.0, 1.0}), a);
        }
        if (k == "cantor_schedule") return make_cantor(d.at("r").get<std::vector<double>>(), window_or(d, {0.0, 1.0}));
        if (k == "cantor_uniform") return make_cantor(uniform_schedule(d.at("r"), d.at("depth")), window_or(d, {0.0, 1.0}));
        if (k == "subordinator") {
            SubordinatorParams p;
            const std::string tail = d.at("tail");
            p.tail = tail == "stable" ? TailKind::Stable : tail == "log_tail" ? TailKind::LogTail : TailKind::None;
            p.drift = d.value("drift", p.drift);
            p.rho = d.value("rho", p.rho);
            p.scale = d.value("scale", p.scale);
            p.gamma = d.value("gamma", p.gamma);
            p.x_min = d.value("x_min", p.x_min);
            p.gap_eps = d.value("gap_eps", p.gap_eps);
            Engine rng = make_engine(seed, {kTagSubordinator, d.value("stream", std::uint64_t{0})});
            return sample_subordinator_range(p, d.value("horizon", 0.0), rng, d.value("cover", 1.0)).set;
        }
        if (k == "complement") return complement(set_from_json(d.at("of"), seed, base, where + ".of"));
        if (k == "file") {
            const std::filesystem::path p = base / d.at("path").get<std::string>();
            std::ifstream in(p);
            if (!in) throw std::runtime_error("cannot open " + p.string());
            return read_set(in);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where, e.what());
    }
    throw ConfigError(where + ".kind", "unknown kind '" + k + "'");
}

std::string config_hash(const Json& config) { return fnv1a_hex(config.dump()); }

}  // namespace maxstab
