#include "maxstab/censor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace maxstab {

const char* to_string(SetKind k) {
    switch (k) {
        case SetKind::Elementary: return "elementary";
        case SetKind::Cantor: return "cantor";
        case SetKind::SubordinatorRange: return "subordinator_range";
        case SetKind::Complement: return "complement";
    }
    return "?";
}

const char* to_string(Predicted p) {
    switch (p) {
        case Predicted::Stable: return "STABLE";
        case Predicted::Unstable: return "UNSTABLE";
        case Predicted::Gap: return "GAP";
    }
    return "?";
}

namespace {

void write_real(std::ostream& os, double x) { os << std::hexfloat << x << std::defaultfloat; }

double read_real(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw std::runtime_error("set format: unexpected end of input");
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw std::runtime_error("set format: bad number '" + tok + "'");
    return x;
}

void expect(std::istream& is, const std::string& word) {
    std::string tok;
    if (!(is >> tok) || tok != word) throw std::runtime_error("set format: expected '" + word + "', got '" + tok + "'");
}

void check_window(Interval w) {
    if (!(w.lo < w.hi)) throw std::invalid_argument("set window must satisfy lo < hi");
}

// Sorted disjoint intervals with prefix lengths; shared by elementary sets and gap lists.
struct IntervalList {
    std::vector<Interval> iv;
    std::vector<double> prefix;  // prefix[i] = total length of iv[0..i)

    void build() {
        prefix.assign(iv.size() + 1, 0.0);
        for (std::size_t i = 0; i < iv.size(); ++i) prefix[i + 1] = prefix[i] + (iv[i].hi - iv[i].lo);
    }
    // Length of the union within (-inf, t].
    double covered(double t) const {
        auto it = std::upper_bound(iv.begin(), iv.end(), t, [](double x, const Interval& a) { return x < a.lo; });
        const std::size_t i = static_cast<std::size_t>(it - iv.begin());
        if (i == 0) return 0.0;
        const Interval& last = iv[i - 1];
        return prefix[i - 1] + std::min(t, last.hi) - last.lo;
    }
};

std::vector<Interval> normalize(std::vector<Interval> v) {
    for (auto& a : v) {
        if (a.lo > a.hi) std::swap(a.lo, a.hi);
    }
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& a : v) {
        if (!out.empty() && a.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, a.hi);
        else
            out.push_back(a);
    }
    return out;
}

class ElementaryImpl final : public SetImpl {
public:
    ElementaryImpl(std::vector<Interval> iv, Interval w) : w_(w) {
        check_window(w);
        list_.iv.clear();
        for (auto a : normalize(std::move(iv))) {
            a.lo = std::max(a.lo, w.lo);
            a.hi = std::min(a.hi, w.hi);
            if (a.lo <= a.hi) list_.iv.push_back(a);
        }
        list_.build();
    }
    SetKind kind() const override { return SetKind::Elementary; }
    Interval window() const override { return w_; }
    double cdf(double t) const override { return list_.covered(t); }
    void write(std::ostream& os) const override {
        os << "kind elementary\nwindow ";
        write_real(os, w_.lo);
        os << ' ';
        write_real(os, w_.hi);
        os << "\nintervals " << list_.iv.size() << '\n';
        for (const auto& a : list_.iv) {
            write_real(os, a.lo);
            os << ' ';
            write_real(os, a.hi);
            os << '\n';
        }
    }
    const std::vector<Interval>& intervals() const { return list_.iv; }

private:
    Interval w_;
    IntervalList list_;
};

// Nested middle-gap set: every level-(k-1) interval of length l keeps two
// children of length l(1-r_k)/2 at its ends.
class CantorImpl final : public SetImpl {
public:
    CantorImpl(std::vector<double> r, Interval w, double alpha) : r_(std::move(r)), w_(w), alpha_(alpha) {
        check_window(w);
        if (r_.size() > 60) throw std::invalid_argument("cantor depth must be <= 60");
        total_ = w.hi - w.lo;
        for (double rk : r_) {
            if (!(rk >= 0.0 && rk < 1.0)) throw std::invalid_argument("cantor gap fractions must lie in [0,1)");
            total_ *= (1.0 - rk);
        }
    }
    SetKind kind() const override { return SetKind::Cantor; }
    Interval window() const override { return w_; }
    double cdf(double t) const override {
        double a = w_.lo, len = w_.hi - w_.lo, mass = total_, acc = 0.0;
        for (double rk : r_) {
            if (t <= a) return acc;
            if (t >= a + len) return acc + mass;
            const double child = len * (1.0 - rk) / 2.0;
            const double half = mass / 2.0;
            if (t < a + child) {
                len = child;
                mass = half;
                continue;
            }
            if (t < a + len - child) return acc + half;
            acc += half;
            a = a + len - child;
            len = child;
            mass = half;
        }
        if (t <= a) return acc;
        if (t >= a + len) return acc + mass;
        return acc + (t - a) * (mass / len);
    }
    void write(std::ostream& os) const override {
        os << "kind cantor\nwindow ";
        write_real(os, w_.lo);
        os << ' ';
        write_real(os, w_.hi);
        os << "\nalpha ";
        write_real(os, alpha_);
        os << "\nschedule " << r_.size() << '\n';
        for (double rk : r_) {
            write_real(os, rk);
            os << '\n';
        }
    }
    const std::vector<double>& schedule() const { return r_; }
    double alpha() const { return alpha_; }
    double total() const { return total_; }

private:
    std::vector<double> r_;
    Interval w_;
    double alpha_;
    double total_;
};

class SubordinatorImpl final : public SetImpl {
public:
    SubordinatorImpl(SubordinatorInfo info, std::vector<Interval> gaps) : info_(info) {
        gaps_.iv = std::move(gaps);
        for (std::size_t i = 0; i < gaps_.iv.size(); ++i) {
            const auto& g = gaps_.iv[i];
            if (!(g.lo <= g.hi) || (i && g.lo < gaps_.iv[i - 1].hi))
                throw std::invalid_argument("subordinator gaps must be sorted and disjoint");
        }
        gaps_.build();
        check_window({0.0, info_.range_end});
    }
    SetKind kind() const override { return SetKind::SubordinatorRange; }
    Interval window() const override { return {0.0, info_.range_end}; }
    double cdf(double t) const override { return t - gaps_.covered(t); }
    void write(std::ostream& os) const override {
        const auto& p = info_.params;
        os << "kind subordinator_range\ndrift ";
        write_real(os, p.drift);
        os << "\ntail " << (p.tail == TailKind::None ? "none" : p.tail == TailKind::Stable ? "stable" : "log");
        os << "\nrho ";
        write_real(os, p.rho);
        os << "\nscale ";
        write_real(os, p.scale);
        os << "\ngamma ";
        write_real(os, p.gamma);
        os << "\nx_min ";
        write_real(os, p.x_min);
        os << "\ngap_eps ";
        write_real(os, p.gap_eps);
        os << "\nhorizon ";
        write_real(os, info_.horizon);
        os << "\nrange_end ";
        write_real(os, info_.range_end);
        os << "\nbias ";
        write_real(os, info_.truncation_bias);
        os << "\npredicted " << to_string(info_.predicted);
        os << "\ngaps " << gaps_.iv.size() << '\n';
        for (const auto& g : gaps_.iv) {
            write_real(os, g.lo);
            os << ' ';
            write_real(os, g.hi);
            os << '\n';
        }
    }
    const SubordinatorInfo& info() const { return info_; }
    const std::vector<Interval>& gaps() const { return gaps_.iv; }

private:
    SubordinatorInfo info_;
    IntervalList gaps_;
};

class ComplementImpl final : public SetImpl {
public:
    explicit ComplementImpl(CensorSet inner) : inner_(std::move(inner)) {}
    SetKind kind() const override { return SetKind::Complement; }
    Interval window() const override { return inner_.window(); }
    double cdf(double t) const override { return (t - inner_.window().lo) - inner_.impl().cdf(t); }
    void write(std::ostream& os) const override {
        os << "kind complement\nof\n";
        inner_.impl().write(os);
    }
    const CensorSet& inner() const { return inner_; }

private:
    CensorSet inner_;
};

template <class T>
const T& as(const CensorSet& s, SetKind k) {
    if (!s.valid() || s.kind() != k) throw std::invalid_argument(std::string("set is not of kind ") + to_string(k));
    return static_cast<const T&>(s.impl());
}

CensorSet read_body(std::istream& is) {
    expect(is, "kind");
    std::string kind;
    is >> kind;
    if (kind == "elementary") {
        expect(is, "window");
        Interval w{read_real(is), 0};
        w.hi = read_real(is);
        expect(is, "intervals");
        std::size_t n;
        if (!(is >> n)) throw std::runtime_error("set format: bad interval count");
        std::vector<Interval> iv(n);
        for (auto& a : iv) {
            a.lo = read_real(is);
            a.hi = read_real(is);
        }
        return make_elementary(std::move(iv), w);
    }
    if (kind == "cantor") {
        expect(is, "window");
        Interval w{read_real(is), 0};
        w.hi = read_real(is);
        expect(is, "alpha");
        const double alpha = read_real(is);
        expect(is, "schedule");
        std::size_t n;
        if (!(is >> n)) throw std::runtime_error("set format: bad schedule length");
        std::vector<double> r(n);
        for (auto& x : r) x = read_real(is);
        return make_cantor(std::move(r), w, alpha);
    }
    if (kind == "subordinator_range") {
        SubordinatorInfo info;
        auto& p = info.params;
        expect(is, "drift");
        p.drift = read_real(is);
        expect(is, "tail");
        std::string tail;
        is >> tail;
        if (tail == "none") p.tail = TailKind::None;
        else if (tail == "stable") p.tail = TailKind::Stable;
        else if (tail == "log") p.tail = TailKind::LogTail;
        else throw std::runtime_error("set format: unknown tail '" + tail + "'");
        expect(is, "rho");
        p.rho = read_real(is);
        expect(is, "scale");
        p.scale = read_real(is);
        expect(is, "gamma");
        p.gamma = read_real(is);
        expect(is, "x_min");
        p.x_min = read_real(is);
        expect(is, "gap_eps");
        p.gap_eps = read_real(is);
        expect(is, "horizon");
        info.horizon = read_real(is);
        expect(is, "range_end");
        info.range_end = read_real(is);
        expect(is, "bias");
        info.truncation_bias = read_real(is);
        expect(is, "predicted");
        std::string pred;
        is >> pred;
        info.predicted = pred == "STABLE" ? Predicted::Stable : pred == "UNSTABLE" ? Predicted::Unstable : Predicted::Gap;
        expect(is, "gaps");
        std::size_t n;
        if (!(is >> n)) throw std::runtime_error("set format: bad gap count");
        std::vector<Interval> gaps(n);
        for (auto& g : gaps) {
            g.lo = read_real(is);
            g.hi = read_real(is);
        }
        info.jumps = n;
        return make_subordinator_range(info, std::move(gaps));
    }
    if (kind == "complement") {
        expect(is, "of");
        return complement(read_body(is));
    }
    throw std::runtime_error("set format: unknown kind '" + kind + "'");
}

}  // namespace

SetKind CensorSet::kind() const { return impl_->kind(); }
Interval CensorSet::window() const { return impl_->window(); }

double CensorSet::cdf(double t) const {
    const Interval w = impl_->window();
    if (t < w.lo || t > w.hi) throw std::out_of_range("measure query outside the set window");
    if (t == w.lo) return 0.0;
    return impl_->cdf(t);
}

double CensorSet::measure(double t, double u) const {
    if (t > u) std::swap(t, u);
    return std::max(0.0, cdf(u) - cdf(t));
}

double CensorSet::total() const {
    const Interval w = window();
    return measure(w.lo, w.hi);
}

std::vector<double> CensorSet::cell_masses(const TimeGrid& grid) const {
    std::vector<double> F(grid.nodes());
    for (std::size_t k = 0; k < F.size(); ++k) F[k] = cdf(grid.time(k));
    std::vector<double> m(grid.cells());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::clamp(F[i + 1] - F[i], 0.0, grid.dt());
    return m;
}

std::vector<double> CensorSet::node_masses(const TimeGrid& grid) const {
    std::vector<double> out(grid.nodes());
    const double h = grid.dt() / 2.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double t = grid.time(k);
        const double a = std::max(grid.t_start(), t - h);
        const double b = std::min(grid.t_end(), t + h);
        out[k] = measure(a, b);
    }
    return out;
}

double CensorSet::quantile(double s) const {
    const Interval w = window();
    double lo = w.lo, hi = w.hi;
    for (int i = 0; i < 200 && lo < hi; ++i) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        if (cdf(mid) >= s) hi = mid;
        else lo = mid;
    }
    return hi;
}

CensorSet make_elementary(std::vector<Interval> intervals) {
    if (intervals.empty()) return make_elementary({}, {0.0, 1.0});
    // unit window unless the intervals reach outside it
    auto n = normalize(intervals);
    return make_elementary(std::move(intervals), {std::min(0.0, n.front().lo), std::max(1.0, n.back().hi)});
}

CensorSet make_elementary(std::vector<Interval> intervals, Interval window) {
    return CensorSet(std::make_shared<ElementaryImpl>(std::move(intervals), window));
}

CensorSet make_cantor(std::vector<double> r, Interval window, double alpha_target) {
    return CensorSet(std::make_shared<CantorImpl>(std::move(r), window, alpha_target));
}

CensorSet make_subordinator_range(const SubordinatorInfo& info, std::vector<Interval> gaps) {
    return CensorSet(std::make_shared<SubordinatorImpl>(info, std::move(gaps)));
}

CensorSet complement(const CensorSet& set) {
    if (set.kind() == SetKind::Complement) return static_cast<const ComplementImpl&>(set.impl()).inner();
    return CensorSet(std::make_shared<ComplementImpl>(set));
}

const std::vector<Interval>& elementary_intervals(const CensorSet& s) {
    return as<ElementaryImpl>(s, SetKind::Elementary).intervals();
}
const std::vector<double>& cantor_schedule(const CensorSet& s) { return as<CantorImpl>(s, SetKind::Cantor).schedule(); }
double cantor_alpha(const CensorSet& s) { return as<CantorImpl>(s, SetKind::Cantor).alpha(); }
const SubordinatorInfo& subordinator_info(const CensorSet& s) {
    return as<SubordinatorImpl>(s, SetKind::SubordinatorRange).info();
}
const std::vector<Interval>& subordinator_gaps(const CensorSet& s) {
    return as<SubordinatorImpl>(s, SetKind::SubordinatorRange).gaps();
}

std::vector<double> uniform_schedule(double r, int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    return std::vector<double>(static_cast<std::size_t>(depth), r);
}

std::vector<double> alpha_schedule(double alpha, int depth) {
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
    if (depth < 1 || depth > 40) throw std::invalid_argument("depth must lie in [1,40]");
    // tail[k]: fraction of a level-k interval removed by the deeper levels. A
    // level-k interval has length close to 2^-(k+1), hence the k+1.
    const double C = 0.5 * std::pow(3.0, alpha);
    std::vector<double> tail(static_cast<std::size_t>(depth) + 1);
    for (int k = 0; k <= depth; ++k) tail[k] = std::min(0.5, C * std::pow(k + 1.0, -alpha));
    std::vector<double> r(static_cast<std::size_t>(depth));
    for (int k = 1; k < depth; ++k) r[k - 1] = (tail[k - 1] - tail[k]) / (1.0 - tail[k]);
    r[depth - 1] = tail[depth - 1];  // the deepest level absorbs what is left
    return r;
}

void write_set(std::ostream& os, const CensorSet& s) {
    os << "maxstab-set 1\n";
    s.impl().write(os);
    os << "end\n";
}

CensorSet read_set(std::istream& is) {
    // leading '#' lines are comments
    while ((is >> std::ws).peek() == '#') is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    expect(is, "maxstab-set");
    std::string ver;
    is >> ver;
    if (ver != "1") throw std::runtime_error("set format: unsupported version " + ver);
    CensorSet s = read_body(is);
    expect(is, "end");
    return s;
}

std::string set_to_string(const CensorSet& s) {
    std::ostringstream os;
    write_set(os, s);
    return os.str();
}

CensorSet set_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_set(is);
}

}  // namespace maxstab
