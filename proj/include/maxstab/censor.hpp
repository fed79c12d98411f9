#pragma once
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "maxstab/path.hpp"

namespace maxstab {

enum class SetKind { Elementary, Cantor, SubordinatorRange, Complement };
const char* to_string(SetKind k);

struct Interval {
    double lo, hi;
};

enum class TailKind { None, Stable, LogTail };

struct SubordinatorParams {
    double drift = 1.0;
    TailKind tail = TailKind::None;
    double rho = 0.5;     // stable index
    double scale = 1.0;   // stable scale c: tail mass c * x^-rho
    double gamma = 3.0;   // log-tail exponent
    double x_min = 1e-6;  // jumps below are discarded
    double gap_eps = 0.25;  // width of the undecided band above gamma = 3
};

enum class Predicted { Stable, Unstable, Gap };
const char* to_string(Predicted p);

struct SubordinatorInfo {
    SubordinatorParams params;
    double horizon = 0.0;       // T
    double range_end = 0.0;     // X(T)
    std::size_t jumps = 0;
    double truncation_bias = 0.0;  // expected discarded gap length over [0,T]
    Predicted predicted = Predicted::Stable;
};

class SetImpl;

// Immutable measurable set with exact interval measures. Cheap to copy.
class CensorSet {
public:
    CensorSet() = default;
    explicit CensorSet(std::shared_ptr<const SetImpl> impl) : impl_(std::move(impl)) {}

    SetKind kind() const;
    Interval window() const;
    // Lebesgue measure of E within [window.lo, t].
    double cdf(double t) const;
    // Lebesgue measure of E ∩ [t,u]; arguments are swapped when t > u.
    double measure(double t, double u) const;
    double total() const;
    // Per-cell measure of E on a grid whose window lies inside the set window.
    std::vector<double> cell_masses(const TimeGrid& grid) const;
    // Measure of E in the node-centred cell [t - dt/2, t + dt/2] clipped to the grid window.
    std::vector<double> node_masses(const TimeGrid& grid) const;
    // Smallest t with cdf(t) >= s (s in [0, total]).
    double quantile(double s) const;

    const SetImpl& impl() const { return *impl_; }
    bool valid() const { return static_cast<bool>(impl_); }

private:
    std::shared_ptr<const SetImpl> impl_;
};

class SetImpl {
public:
    virtual ~SetImpl() = default;
    virtual SetKind kind() const = 0;
    virtual Interval window() const = 0;
    virtual double cdf(double t) const = 0;  // t already clamped to the window
    virtual void write(std::ostream& os) const = 0;
};

CensorSet make_elementary(std::vector<Interval> intervals);
CensorSet make_elementary(std::vector<Interval> intervals, Interval window);
CensorSet make_cantor(std::vector<double> r, Interval window = {0.0, 1.0}, double alpha_target = 0.0);
CensorSet make_subordinator_range(const SubordinatorInfo& info, std::vector<Interval> gaps);
CensorSet complement(const CensorSet& set);

// Accessors for concrete kinds (throw on kind mismatch).
const std::vector<Interval>& elementary_intervals(const CensorSet& s);
const std::vector<double>& cantor_schedule(const CensorSet& s);
double cantor_alpha(const CensorSet& s);
const SubordinatorInfo& subordinator_info(const CensorSet& s);
const std::vector<Interval>& subordinator_gaps(const CensorSet& s);

// Middle-gap schedules.
std::vector<double> uniform_schedule(double r, int depth);
// Schedule whose deficit fraction below level k is min(1/2, C (k+1)^-alpha), C = 3^alpha / 2.
std::vector<double> alpha_schedule(double alpha, int depth);

// Structured text format: exact round trip through hex floats.
void write_set(std::ostream& os, const CensorSet& s);
CensorSet read_set(std::istream& is);
std::string set_to_string(const CensorSet& s);
CensorSet set_from_string(const std::string& text);

}  // namespace maxstab
