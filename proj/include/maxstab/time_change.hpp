#pragma once
#include <vector>

#include "maxstab/coupling.hpp"

namespace maxstab {

// rho(t) = |E ∩ [t_start, t]| at the grid nodes and its right-continuous inverse
// zeta(s) = inf{t : rho(t) > s} on a dyadic range grid no finer than the time grid.
struct TimeChange {
    TimeGrid grid;
    TimeGrid range;
    std::vector<double> rho;   // per time node
    std::vector<double> zeta;  // per range node
    double total = 0.0;
};

TimeChange build_time_change(const CensorSet& set, const TimeGrid& grid);

struct PushforwardCheck {
    std::size_t intervals = 0;
    std::size_t passed = 0;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Lebesgue measure of {s : zeta(s) in I} against |E ∩ I| on `count` dyadic intervals.
PushforwardCheck check_pushforward(const CensorSet& set, const TimeChange& tc, std::size_t count, Engine& rng);

// Censored path read at zeta(s_j), nearest time node.
GridPath time_changed_censored(const CoupledSample& sample, const TimeChange& tc);

struct Correspondence {
    std::uint64_t forward_total = 0, forward_hit = 0;  // censored maxima -> time-changed maxima
    std::uint64_t reverse_total = 0, reverse_hit = 0;  // time-changed maxima -> censored maxima
    double rate() const;
};

Correspondence maxima_correspondence(const CoupledSample& sample, const TimeChange& tc, int w, int eta);

struct TimeChangeRun {
    std::vector<double> s;                // checkpoint range times
    std::vector<Estimate> second_moment;  // E[Y(s)^2], expected to equal s
    std::vector<char> within;             // |mean - s| <= 3 stderr
    Correspondence corr;
};

// Replica r draws from stream (seed, coupled, level, r); checkpoints are range
// nodes at s = total * j / (checkpoints + 1).
TimeChangeRun run_time_change(const CensorSet& set, const TimeChange& tc, std::size_t replicas,
                              std::size_t checkpoints, int w, int eta, std::uint64_t seed,
                              Exec exec = Exec::Parallel);

}  // namespace maxstab
