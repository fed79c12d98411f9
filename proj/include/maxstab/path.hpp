#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "maxstab/rng.hpp"

namespace maxstab {

class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, int level);

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    int level() const { return level_; }
    std::size_t cells() const { return std::size_t{1} << level_; }
    std::size_t nodes() const { return cells() + 1; }
    double dt() const { return dt_; }
    double time(std::size_t k) const;
    // Nearest node index for a time inside the window.
    std::size_t nearest(double t) const;

    bool operator==(const TimeGrid& o) const {
        return t_start_ == o.t_start_ && t_end_ == o.t_end_ && level_ == o.level_;
    }

private:
    double t_start_, t_end_;
    int level_;
    double dt_;
};

struct GridPath {
    TimeGrid grid;
    std::vector<double> values;  // values[0] == 0
};

struct MaxRecord {
    std::size_t index = 0;
    double time = 0.0;
    double value = 0.0;
    int robustness = 0;
    bool tie = false;  // only set by argmax_on_interval
};

GridPath sample_path(const TimeGrid& grid, Engine& rng);
GridPath sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream);

GridPath refine_bridge(const GridPath& path, int target_level, Engine& rng);

// Restrict a path to a coarser level of the same window (every 2^k-th node).
GridPath restrict_to(const GridPath& path, int level);

// Strict maxima over w neighbours each side. Robustness is grown up to `cap`.
std::vector<MaxRecord> detect_maxima(const GridPath& path, int w, int cap = 0);
std::vector<std::size_t> maxima_indices(const std::vector<double>& v, int w);

// NONE (nullopt) when the maximal node sits on an endpoint of [a,b].
std::optional<MaxRecord> argmax_on_interval(const GridPath& path, double a, double b);
std::optional<std::size_t> argmax_nodes(const std::vector<double>& v, std::size_t lo, std::size_t hi,
                                        bool* tie = nullptr);

}  // namespace maxstab
