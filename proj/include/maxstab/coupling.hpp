#pragma once
#include <optional>
#include <string>
#include <vector>

#include "maxstab/censor.hpp"
#include "maxstab/path.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

enum class Exec { Serial, Parallel };

struct MatchConfig {
    int eta = 1;             // match tolerance in cells
    double theta_mem = 0.5;  // node-centred cell mass fraction that counts as "in E"
    int w = 2;               // robustness window
    void validate() const;
};

// One exact joint draw at the grid nodes. Per cell the draw order is A, B, B', A'.
struct CoupledSample {
    TimeGrid grid;
    std::vector<double> W, Wprime, censored, WE;
    std::vector<double> comp, comp_prime;  // complement parts of W and W'
};

CoupledSample draw_coupled(const CensorSet& set, const TimeGrid& grid, Engine& rng);

// Per-(set, grid) quantities reused across replicas.
struct CellSplit {
    TimeGrid grid;
    std::vector<double> mass;      // exact measure of E in each cell
    std::vector<double> sd_in, sd_out;
    std::vector<char> node_in;     // theta rule on node-centred cells
    std::size_t nodes_in = 0;
};

CellSplit split_cells(const CensorSet& set, const TimeGrid& grid, double theta_mem);

// Matched reference entry for node k: exact hit first, then nearest within eta,
// leftmost on ties. `ref` must be sorted.
std::optional<std::size_t> match_node(const std::vector<std::size_t>& ref, std::size_t k, int eta);

struct FractionCounts {
    std::uint64_t w_in_E = 0;        // maxima of W in E
    std::uint64_t shared = 0;        // ... matched by a maximum of WE in E
    std::uint64_t contained = 0;     // ... matched by a maximum of the censored path
    std::uint64_t censored_max = 0;  // maxima of the censored path
    std::uint64_t censored_hit = 0;  // ... matched by a maximum of W in E
    std::uint64_t we_in_E = 0;       // maxima of WE in E
    std::uint64_t we_shared = 0;     // ... matched by a maximum of W in E (roles swapped)
    FractionCounts& operator+=(const FractionCounts& o);
    bool operator==(const FractionCounts& o) const = default;
};

// Fused kernel over replicas. Replica r uses stream (seed, tag, level, r).
FractionCounts fraction_counts(const CellSplit& split, const MatchConfig& cfg, std::size_t replicas,
                               std::uint64_t seed, Exec exec = Exec::Parallel);
// Straightforward reference: draw_coupled + detect_maxima + linear matching.
FractionCounts fraction_counts_reference(const CensorSet& set, const TimeGrid& grid, const MatchConfig& cfg,
                                         std::size_t replicas, std::uint64_t seed);

Estimate shared_maxima_fraction(const CensorSet& set, const TimeGrid& grid, const MatchConfig& cfg,
                                std::size_t replicas, std::uint64_t seed, Exec exec = Exec::Parallel);

struct Containment {
    Estimate forward;  // maxima of W in E that are maxima of the censored path
    Estimate dual;     // maxima of the censored path that are maxima of W in E
};
Containment censored_maxima_containment(const CensorSet& set, const TimeGrid& grid, const MatchConfig& cfg,
                                        std::size_t replicas, std::uint64_t seed, Exec exec = Exec::Parallel);

struct MatchProb {
    Estimate estimate;
    std::uint64_t none_W = 0, none_WE = 0;  // boundary outcomes
};

MatchProb maximizer_match_prob(const CensorSet& set, Interval ab, const std::optional<CensorSet>& G,
                               const TimeGrid& grid, const MatchConfig& cfg, std::size_t replicas,
                               std::uint64_t seed, Exec exec = Exec::Parallel);

enum class Verdict { Stable, Unstable, Negligible, Undecided };
const char* to_string(Verdict v);

struct LadderProtocol {
    std::vector<int> levels{8, 10, 12, 14};
    Interval window{0.0, 1.0};
    int w0 = 2;
    int L0 = -1;            // level at which w = w0; defaults to the first ladder level
    double growth = 0.5;    // w doubles every 1/growth levels
    std::size_t replicas = 1000;
    double stable_threshold = 0.75;
    double unstable_threshold = 0.9;
    double flat_stable_threshold = 0.99;
    int eta = 1;
    double theta_mem = 0.5;
    std::uint64_t seed = 1;

    int window_for(int level) const;
};

struct LevelEvidence {
    int level = 0;
    int w = 0;
    std::size_t nodes_in_E = 0;
    FractionCounts counts;
    Estimate shared, contained, dual;
};

struct Classification {
    Verdict verdict = Verdict::Undecided;
    Verdict by_shared = Verdict::Undecided;
    Verdict by_containment = Verdict::Undecided;
    double measure = 0.0;
    std::string reason;
    std::vector<LevelEvidence> levels;
    std::optional<TrendReport> shared_trend, contained_trend, dual_trend;
};

std::vector<LevelEvidence> run_ladder(const CensorSet& set, const LadderProtocol& p, Exec exec = Exec::Parallel);
Verdict verdict_from(const TrendReport& t, const LadderProtocol& p);
Classification classify_set(const CensorSet& set, const LadderProtocol& p, Exec exec = Exec::Parallel);

}  // namespace maxstab
