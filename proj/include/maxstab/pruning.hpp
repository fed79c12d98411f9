#pragma once
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "maxstab/coupling.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

// Dyadic atoms of [0,1]: atom (n, i) = [i 2^-n, (i+1) 2^-n).
struct AtomTower {
    int n_max = 25;
    static std::uint64_t atom_of(double x, int n);
    static std::uint64_t parent(std::uint64_t i) { return i >> 1; }
};

enum class ProfileKind { FinitePoints, Growth };

struct OccupancyProfile {
    ProfileKind kind = ProfileKind::FinitePoints;
    std::vector<double> points;  // FinitePoints
    // Growth: declared count f(n) (index n), placed inside the reserved atom
    // (reserve_level, reserve_index) with nested random children.
    std::vector<double> f;
    int reserve_level = 0;
    std::uint64_t reserve_index = 0;
    std::uint64_t placement_seed = 1;
    std::string label;
};

// Occupied atoms per level 0..n_max (sorted, distinct).
std::vector<std::vector<std::uint64_t>> occupied_atoms(const OccupancyProfile& p, int n_max);
std::vector<std::uint64_t> occupancy_counts(const OccupancyProfile& p, int n_max);

enum class PresetMode { SchemeA, SchemeB };

struct PruningPreset {
    PresetMode mode = PresetMode::SchemeA;
    // mode A: p(n) = a n^-q, c(n) = ceil(n^cq log(n+1))
    double p_a = 1.0, p_q = 3.5;
    double c_q = 3.5;
    // mode B: zeta(n) = n^-zq, p(n) = 1 - zeta(n)^(2^-n)
    double zeta_q = 3.0;
    int m = 1;
    int n_max = 25;

    double p(int n) const;
    double c(int n) const;
    double zeta(int n) const;
};

PruningPreset shipped_preset();

struct Condition {
    std::string name;
    bool pass = false;
    double partial = 0.0, tail_lo = 0.0, tail_hi = 0.0;
    std::string note;
};

struct PresetValidation {
    bool pass = false;
    std::vector<Condition> conditions;
    std::vector<double> delta;  // delta[m] for m = 0..n_max (index 0 unused)
};

PresetValidation validate_preset(const PruningPreset& preset);
// sqrt(sum_{n >= m} p(n)) including the analytic tail (upper bound side).
double delta_m(const PruningPreset& preset, int m);

// Counter-based pruning draw: a pure function of (seed, run, level, atom).
bool atom_pruned(const PruningPreset& preset, std::uint64_t seed, std::uint64_t run, int n, std::uint64_t atom);

// Per-run memo of pruning draws; only touched atoms are ever drawn.
class PruneMemo {
public:
    PruneMemo(const PruningPreset& preset, std::uint64_t seed, std::uint64_t run)
        : preset_(preset), seed_(seed), run_(run) {}
    bool pruned(int n, std::uint64_t atom);
    std::size_t draws() const { return memo_.size(); }

private:
    const PruningPreset& preset_;
    std::uint64_t seed_, run_;
    std::unordered_map<std::uint64_t, bool> memo_;
};

// survives_from[m] for m = 1..n_max (index 0 unused).
std::vector<char> survival_record(const std::vector<std::vector<std::uint64_t>>& atoms, PruneMemo& memo, int n_max);
std::vector<char> survival_record_direct(const std::vector<std::vector<std::uint64_t>>& atoms,
                                         const PruningPreset& preset, std::uint64_t seed, std::uint64_t run, int n_max);
std::vector<char> survival_record_eager(const std::vector<std::vector<std::uint64_t>>& atoms,
                                        const PruningPreset& preset, std::uint64_t seed, std::uint64_t run, int n_max);

struct SurvivalStats {
    int n_max = 0;
    std::size_t runs = 0;
    std::vector<std::string> labels;
    // survive[c][m]: number of runs in which configuration c survived from level m
    std::vector<std::vector<std::uint64_t>> survive;
    // retention[m][run] = surviving singletons / singletons
    std::vector<std::vector<double>> retention;
    std::size_t singletons = 0;
    Estimate survival(std::size_t config, int m) const;
};

SurvivalStats run_pruning(const std::vector<OccupancyProfile>& population, const PruningPreset& preset,
                          std::size_t runs, std::uint64_t seed, Exec exec = Exec::Parallel);

// prod_{n=m}^{n_max} (1 - p(n))^{K(n)}
double survival_oracle(const PruningPreset& preset, const std::vector<std::uint64_t>& K, int m);

struct RetentionRow {
    int m = 0;
    double delta = 0.0;
    double freq_below = 0.0;  // frequency of r_m <= 1 - delta_m
    double limit = 0.0;       // delta_m + 3 binomial stderr
    double mean_r = 0.0, mean_r_se = 0.0;
    bool expectation_ok = false;
    bool vacuous = false;
    bool pass = false;
};

std::vector<RetentionRow> check_retention_bound(const SurvivalStats& stats, const PruningPreset& preset);

struct HitReport {
    std::string label;
    double fraction = 0.0;  // atom fraction of the target
    Estimate hit;
    double oracle = 0.0;    // 1 - prod zeta(n)^fraction
};

struct ReportB {
    std::vector<HitReport> hits;
    SurvivalStats survival;
    std::vector<double> oracle;  // prod zeta(n)^(K(n)/2^n) per configuration
    std::vector<char> low_occupancy;
};

// Target x given as a union of atoms at `level`.
struct Target {
    int level = 1;
    std::vector<std::uint64_t> atoms;
    std::string label;
};

ReportB run_pruning_B(const std::vector<OccupancyProfile>& population, const std::vector<Target>& targets,
                      const PruningPreset& preset, std::size_t runs, std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace maxstab
