#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maxstab/coupling.hpp"

namespace maxstab {

enum class Provenance { Original, Resampled };

struct SignEntry {
    std::size_t index;
    int sign;
    Provenance provenance;
};

struct SignField {
    std::vector<SignEntry> entries;  // sorted by node index
    // 0 when k carries no sign (the convention for NONE).
    int sign_at(std::size_t k) const;
    std::vector<std::size_t> indices() const;
};

SignField attach_signs(const std::vector<double>& values, int w, Engine& rng);
SignField attach_signs(const GridPath& path, int w, Engine& rng);

struct ConditionalCopy {
    std::vector<double> WE;
    SignField field;
    std::size_t matched = 0;
};

// Signs for the maxima of WE: copied from the matched maximum of W when both lie
// in E, fresh otherwise.
ConditionalCopy conditional_copy(const CoupledSample& sample, const CensorSet& set, const SignField& field,
                                 const MatchConfig& cfg, Engine& rng);

enum class GKind { Const, ClipExp, Indicator, Custom };

// g sees the full increment array and its own cell range [lo, hi).
using PieceFn = std::function<double(const std::vector<double>& incr, std::size_t lo, std::size_t hi)>;

struct Piece {
    Interval span;        // part of the window
    GKind g = GKind::Const;
    double a = 1.0;       // Const value, ClipExp rate, Indicator level
    double b = 1.0;       // ClipExp clip
    PieceFn custom;
    Interval select;      // argmax subinterval inside span
};

struct ProductFunctional {
    std::vector<Piece> pieces;
};

double evaluate_piece(const Piece& p, const std::vector<double>& incr, std::size_t lo, std::size_t hi);

// Throws when some piece changes under perturbation of increments off its span.
void check_locality(const ProductFunctional& f, const TimeGrid& grid, std::uint64_t seed);

struct FormulaCheck {
    Estimate lhs, rhs;
    std::vector<Estimate> rhs_pieces;
    Estimate matched_signs;  // fraction of WE maxima in E that inherited a sign
    bool compatible = false;
    double z = 0.0;
};

FormulaCheck verify_probability_formula(const CensorSet& set, const ProductFunctional& f, const TimeGrid& grid,
                                        const MatchConfig& cfg, std::size_t replicas, std::uint64_t seed,
                                        Exec exec = Exec::Parallel);

}  // namespace maxstab
