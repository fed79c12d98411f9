#pragma once
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "maxstab/rng.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

using Rational = boost::multiprecision::cpp_rational;

// Discrete model: n-step +-1 walks, strict local maxima, E a union of cells.
enum class DGKind { One, Const, PosIndicator, Affine, Square };

struct DPiece {
    int lo = 0, hi = 0;          // cells [lo, hi)
    DGKind g = DGKind::One;
    Rational c = 1;              // Const value or Affine slope
    int sel_lo = 0, sel_hi = 0;  // argmax node range, inside [lo, hi]
};

struct OracleCase {
    std::string id;
    int n = 0;
    std::vector<bool> E;  // per cell
    std::vector<DPiece> pieces;
    bool has_expected = false;
    Rational expected_rhs;
};

struct OracleResult {
    Rational lhs, rhs;
    std::uint64_t outcomes = 0;
};

OracleResult brute_force_oracle(const OracleCase& c);

struct OracleMC {
    Estimate lhs, rhs;
};
// Monte Carlo run of the same discrete model.
OracleMC oracle_monte_carlo(const OracleCase& c, std::size_t samples, std::uint64_t seed);

// Versioned text fixture; see tests/fixtures/oracle_matrix_v1.txt.
std::vector<OracleCase> read_oracle_matrix(const std::string& path);
OracleCase parse_oracle_case(const std::string& line);

}  // namespace maxstab
