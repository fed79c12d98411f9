#pragma once
#include <string>
#include <vector>

#include "maxstab/stats.hpp"

namespace maxstab {

struct CsvRow {
    std::string label;
    double param = 0.0;
    Estimate est;
};

std::string fnv1a_hex(const std::string& text);

// label,param,n,mean,stderr,ci_lo,ci_hi with a '#' header naming hash and seed.
std::string evidence_csv(const std::vector<CsvRow>& rows, const std::string& config_hash, std::uint64_t seed);
std::vector<CsvRow> parse_evidence_csv(const std::string& text);

struct Series {
    std::string name;
    std::vector<double> x, y, lo, hi;
};

// Self-contained SVG line chart with CI whiskers.
std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, const std::string& config_hash, std::uint64_t seed);

std::string format_real(double x);

}  // namespace maxstab
