#include "maxstab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace maxstab {

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string evidence_csv(const std::vector<CsvRow>& rows, const std::string& config_hash, std::uint64_t seed) {
    std::ostringstream os;
    os << "# config_hash=" << config_hash << " seed=" << seed << "\n";
    os << "label,param,n,mean,stderr,ci_lo,ci_hi\n";
    for (const auto& r : rows) {
        os << r.label << ',' << format_real(r.param) << ',' << r.est.n << ',' << format_real(r.est.mean()) << ','
           << format_real(r.est.stderr_()) << ',' << format_real(r.est.ci_lo()) << ','
           << format_real(r.est.ci_hi()) << '\n';
    }
    return os.str();
}

std::vector<CsvRow> parse_evidence_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<CsvRow> out;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "label,param,n,mean,stderr,ci_lo,ci_hi") throw std::runtime_error("evidence csv: bad header");
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string f[7];
        for (auto& s : f)
            if (!std::getline(ls, s, ',')) throw std::runtime_error("evidence csv: short row '" + line + "'");
        CsvRow r;
        r.label = f[0];
        r.param = std::stod(f[1]);
        // only the summary columns survive a CSV round trip; keep n and mean
        r.est.label = f[0];
        r.est.proportion = false;
        r.est.n = std::stoull(f[2]);
        const double mean = std::stod(f[3]), se = std::stod(f[4]);
        const double n = static_cast<double>(r.est.n);
        r.est.sum = mean * n;
        // reconstruct a sum of squares consistent with the stored standard error
        r.est.sumsq = n > 1 ? se * se * n * (n - 1) + n * mean * mean : mean * mean * n;
        out.push_back(r);
    }
    return out;
}

namespace {

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, const std::string& config_hash, std::uint64_t seed) {
    const double W = 640, H = 400, ml = 60, mr = 150, mt = 40, mb = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, i < s.lo.size() ? s.lo[i] : s.y[i]);
            y1 = std::max(y1, i < s.hi.size() ? s.hi[i] : s.y[i]);
        }
    if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
    if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<!-- config_hash=" << config_hash << " seed=" << seed << " -->\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = y0 + (y1 - y0) * i / 4.0, xv = x0 + (x1 - x0) * i / 4.0;
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << format_real(std::round(yv * 1000) / 1000) << "</text>\n";
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">" << format_real(std::round(xv * 100) / 100) << "</text>\n";
    }
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << esc(xlabel) << "</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (mt + H - mb) / 2 << ")\">" << esc(ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = kColors[k % 6];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        os << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
            if (i < s.lo.size() && i < s.hi.size())
                os << "<line x1=\"" << px(s.x[i]) << "\" y1=\"" << py(s.lo[i]) << "\" x2=\"" << px(s.x[i]) << "\" y2=\"" << py(s.hi[i]) << "\" stroke=\"" << col << "\"/>\n";
        }
        os << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 16 * (k + 1) << "\" fill=\"" << col << "\">" << esc(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace maxstab
