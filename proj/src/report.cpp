#include "bel/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bel::report {

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_loglog: need at least two matched points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog: positive data required");
        lx[i] = std::log10(x[i]);
        ly[i] = std::log10(y[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (f.intercept + f.slope * lx[i]);
        ss_res += r * r;
        f.max_residual = std::max(f.max_residual, std::abs(r));
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.conclusive = f.r2 >= 0.9;
    return f;
}

Check& ExperimentReport::add_check(const std::string& criterion, const std::string& description,
                                   double measured_value, const std::string& constraint,
                                   bool pass) {
    checks.push_back(
        {criterion, description, measured_value, constraint, pass ? Verdict::pass : Verdict::fail});
    return checks.back();
}

Check& ExperimentReport::add_inconclusive(const std::string& criterion,
                                          const std::string& description, double measured_value,
                                          const std::string& constraint) {
    checks.push_back({criterion, description, measured_value, constraint, Verdict::inconclusive});
    return checks.back();
}

bool ExperimentReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.verdict == Verdict::pass; });
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
} // namespace

bool ExperimentReport::check_le(const std::string& criterion, const std::string& what,
                                double value, double bound) {
    const bool ok = value <= bound;
    add_check(criterion, what, value, "<= " + fmt(bound), ok);
    return ok;
}

bool ExperimentReport::check_ge(const std::string& criterion, const std::string& what,
                                double value, double bound) {
    const bool ok = value >= bound;
    add_check(criterion, what, value, ">= " + fmt(bound), ok);
    return ok;
}

bool ExperimentReport::check_in(const std::string& criterion, const std::string& what,
                                double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    add_check(criterion, what, value, "in [" + fmt(lo) + ", " + fmt(hi) + "]", ok);
    return ok;
}

bool ExperimentReport::check_slope(const std::string& criterion, const std::string& what,
                                   const SlopeFit& fit, double target, double tol) {
    const std::string constraint =
        "slope in [" + fmt(target - tol) + ", " + fmt(target + tol) + "], R2 >= 0.9";
    if (!fit.conclusive) {
        add_inconclusive(criterion, what + " (R2 = " + fmt(fit.r2) + ")", fit.slope, constraint);
        return false;
    }
    const bool ok = std::abs(fit.slope - target) <= tol;
    add_check(criterion, what + " (R2 = " + fmt(fit.r2) + ")", fit.slope, constraint, ok);
    return ok;
}

namespace {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

void write_series_csv(const Series& s, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t c = 0; c < s.columns.size(); ++c)
        std::fprintf(fp, "%s%s", s.columns[c].c_str(), c + 1 == s.columns.size() ? "\n" : ",");
    for (const auto& row : s.rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            std::fprintf(fp, "%.17g%s", row[c], c + 1 == row.size() ? "\n" : ",");
    std::fclose(fp);
}

// minimal line plot: first column is x, remaining columns are traces
void write_series_svg(const Series& s, const std::string& path, bool loglog) {
    if (s.rows.empty() || s.columns.size() < 2) return;
    const double W = 640, H = 440, ml = 70, mr = 20, mt = 30, mb = 50;
    auto txp = [loglog](double v) { return loglog && v > 0 ? std::log10(v) : v; };
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : s.rows) {
        xmin = std::min(xmin, txp(r[0]));
        xmax = std::max(xmax, txp(r[0]));
        for (std::size_t c = 1; c < r.size(); ++c) {
            ymin = std::min(ymin, txp(r[c]));
            ymax = std::max(ymax, txp(r[c]));
        }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto X = [&](double v) { return ml + (txp(v) - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (txp(v) - ymin) / (ymax - ymin) * (H - mt - mb); };
    static const char* colors[] = {"#c23b22", "#1f6fb2", "#3f9b45", "#8e5bb2", "#b2851f"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << s.name
        << (loglog ? " (log-log)" : "") << "</text>\n";
    svg << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    svg << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='12'>"
        << s.columns[0] << "</text>\n";
    for (std::size_t c = 1; c < s.columns.size(); ++c) {
        svg << "<polyline fill='none' stroke='" << colors[(c - 1) % 5] << "' stroke-width='1.5' points='";
        for (const auto& r : s.rows) svg << X(r[0]) << "," << Y(r[c]) << " ";
        svg << "'/>\n";
        svg << "<text x='" << W - mr - 4 << "' y='" << mt + 14 * c << "' text-anchor='end' font-size='11' fill='"
            << colors[(c - 1) % 5] << "'>" << s.columns[c] << "</text>\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", loglog ? std::pow(10, xmin) : xmin);
    svg << "<text x='" << ml << "' y='" << H - mb + 16 << "' font-size='10'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", loglog ? std::pow(10, xmax) : xmax);
    svg << "<text x='" << W - mr << "' y='" << H - mb + 16 << "' text-anchor='end' font-size='10'>" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", loglog ? std::pow(10, ymin) : ymin);
    svg << "<text x='" << ml - 4 << "' y='" << H - mb << "' text-anchor='end' font-size='10'>" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", loglog ? std::pow(10, ymax) : ymax);
    svg << "<text x='" << ml - 4 << "' y='" << mt + 4 << "' text-anchor='end' font-size='10'>" << buf
        << "</text>\n";
    svg << "</svg>\n";
    std::ofstream(path) << svg.str();
}

} // namespace

void emit(const ExperimentReport& rep, const std::string& dir, bool loglog_plots) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    j["schema"] = "bel-report-v1";
    j["id"] = rep.id;
    // wall time goes to stdout, not here: reports stay byte-reproducible
    j["provenance"] = {{"library", "bel 1.0.0"}};
    j["config"] = rep.config_echo;
    j["measured"] = rep.measured;
    j["notes"] = rep.notes;
    j["all_passed"] = rep.all_passed();
    auto& jc = j["checks"] = nlohmann::json::array();
    for (const auto& c : rep.checks)
        jc.push_back({{"criterion", c.criterion},
                      {"description", c.description},
                      {"measured", c.measured},
                      {"constraint", c.constraint},
                      {"verdict", verdict_name(c.verdict)}});
    std::ofstream(dir + "/report.json") << j.dump(2) << "\n";
    for (const auto& s : rep.series) {
        write_series_csv(s, dir + "/" + s.name + ".csv");
        write_series_svg(s, dir + "/" + s.name + ".svg", loglog_plots);
    }
}

void print_summary(const ExperimentReport& rep) {
    for (const auto& c : rep.checks)
        std::printf("[%s] %-14s %s: measured %.6g, want %s\n", verdict_name(c.verdict),
                    ("criterion " + c.criterion).c_str(), c.description.c_str(), c.measured,
                    c.constraint.c_str());
    std::printf("%s: %s\n", rep.id.c_str(), rep.all_passed() ? "ALL PASS" : "NOT PASSED");
}

KvConfig KvConfig::load(const std::string& path) {
    KvConfig c;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (!k.empty()) c.kv[k] = v;
    }
    return c;
}

double KvConfig::get(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}
int KvConfig::get(const std::string& key, int fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoi(it->second);
}
std::string KvConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

} // namespace bel::report
