#pragma once

// Experiment reporting: pass/fail checks with measured values, tabular
// series, log-log slope fits with R^2, and deterministic emission as
// report.json + CSV + SVG. A fit with R^2 < 0.9 is flagged inconclusive
// instead of passing or failing.

#include <map>
#include <string>
#include <vector>

namespace bel::report {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
    double max_residual = 0.0; // in log10 units
    bool conclusive = true;    // r2 >= 0.9
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

enum class Verdict { pass, fail, inconclusive };

struct Check {
    std::string criterion;   // acceptance criterion id this check cites
    std::string description;
    double measured = 0.0;
    std::string constraint;  // human-readable, e.g. "<= 1e-6" or "in [1/3, 3]"
    Verdict verdict = Verdict::fail;
};

struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string id;
    std::map<std::string, std::string> config_echo;
    std::map<std::string, double> measured; // free-form named scalars
    std::vector<Check> checks;
    std::vector<Series> series;
    std::vector<std::string> notes;

    Check& add_check(const std::string& criterion, const std::string& description,
                     double measured_value, const std::string& constraint, bool pass);
    Check& add_inconclusive(const std::string& criterion, const std::string& description,
                            double measured_value, const std::string& constraint);
    bool all_passed() const; // inconclusive counts as not passed

    // comparator helpers that record the check and return pass/fail
    bool check_le(const std::string& criterion, const std::string& what, double value,
                  double bound);
    bool check_ge(const std::string& criterion, const std::string& what, double value,
                  double bound);
    bool check_in(const std::string& criterion, const std::string& what, double value, double lo,
                  double hi);
    // slope fit against a target; inconclusive when R^2 < 0.9
    bool check_slope(const std::string& criterion, const std::string& what, const SlopeFit& fit,
                     double target, double tol);
};

// writes <dir>/report.json, one CSV per series, and one SVG per series
// marked for plotting; deterministic byte output for identical reports
void emit(const ExperimentReport& rep, const std::string& dir, bool loglog_plots = true);

void print_summary(const ExperimentReport& rep);

// flat key=value config text, CLI flags win
struct KvConfig {
    std::map<std::string, std::string> kv;
    static KvConfig load(const std::string& path); // missing file -> empty
    void set(const std::string& key, const std::string& value) { kv[key] = value; }
    bool has(const std::string& key) const { return kv.count(key) != 0; }
    double get(const std::string& key, double fallback) const;
    int get(const std::string& key, int fallback) const;
    std::string get(const std::string& key, const std::string& fallback) const;
};

} // namespace bel::report
