#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bel/report.hpp"

using namespace bel::report;

TEST_CASE("loglog fit recovers an exact power law") {
    std::vector<double> x{2, 4, 8, 16}, y;
    for (double v : x) y.push_back(3.7 * std::pow(v, -2.5));
    auto f = fit_loglog(x, y);
    CHECK(f.slope == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.conclusive);
}

TEST_CASE("noisy data with no trend is flagged inconclusive") {
    std::vector<double> x{1, 2, 4, 8, 16, 32}, y{1.0, 3.0, 0.5, 2.5, 0.7, 2.0};
    auto f = fit_loglog(x, y);
    CHECK(!f.conclusive);
    ExperimentReport rep;
    rep.id = "t";
    CHECK(!rep.check_slope("0", "no trend", f, 0.0, 10.0));
    CHECK(rep.checks.back().verdict == Verdict::inconclusive);
    CHECK(!rep.all_passed());
}

TEST_CASE("fit rejects nonpositive data and short series") {
    CHECK_THROWS(fit_loglog({1.0}, {2.0}));
    CHECK_THROWS(fit_loglog({1.0, -2.0}, {1.0, 1.0}));
}

TEST_CASE("check helpers record verdicts") {
    ExperimentReport rep;
    rep.id = "t";
    CHECK(rep.check_le("1", "small", 0.5, 1.0));
    CHECK(!rep.check_ge("1", "big", 0.5, 1.0));
    CHECK(rep.check_in("2", "bracket", 1.0, 1.0 / 3.0, 3.0));
    CHECK(!rep.all_passed());
    CHECK(rep.checks.size() == 3);
}

TEST_CASE("emit writes deterministic report, csv and svg") {
    ExperimentReport rep;
    rep.id = "demo";
    rep.config_echo["k"] = "v";
    rep.measured["value"] = 42.0;
    rep.check_le("1", "a check", 0.1, 1.0);
    rep.series.push_back({"demo_series", {"x", "y"}, {{1.0, 2.0}, {2.0, 4.0}, {4.0, 8.0}}});
    const std::string dir = "/tmp/bel_test_report";
    std::filesystem::remove_all(dir);
    emit(rep, dir);
    auto slurp = [](const std::string& p) {
        std::stringstream ss;
        ss << std::ifstream(p).rdbuf();
        return ss.str();
    };
    const std::string first = slurp(dir + "/report.json");
    CHECK(first.find("\"schema\": \"bel-report-v1\"") != std::string::npos);
    CHECK(first.find("\"all_passed\": true") != std::string::npos);
    CHECK(slurp(dir + "/demo_series.csv").substr(0, 4) == "x,y\n");
    CHECK(slurp(dir + "/demo_series.svg").find("<svg") != std::string::npos);
    emit(rep, dir); // identical bytes on re-emission
    CHECK(slurp(dir + "/report.json") == first);
}

TEST_CASE("flat key=value config with comments") {
    const std::string path = "/tmp/bel_test_cfg.txt";
    std::ofstream(path) << "# comment\n a = 1.5 \nb=7\nname = hello # trailing\n";
    auto cfg = KvConfig::load(path);
    CHECK(cfg.get("a", 0.0) == 1.5);
    CHECK(cfg.get("b", 0) == 7);
    CHECK(cfg.get("name", std::string()) == "hello");
    CHECK(cfg.get("missing", 3) == 3);
    cfg.set("a", "2.0"); // overrides win
    CHECK(cfg.get("a", 0.0) == 2.0);
    CHECK(KvConfig::load("/nonexistent/file").kv.empty());
}
