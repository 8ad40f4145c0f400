#include <doctest.h>

#include <numbers>

#include "bel/initial_data.hpp"
#include "bel/lagrangian.hpp"
#include "test_util.hpp"

using namespace bel;
using namespace bel::flow;
using std::numbers::pi;

namespace {

AnalyticSampler zero_sampler() {
    return {[](double, const Vec2&) -> Vec2 { return {0.0, 0.0}; },
            [](double, const Vec2&) -> Mat2 { return {0, 0, 0, 0}; }};
}

// u = (-x1, x2): eta = (e^-t x1, e^t x2), Deta = diag(e^-t, e^t)
AnalyticSampler saddle_sampler() {
    return {[](double, const Vec2& x) -> Vec2 { return {-x[0], x[1]}; },
            [](double, const Vec2&) -> Mat2 { return {-1, 0, 0, 1}; }};
}

// u = (0, -cos x1): eta = (x1, x2 - t cos x1), Deta = [[1,0],[t sin x1,1]]
AnalyticSampler shear_sampler() {
    return {[](double, const Vec2& x) -> Vec2 { return {0.0, -std::cos(x[0])}; },
            [](double, const Vec2& x) -> Mat2 { return {0, 0, std::sin(x[0]), 0}; }};
}

FlowState small_lattice(double half = 0.8, int n = 9) {
    SeedSpec spec;
    spec.center = {0.0, 0.0};
    spec.half_extent = half;
    spec.per_axis = n;
    return FlowState::seed(spec);
}

} // namespace

TEST_CASE("zero velocity: identity flow with identity gradient") {
    FlowState s = advance_flow(small_lattice(), zero_sampler(), 2.0, 0.1);
    for (const auto& m : s.markers) {
        CHECK(m.pos == m.seed);
        CHECK(m.defgrad == Mat2{1, 0, 0, 1});
    }
    CHECK(sup_deformation(s).value == 1.0);
}

TEST_CASE("linear saddle matches the closed form to 1e-8 at t = 1") {
    FlowState s = advance_flow(small_lattice(), saddle_sampler(), 1.0, 0.005);
    const double em = std::exp(-1.0), ep = std::exp(1.0);
    double worst = 0.0;
    for (const auto& m : s.markers) {
        worst = std::max(worst, std::abs(m.pos[0] - em * m.seed[0]));
        worst = std::max(worst, std::abs(m.pos[1] - ep * m.seed[1]));
        worst = std::max(worst, std::abs(m.defgrad[0] - em));
        worst = std::max(worst, std::abs(m.defgrad[3] - ep));
        worst = std::max(worst, std::abs(m.defgrad[1]));
        worst = std::max(worst, std::abs(m.defgrad[2]));
    }
    CHECK(worst < 1e-8);
    CHECK(max_det_defect(s) < 1e-10);
    SUBCASE("sup deformation reaches M at t = ln M") {
        const double M = 3.0;
        FlowState sM = advance_flow(small_lattice(), saddle_sampler(), std::log(M), 0.005);
        auto rep = sup_deformation(sM);
        CHECK(rep.value == doctest::Approx(M).epsilon(1e-8));
        CHECK(rep.entry == 3); // the d eta2 / d x2 entry
    }
}

TEST_CASE("stationary shear matches the closed form") {
    FlowState s = advance_flow(small_lattice(), shear_sampler(), 1.0, 0.005);
    double worst = 0.0;
    for (const auto& m : s.markers) {
        worst = std::max(worst, std::abs(m.pos[0] - m.seed[0]));
        worst = std::max(worst, std::abs(m.pos[1] - (m.seed[1] - std::cos(m.seed[0]))));
        worst = std::max(worst, std::abs(m.defgrad[2] - std::sin(m.seed[0])));
        worst = std::max(worst, std::abs(m.defgrad[0] - 1.0));
        worst = std::max(worst, std::abs(m.defgrad[3] - 1.0));
        worst = std::max(worst, std::abs(m.defgrad[1]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("composition: 0 -> t1 -> t2 equals 0 -> t2") {
    auto u = shear_sampler();
    FlowState once = advance_flow(small_lattice(), u, 1.0, 0.01);
    FlowState half = advance_flow(small_lattice(), u, 0.5, 0.01);
    FlowState glued = advance_flow(half, u, 1.0, 0.01);
    double worst = 0.0;
    for (std::size_t i = 0; i < once.markers.size(); ++i) {
        worst = std::max(worst, std::abs(once.markers[i].pos[0] - glued.markers[i].pos[0]));
        worst = std::max(worst, std::abs(once.markers[i].pos[1] - glued.markers[i].pos[1]));
        for (int c = 0; c < 4; ++c)
            worst = std::max(worst,
                             std::abs(once.markers[i].defgrad[c] - glued.markers[i].defgrad[c]));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("backward integration inverts the flow") {
    auto u = saddle_sampler();
    FlowState fwd = advance_flow(small_lattice(), u, 1.0, 0.005);
    FlowState back = advance_flow(fwd, u, 0.0, 0.005);
    double worst = 0.0;
    for (std::size_t i = 0; i < back.markers.size(); ++i) {
        worst = std::max(worst, std::abs(back.markers[i].pos[0] - back.markers[i].seed[0]));
        worst = std::max(worst, std::abs(back.markers[i].pos[1] - back.markers[i].seed[1]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("markers leaving the trusted interior are flagged and excluded") {
    AnalyticSampler drift{[](double, const Vec2&) -> Vec2 { return {1.0, 0.0}; },
                          [](double, const Vec2&) -> Mat2 { return {0, 0, 0, 0}; }};
    FlowState s = small_lattice(0.5, 5);
    s = advance_flow(s, drift, 0.5, 0.01, /*box_half_width=*/1.0);
    bool any_flagged = false, any_kept = false;
    for (const auto& m : s.markers) (m.flagged ? any_flagged : any_kept) = true;
    CHECK(any_flagged);
    CHECK(any_kept);
    CHECK(sup_deformation(s).value == 1.0);
}

TEST_CASE("pullback gradient") {
    SUBCASE("identity flow leaves the gradient unchanged") {
        FlowState s = small_lattice();
        auto g = pullback_gradient(s, [](const Vec2& x) -> Vec2 { return {x[1], -x[0]}; });
        for (std::size_t i = 0; i < s.markers.size(); ++i) {
            CHECK(g[i][0] == doctest::Approx(s.markers[i].seed[1]));
            CHECK(g[i][1] == doctest::Approx(-s.markers[i].seed[0]));
        }
    }
    SUBCASE("linear saddle with f = x2: gradient becomes (0, e^-t)") {
        FlowState s = advance_flow(small_lattice(), saddle_sampler(), 1.0, 0.005);
        auto g = pullback_gradient(s, [](const Vec2&) -> Vec2 { return {0.0, 1.0}; });
        for (const auto& gi : g) {
            CHECK(gi[0] == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(gi[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
        }
    }
    SUBCASE("near-singular deformation is rejected") {
        FlowState s = small_lattice();
        s.markers[0].defgrad = {10.0, 0, 0, 1.0}; // det = 10
        CHECK_THROWS_WITH(pullback_gradient(s, [](const Vec2&) -> Vec2 { return {0, 1}; }),
                          "deformation too strong for pullback");
    }
}

TEST_CASE("compare_flows: zero perturbation, then linear scaling") {
    auto u = saddle_sampler();
    FlowState base = advance_flow(small_lattice(), u, 1.0, 0.01);
    SUBCASE("v = 0 gives theta = 0") {
        FlowState again = advance_flow(small_lattice(), u, 1.0, 0.01);
        auto cmp = compare_flows(base, again, 0.0, 0.0);
        CHECK(cmp.theta == 0.0);
    }
    SUBCASE("theta scales linearly in the perturbation size") {
        std::vector<double> eps{0.02, 0.01, 0.005};
        std::vector<double> theta;
        for (double e : eps) {
            AnalyticSampler pert{
                [e](double, const Vec2& x) -> Vec2 { return {-x[0] + e, x[1] + e * x[0]}; },
                [e](double, const Vec2&) -> Mat2 { return {-1, 0, e, 1}; }};
            FlowState p = advance_flow(small_lattice(), pert, 1.0, 0.01);
            theta.push_back(compare_flows(base, p, e, e).theta);
        }
        for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
            const double slope = std::log(theta[i] / theta[i + 1]) / std::log(eps[i] / eps[i + 1]);
            CHECK(slope == doctest::Approx(1.0).epsilon(0.02));
        }
        CHECK(compare_flows(base, base, 1.0, 1.0).ratio == 0.0);
    }
    SUBCASE("mismatched seeds are rejected") {
        FlowState other = small_lattice(0.7, 9);
        CHECK_THROWS(compare_flows(base, other, 1.0, 1.0));
    }
}

TEST_CASE("lattice interpolation of positions and deformation entries") {
    FlowState s = advance_flow(small_lattice(0.8, 33), saddle_sampler(), 0.7, 0.005);
    const Vec2 probe{0.123, -0.287};
    Mat2 D = interpolate_defgrad(s, probe);
    CHECK(D[0] == doctest::Approx(std::exp(-0.7)).epsilon(1e-9));
    CHECK(D[3] == doctest::Approx(std::exp(0.7)).epsilon(1e-9));
    Vec2 pos = interpolate_position(s, probe);
    CHECK(pos[0] == doctest::Approx(std::exp(-0.7) * probe[0]).epsilon(1e-9));
    CHECK(pos[1] == doctest::Approx(std::exp(0.7) * probe[1]).epsilon(1e-9));
    CHECK_THROWS(interpolate_defgrad(s, Vec2{5.0, 0.0}));
}

TEST_CASE("axis invariance under an odd-odd cellular velocity") {
    // u = (sin x1 cos x2, -cos x1 sin x2): divergence-free, u1 odd in x1,
    // u2 odd in x2, so both axes are invariant streamlines
    AnalyticSampler cell{
        [](double, const Vec2& x) -> Vec2 {
            return {std::sin(x[0]) * std::cos(x[1]), -std::cos(x[0]) * std::sin(x[1])};
        },
        [](double, const Vec2& x) -> Mat2 {
            return {std::cos(x[0]) * std::cos(x[1]), -std::sin(x[0]) * std::sin(x[1]),
                    std::sin(x[0]) * std::sin(x[1]), -std::cos(x[0]) * std::cos(x[1])};
        }};
    SeedSpec spec;
    spec.per_axis = 2; // minimal lattice; the interesting markers are the clusters
    spec.half_extent = 0.1;
    spec.clusters.push_back({{0.0, 0.9}, 0.0, 1});  // on the x2 axis
    spec.clusters.push_back({{1.2, 0.0}, 0.0, 1});  // on the x1 axis
    FlowState s = advance_flow(FlowState::seed(spec), cell, 2.0, 0.01);
    const Marker& on_x2 = s.markers[s.markers.size() - 2];
    const Marker& on_x1 = s.markers.back();
    CHECK(std::abs(on_x2.pos[0]) < 1e-8);
    CHECK(std::abs(on_x1.pos[1]) < 1e-8);
    CHECK(max_det_defect(s) < 1e-8);
}

TEST_CASE("markers CSV columns") {
    FlowState s = small_lattice(0.3, 3);
    const std::string path = "/tmp/bel_test_markers.csv";
    write_markers_csv(path, s);
    std::FILE* fp = std::fopen(path.c_str(), "r");
    REQUIRE(fp);
    char line[256];
    REQUIRE(std::fgets(line, sizeof line, fp));
    CHECK(std::string(line) == "seed_x,seed_y,pos_x,pos_y,d11,d12,d21,d22,det\n");
    std::fclose(fp);
}
