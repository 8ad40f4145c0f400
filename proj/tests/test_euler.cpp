#include <doctest.h>

#include <numbers>

#include "bel/euler.hpp"
#include "bel/initial_data.hpp"
#include "test_util.hpp"

using namespace bel;
using std::numbers::pi;
namespace sp = bel::spectral;

namespace {

// smooth radial vorticity with zero circulation: an exact steady state
// even on the torus, since the exterior velocity of a zero-mean radial
// blob vanishes and the periodic images induce nothing inside the box
ScalarField radial_bump(const GridSpec& g, double sigma = 0.5) {
    return {g, kernels::sample_serial(g, [sigma](double x1, double x2) {
                const double s = (x1 * x1 + x2 * x2) / (2.0 * sigma * sigma);
                return (1.0 - s) * std::exp(-s);
            })};
}

ScalarField quadrupole_512() {
    data::QuadrupoleParams q{4.0, 1, 1, 2.5};
    return data::omega0(q, GridSpec(512, pi / 2));
}

} // namespace

TEST_CASE("biot_savart") {
    GridSpec g(128, pi);
    SUBCASE("zero vorticity gives zero velocity") {
        VectorField u = euler::biot_savart(ScalarField::zeros(g));
        CHECK(sp::lp_norm(u.u1, sp::infinity) == 0.0);
        CHECK(sp::lp_norm(u.u2, sp::infinity) == 0.0);
    }
    SUBCASE("single mode: w = sin(pi x1/L) -> u = (0, -(L/pi) cos(pi x1/L))") {
        const double w = pi / g.half_width;
        ScalarField om(g, kernels::sample_serial(g, [w](double x1, double) { return std::sin(w * x1); }));
        VectorField u = euler::biot_savart(om);
        auto want = kernels::sample_serial(
            g, [&](double x1, double) { return -std::cos(w * x1) / w; });
        CHECK(sp::lp_norm(u.u1, sp::infinity) < 1e-12);
        CHECK(belt::max_abs_diff(u.u2.values(), want) < 1e-12);
    }
    SUBCASE("odd-odd vorticity: u1 odd/even, u2 even/odd, axes invariant") {
        ScalarField om = quadrupole_512();
        VectorField u = euler::biot_savart(om);
        const int n = om.grid().n;
        double worst = 0.0;
        for (int j1 = 1; j1 < n; j1 += 7)
            for (int j2 = 1; j2 < n; j2 += 7) {
                const int m1 = n - j1, m2 = n - j2;
                // u1 = -d2 psi with psi odd-odd: odd in x1, even in x2
                worst = std::max(worst, std::abs(u.u1.at(j1, j2) + u.u1.at(m1, j2)));
                worst = std::max(worst, std::abs(u.u1.at(j1, j2) - u.u1.at(j1, m2)));
                // u2 = d1 psi: even in x1, odd in x2
                worst = std::max(worst, std::abs(u.u2.at(j1, j2) - u.u2.at(m1, j2)));
                worst = std::max(worst, std::abs(u.u2.at(j1, j2) + u.u2.at(j1, m2)));
            }
        const double scale = sp::lp_norm(om, sp::infinity); // roundoff rides on the source
        CHECK(worst < 1e-12 * scale);
        // velocity normal to each axis vanishes on it: the axes are flow-invariant
        for (int j = 0; j < n; ++j) {
            CHECK(std::abs(u.u1.at(n / 2, j)) < 1e-13 * scale); // x1 = 0
            CHECK(std::abs(u.u2.at(j, n / 2)) < 1e-13 * scale); // x2 = 0
        }
    }
}

TEST_CASE("rhs") {
    SUBCASE("zero field") {
        GridSpec g(64, pi);
        CHECK(sp::lp_norm(euler::rhs(ScalarField::zeros(g)), sp::infinity) == 0.0);
    }
    SUBCASE("radial vorticity is steady: rhs vanishes") {
        GridSpec g(256, pi);
        ScalarField om = radial_bump(g);
        const double r = sp::lp_norm(euler::rhs(om), sp::infinity);
        CHECK(r < 1e-9 * sp::lp_norm(om, sp::infinity));
    }
    SUBCASE("mean of the tendency vanishes and the L2 pairing is skew") {
        GridSpec g(128, pi / 2);
        ScalarField om = belt::random_band_limited(g, 97, 20, 0.3);
        ScalarField k = euler::rhs(om);
        CHECK(std::abs(sp::mean(k)) < 1e-12 * sp::lp_norm(k, sp::infinity) + 1e-16);
        // d/dt ||w||_2^2 = 2 <w, rhs> = 0 for the dealiased Galerkin system
        const double h2 = g.spacing() * g.spacing();
        double pair = 0.0;
        const ScalarField omd = sp::dealias(om);
        ScalarField kd = euler::rhs(omd);
        for (std::size_t i = 0; i < g.size(); ++i) pair += omd.values()[i] * kd.values()[i];
        pair *= h2;
        CHECK(std::abs(pair) < 1e-10 * sp::lp_norm(omd, 2.0) * sp::lp_norm(kd, 2.0) + 1e-16);
    }
}

TEST_CASE("solve: radial steady state is preserved") {
    GridSpec g(256, pi);
    ScalarField om = radial_bump(g);
    euler::SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.symmetry_enforce = false; // radial data is even, not odd-odd
    euler::Trajectory traj = euler::solve(om, cfg);
    std::vector<double> want = sp::dealias(om).values();
    CHECK(belt::rel_l2_error(traj.final_state().values(), want) < 1e-6);
    SUBCASE("kato-ponce reference is constant in time for a steady state") {
        const double a = sp::sobolev_w1p_norm(traj.initial(), 2.5);
        const double b = euler::kato_ponce_reference(traj, 2.5);
        CHECK(b == doctest::Approx(a).epsilon(1e-6));
    }
}

TEST_CASE("solve: quadrupole run conserves norms and symmetry") {
    ScalarField om = quadrupole_512();
    euler::SolverConfig cfg;
    cfg.t_end = 2.0;
    cfg.dt_max = 0.25;
    euler::Trajectory traj = euler::solve(om, cfg);

    const auto& d0 = traj.diag.front();
    const auto& dT = traj.diag.back();
    CHECK(std::abs(dT.l2 - d0.l2) / d0.l2 < 1e-6 * cfg.t_end);
    CHECK(std::abs(dT.lp - d0.lp) / d0.lp < 1e-3);
    CHECK(dT.linf <= d0.linf * (1.0 + 1e-3));
    for (const auto& d : traj.diag) CHECK(d.sym_defect <= 1e-8 * d.linf);
    CHECK(traj.gronwall_integral > 0.0);
    CHECK(euler::kato_ponce_reference(traj, 2.5) < sp::infinity);
}

TEST_CASE("solve: t_end = 0 returns the single initial snapshot") {
    GridSpec g(64, pi);
    ScalarField om = belt::random_band_limited(g, 5, 10);
    euler::SolverConfig cfg;
    cfg.t_end = 0.0;
    cfg.dealias = false;
    cfg.symmetry_enforce = false;
    euler::Trajectory traj = euler::solve(om, cfg);
    CHECK(traj.snapshots.size() == 1);
    CHECK(traj.snapshot_times.front() == 0.0);
    CHECK(belt::max_abs_diff(traj.initial().values(), om.values()) == 0.0);
}

TEST_CASE("solve: CFL halving is bounded") {
    ScalarField om = quadrupole_512();
    VectorField u = euler::biot_savart(om);
    const double umax = kernels::reduce_max(om.grid().size(), [&](std::size_t i) {
        const double a = u.u1.values()[i], b = u.u2.values()[i];
        return std::sqrt(a * a + b * b);
    });
    euler::SolverConfig cfg;
    cfg.t_end = 0.05;
    cfg.dt = 1.0;
    // admissible dt a factor ~20 below the clipped request: 5 halvings
    cfg.cfl_cap = umax * cfg.t_end / (20.0 * om.grid().spacing());
    cfg.max_halvings = 3;
    CHECK_THROWS(euler::solve(om, cfg));
    cfg.max_halvings = 30;
    euler::Trajectory traj = euler::solve(om, cfg);
    CHECK(traj.halvings > 3);
    CHECK(traj.final_time() == doctest::Approx(0.05));
}

TEST_CASE("reversibility: forward then backward recovers the data") {
    ScalarField om = quadrupole_512();
    ScalarField w = sp::dealias(om);
    const std::vector<double> start = w.values();
    const double dt = 0.125;
    for (int i = 0; i < 8; ++i) w = euler::step(w, dt);
    CHECK(belt::rel_l2_error(w.values(), start) > 1e-9); // it genuinely moved
    for (int i = 0; i < 8; ++i) w = euler::step(w, -dt);
    CHECK(belt::rel_l2_error(w.values(), start) < 1e-5);
}

TEST_CASE("symmetrize_odd_odd projects and odd_odd_defect measures") {
    GridSpec g(64, pi);
    ScalarField f = belt::random_field(g, 11);
    ScalarField s = euler::symmetrize_odd_odd(f);
    CHECK(euler::odd_odd_defect(s) < 1e-14);
    ScalarField twice = euler::symmetrize_odd_odd(s);
    CHECK(belt::max_abs_diff(twice.values(), s.values()) < 1e-15);
}

TEST_CASE("diagnostics CSV has the documented columns") {
    GridSpec g(64, pi);
    euler::SolverConfig cfg;
    cfg.t_end = 0.0;
    euler::Trajectory traj = euler::solve(ScalarField::zeros(g), cfg);
    const std::string path = "/tmp/bel_test_diag.csv";
    euler::write_diagnostics_csv(path, traj);
    std::FILE* fp = std::fopen(path.c_str(), "r");
    REQUIRE(fp);
    char line[256];
    REQUIRE(std::fgets(line, sizeof line, fp));
    CHECK(std::string(line) == "t,l2,lp,linf,energy,sym_defect\n");
    std::fclose(fp);
}
