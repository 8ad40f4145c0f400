#include <doctest.h>

#include <numbers>

#include "bel/initial_data.hpp"
#include "bel/lagrangian.hpp"
#include "test_util.hpp"

using namespace bel;
using namespace bel::flow;
using std::numbers::pi;
namespace sp = bel::spectral;

// Markers co-integrated with the solver against (a) closed invariants and
// (b) the independent trajectory-sampler route. One solve, many checks.

TEST_CASE("co-integrated quadrupole flow") {
    data::QuadrupoleParams q{2.0, 1, 1, 2.5};
    GridSpec g(512, pi / 2);
    ScalarField w0 = data::omega0(q, g);

    SeedSpec spec;
    spec.half_extent = 0.7;
    spec.per_axis = 33;
    spec.clusters.push_back({{0.0, 0.45}, 0.0, 1}); // on the x2 axis
    spec.clusters.push_back({{0.55, 0.0}, 0.0, 1}); // on the x1 axis
    CoIntegrator co(FlowState::seed(spec), g.half_width);

    euler::SolverConfig cfg;
    cfg.t_end = 5.0;
    cfg.dt_max = 0.1;
    cfg.snapshot_stride = 5;
    euler::Trajectory traj = euler::solve(w0, cfg, co.observer(), /*observer_needs_du=*/true);
    const FlowState& fs = co.state();

    // volume preservation
    CHECK(max_det_defect(fs) < 1e-4);

    // Gronwall ceiling, and the flow genuinely deformed
    CHECK(sup_deformation(fs).value <= std::exp(traj.gronwall_integral) * 1.01);
    CHECK(sup_deformation(fs).value > 1.0);

    // axis-seeded markers remain on their axes
    const Marker& on_x2 = fs.markers[fs.markers.size() - 2];
    const Marker& on_x1 = fs.markers.back();
    CHECK(std::abs(on_x2.pos[0]) < 1e-8);
    CHECK(std::abs(on_x1.pos[1]) < 1e-8);

    // transport consistency at this resolution (10 cells per finest bump
    // radius): the O(h^4) velocity interpolation on marker paths floors
    // near 1e-3 relative; the 1e-4 contract is exercised at 1024^2 below
    const Spectrum& wT = traj.final_state().spectrum();
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.markers.size(); i += 37) {
        const auto& m = fs.markers[i];
        if (m.flagged) continue;
        worst = std::max(worst, std::abs(data::omega0_eval(q, m.seed[0], m.seed[1]) -
                                         belt::eval_spectral_at(wT, m.pos[0], m.pos[1])));
    }
    CHECK(worst < 2e-3 * sp::lp_norm(w0, sp::infinity));

    // independent route: stored-snapshot sampler reproduces the flow
    TrajectorySampler sampler(traj);
    FlowState other =
        advance_flow(FlowState::seed(spec), sampler, traj.final_time(), 0.05, g.half_width);
    double pos_diff = 0.0, grad_diff = 0.0;
    for (std::size_t i = 0; i < fs.markers.size(); ++i) {
        pos_diff = std::max(pos_diff, std::hypot(fs.markers[i].pos[0] - other.markers[i].pos[0],
                                                 fs.markers[i].pos[1] - other.markers[i].pos[1]));
        for (int c = 0; c < 4; ++c)
            grad_diff =
                std::max(grad_diff, std::abs(fs.markers[i].defgrad[c] - other.markers[i].defgrad[c]));
    }
    CHECK(pos_diff < 5e-4);
    CHECK(grad_diff < 5e-3);

    // deformation sup series is recorded and starts at 1
    CHECK(co.sup_series().front() == 1.0);
    CHECK(co.sup_series().size() == co.times().size());
    CHECK(co.sup_series().back() == sup_deformation(fs).value);
}

TEST_CASE("transport consistency reaches 1e-4 once the data is well resolved") {
    data::QuadrupoleParams q{2.0, 1, 1, 2.5};
    GridSpec g(1024, pi / 4); // 41 cells per finest bump radius
    ScalarField w0 = data::omega0(q, g);

    SeedSpec spec;
    spec.half_extent = 0.7;
    spec.per_axis = 17;
    CoIntegrator co(FlowState::seed(spec), g.half_width);

    euler::SolverConfig cfg;
    cfg.t_end = 3.0;
    cfg.dt_max = 0.1;
    euler::Trajectory traj = euler::solve(w0, cfg, co.observer(), true);

    const Spectrum& wT = traj.final_state().spectrum();
    double worst = 0.0;
    for (std::size_t i = 0; i < co.state().markers.size(); i += 11) {
        const auto& m = co.state().markers[i];
        if (m.flagged) continue;
        worst = std::max(worst, std::abs(data::omega0_eval(q, m.seed[0], m.seed[1]) -
                                         belt::eval_spectral_at(wT, m.pos[0], m.pos[1])));
    }
    CHECK(worst < 1e-4 * sp::lp_norm(w0, sp::infinity));
}
