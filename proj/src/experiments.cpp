#include "bel/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "experiments_util.hpp"

namespace bel::experiments {

using std::numbers::pi;
namespace sp = bel::spectral;
using report::ExperimentReport;
using report::SlopeFit;
using namespace detail;

// ---- E1: omega0 norm bounds -------------------------------------------------

ExperimentReport run_e1(Workspace& ws) {
    ExperimentReport rep;
    rep.id = "e1";
    const double p = ws.cfg.get("e1.p", 2.5);
    const std::vector<double> Ms{4.0, 8.0, 16.0};
    const std::vector<int> Ns{2, 4, 8};
    const int N0 = ws.cfg.get("e1.N0", 2);
    const int pts = ws.cfg.get("e1.quad_pts", 192);
    rep.config_echo = {{"p", std::to_string(p)}, {"N0", std::to_string(N0)},
                       {"M", "4,8,16"},          {"N", "2,4,8"}};

    report::Series table{"e1_w1p", {"M", "N", "w1p", "lp_part", "d1_part", "d2_part"}, {}};
    std::map<double, std::vector<double>> by_M; // norms over the N sweep
    std::vector<double> norms_at_N2;
    for (double M : Ms)
        for (int N : Ns) {
            data::QuadrupoleParams q{M, N, N0, p};
            auto br = data::omega0_w1p_local(q, p, pts);
            table.rows.push_back({M, double(N), br.total(), br.lp, br.d1_lp, br.d2_lp});
            by_M[M].push_back(br.total());
            if (N == 2) norms_at_N2.push_back(br.total());
        }
    rep.series.push_back(table);

    SlopeFit fit = report::fit_loglog(Ms, norms_at_N2);
    rep.check_slope("3", "||w0||_W1p vs M log-log slope", fit, -2.0, 0.1);

    // the sum in the data has N+1 dyadic terms against the N^{-1/p}
    // normalization, so the norm carries an exact ((N+1)/N)^{1/p} factor;
    // N-uniformity is the per-doubling change (the derivation behind the
    // 10% threshold), while the compounded spread over {2,4,8} is
    // identically (4/3)^{1/p} ~ 12% and is reported, not asserted
    double worst_doubling = 0.0, worst_spread = 0.0;
    for (auto& [M, v] : by_M) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            worst_doubling = std::max(worst_doubling, std::abs(v[i + 1] - v[i]) / v[i]);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        worst_spread = std::max(worst_spread, (*hi - *lo) / *lo);
    }
    rep.check_le("3", "norm change per N doubling at fixed M", worst_doubling, 0.10);
    rep.measured["total_N_spread"] = worst_spread;
    rep.notes.push_back("total spread over N in {2,4,8} is (4/3)^{1/p} by the term count of the "
                        "dyadic sum; uniformity is asserted per doubling");

    // single-scale cross-check: grid quadrature against the bump-local route
    {
        data::QuadrupoleParams q{4.0, 1, 1, p};
        GridSpec g(1024, pi / 2);
        const double grid_norm = sp::sobolev_w1p_norm(data::omega0(q, g), p);
        const double local_norm = data::omega0_w1p_local(q, p, 256).total();
        rep.check_le("3", "grid vs bump-local quadrature relative gap",
                     std::abs(grid_norm - local_norm) / local_norm, 1e-3);
        rep.measured["grid_norm_single"] = grid_norm;
        rep.measured["local_norm_single"] = local_norm;
    }
    rep.measured["slope"] = fit.slope;
    rep.measured["worst_N_spread"] = worst_spread;
    return rep;
}

// ---- E2: deformation growth ------------------------------------------------

namespace {

struct E2RunOut {
    euler::Trajectory traj;
    flow::CoIntegrator co;
};

E2Result compute_e2(const report::KvConfig& cfg) {
    E2Result r;
    r.q = data::QuadrupoleParams{cfg.get("e2.M", 2.0), cfg.get("e2.N", 1), cfg.get("e2.N0", 1),
                                 cfg.get("e2.p", 2.5)};
    const int npts = cfg.get("e2.grid", 512);
    const double L = cfg.get("e2.L", pi / 2);
    const double t_end = cfg.get("e2.t_end", 30.0);
    r.grid = GridSpec(npts, L);

    auto run = [&](const GridSpec& g) {
        flow::SeedSpec spec;
        spec.half_extent = cfg.get("e2.seed_half", 1.15);
        spec.per_axis = cfg.get("e2.seed_n", 97);
        spec.clusters.push_back({{0.0, 0.0}, 0.15, 33}); // hyperbolic point
        flow::CoIntegrator co(flow::FlowState::seed(spec), g.half_width);
        euler::SolverConfig scfg;
        scfg.t_end = t_end;
        scfg.dt_max = cfg.get("e2.dt_max", 0.25);
        scfg.p_diag = r.q.p;
        scfg.snapshot_stride = 1 << 20;
        euler::Trajectory traj = euler::solve(data::omega0(r.q, g), scfg, co.observer(), true);
        return std::pair{std::move(traj), std::move(co)};
    };

    auto [traj, co] = run(r.grid);
    r.t0 = traj.final_time();
    r.c0T = std::exp(traj.gronwall_integral);
    r.w1p_t0 = sp::sobolev_w1p_norm(traj.final_state(), r.q.p);
    r.kato_ponce = euler::kato_ponce_reference(traj, r.q.p);
    r.times = co.times();
    r.sup_series = co.sup_series();
    r.sup_deformation = r.sup_series.back();
    r.growth_factor = r.sup_series.back() / r.sup_series.front();
    r.strictly_increasing = true;
    for (std::size_t i = 1; i < r.sup_series.size(); ++i)
        if (r.sup_series[i] <= r.sup_series[i - 1]) r.strictly_increasing = false;
    r.gronwall_slack = r.sup_deformation / std::exp(traj.gronwall_integral) - 1.0;
    auto scan = scan_d22(co.state());
    r.d22_max = scan.max;
    r.x_star = canonical_quadrant(scan.seed);
    r.delta_half_max = scan.delta;
    r.flow = co.state();

    if (cfg.get("e2.double_check", 1) != 0) {
        auto [traj2, co2] = run(GridSpec(2 * npts, L));
        (void)traj2;
        r.sup_at_double_res = co2.sup_series().back();
    }
    return r;
}

} // namespace

const E2Result& Workspace::ensure_e2() {
    if (!e2_) e2_ = compute_e2(cfg);
    return *e2_;
}

ExperimentReport run_e2(Workspace& ws) {
    const E2Result& r = ws.ensure_e2();
    ExperimentReport rep;
    rep.id = "e2";
    rep.config_echo = {{"M", std::to_string(r.q.M)},       {"N", std::to_string(r.q.N)},
                       {"N0", std::to_string(r.q.N0)},     {"p", std::to_string(r.q.p)},
                       {"grid", std::to_string(r.grid.n)}, {"t_end", std::to_string(r.t0)}};
    rep.notes.push_back(
        "paper window [0, min(1, M^-3)] = [0, " + std::to_string(std::min(1.0, std::pow(r.q.M, -3.0))) +
        "]; the configured horizon is a desk-scale surrogate at the same data normalization");

    rep.add_check("10", "sup ||Deta|| strictly increasing over the horizon",
                  r.strictly_increasing ? 1.0 : 0.0, "strict per-step growth",
                  r.strictly_increasing);
    rep.check_ge("10", "deformation growth factor", r.growth_factor, 3.0);
    if (r.sup_at_double_res > 0.0)
        rep.check_le("10", "relative change under resolution doubling",
                     std::abs(r.sup_at_double_res - r.sup_deformation) / r.sup_deformation, 0.02);
    rep.check_le("9", "Gronwall ceiling slack", r.gronwall_slack, 0.01);

    report::Series curve{"e2_sup_deformation", {"t", "sup_defgrad"}, {}};
    for (std::size_t i = 0; i < r.times.size(); ++i)
        curve.rows.push_back({r.times[i], r.sup_series[i]});
    rep.series.push_back(curve);

    rep.measured["sup_deformation"] = r.sup_deformation;
    rep.measured["growth_factor"] = r.growth_factor;
    rep.measured["d22_max"] = r.d22_max;
    rep.measured["x_star_1"] = r.x_star[0];
    rep.measured["x_star_2"] = r.x_star[1];
    rep.measured["delta_half_max"] = r.delta_half_max;
    rep.measured["t0"] = r.t0;
    rep.measured["C0T"] = r.c0T;
    rep.measured["w1p_t0"] = r.w1p_t0;
    rep.measured["kato_ponce_sup"] = r.kato_ponce;
    rep.measured["sup_at_double_res"] = r.sup_at_double_res;
    rep.notes.push_back("dominant deformation entry and x* taken from the d22 = d eta2/d x2 scan");
    return rep;
}

// ---- E3: Lemma rem scalings --------------------------------------------------

ExperimentReport run_e3(Workspace& ws) {
    ExperimentReport rep;
    rep.id = "e3";
    const double p = ws.cfg.get("e3.p", 2.5);
    const int npts = ws.cfg.get("e3.grid", 4096);
    const std::array<double, 2> xs{ws.cfg.get("e3.xstar1", 0.15), ws.cfg.get("e3.xstar2", 0.11)};
    std::vector<int> ns{9, 10, 11, 12};
    rep.config_echo = {{"p", std::to_string(p)},
                       {"grid", std::to_string(npts)},
                       {"n", "9,10,11,12 (+ doubling pair 9 -> 18)"},
                       {"x_star", std::to_string(xs[0]) + "," + std::to_string(xs[1])}};

    report::Series table{"e3_scalings", {"lambda", "vel_sup", "vel_grad_sup", "w1p", "spectrum_l2_err"}, {}};
    std::vector<double> lambdas, v1s, v2s, w1ps;
    double worst_mismatch = 0.0;
    for (int n : ns) {
        data::PerturbationParams b(n, xs, p);
        GridSpec g(npts, pi);
        ScalarField f = data::beta(b, rho(), g);
        const double mism = spectrum_oracle_mismatch(b, f);
        worst_mismatch = std::max(worst_mismatch, mism);
        auto [v1, v2] = data::velocity_smallness_check(b, rho(), g);
        const double w1p = sp::sobolev_w1p_norm(f, p);
        table.rows.push_back({b.lambda, v1, v2, w1p, mism});
        lambdas.push_back(b.lambda);
        v1s.push_back(v1);
        v2s.push_back(v2);
        w1ps.push_back(w1p);
    }
    rep.series.push_back(table);

    rep.check_le("4", "max closed-form spectrum mismatch over the sweep (rel l2)", worst_mismatch, 1e-6);

    // Lemma rem item 1 is an upper bound whose |xi|^-1 weight contributes a
    // further 2 pi / k on the support; the sharp decay rate is therefore
    // -4 + 2/p while the stated k^{-1/2} lambda^{-2+2/p} envelope must
    // dominate the measurement. Item 2 has no |xi|^-1 weight and its stated
    // rate -2 + 2/p is sharp.
    const double l1_rho = rho().l1_rho_hat();
    double worst_margin1 = 0.0, worst_margin2 = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double la = lambdas[i];
        const double bound1 = 2.0 * pi * std::pow(la, -3.0 + 2.0 / p) * l1_rho;
        const double bound2 = 2.0 * pi * std::pow(la, -2.0 + 2.0 / p) * l1_rho;
        worst_margin1 = std::max(worst_margin1, v1s[i] / bound1);
        worst_margin2 = std::max(worst_margin2, v2s[i] / bound2);
    }
    rep.check_le("5", "item-1 bound margin: vel sup / (2pi k^-1/2 lambda^{-2+2/p} |rho_hat|_1)",
                 worst_margin1, 1.0);
    rep.check_le("5", "item-2 bound margin: grad sup / (2pi k^-1/2 lambda^{-1+2/p} |rho_hat|_1)",
                 worst_margin2, 1.0);
    auto fit1 = report::fit_loglog(lambdas, v1s);
    auto fit2 = report::fit_loglog(lambdas, v2s);
    rep.check_slope("5", "||grad^perp lap^-1 beta||_inf vs lambda (sharp rate)", fit1,
                    -4.0 + 2.0 / p, 0.3);
    rep.check_slope("5", "||D grad^perp lap^-1 beta||_inf vs lambda", fit2, -2.0 + 2.0 / p, 0.3);
    rep.measured["item1_slope"] = fit1.slope;
    rep.measured["item1_slope_minus_stated_bound_rate"] = fit1.slope - (-3.0 + 2.0 / p);
    rep.notes.push_back("the stated item-1 rate -3+2/p is an unsharpened bound (|xi|^-1 <= 1 on "
                        "|xi| >= 1 in the rescaled integral); the measured decay follows the "
                        "sharp -4+2/p law and stays under the stated envelope");
    const auto [wlo, whi] = std::minmax_element(w1ps.begin(), w1ps.end());
    rep.check_le("5", "||beta_n||_W1p max/min over the sweep", *whi / *wlo, 2.0);

    // velocity smallness decreases when n doubles (9 -> 18, half-size box)
    {
        data::PerturbationParams b18(18, xs, p);
        auto [v1d, v2d] = data::velocity_smallness_check(b18, rho(), GridSpec(npts, pi / 2));
        rep.add_check("5", "vel sup decreases as n doubles", v1d,
                      "< " + std::to_string(v1s.front()), v1d < v1s.front());
        rep.add_check("5", "vel grad sup decreases as n doubles", v2d,
                      "< " + std::to_string(v2s.front()), v2d < v2s.front());
        rep.measured["vel_sup_n18"] = v1d;
        rep.measured["vel_grad_sup_n18"] = v2d;
    }
    rep.measured["spectrum_mismatch_worst"] = worst_mismatch;
    rep.measured["rho_hat_lp_conj"] = rho().lp_norm_rho_hat(p / (p - 1.0));
    rep.notes.push_back("reference scalings: k^{-1/2} lambda^{-2+2/p} and k^{-1/2} lambda^{-1+2/p} "
                        "with k = lambda^2 give slopes -3+2/p and -2+2/p");
    return rep;
}

// ---- E4: oscillatory-product norms at the long-horizon flow ------------------

namespace {

// multi-integrand patch quadrature around the four x*_eps translates:
// accumulates |d2 beta . d1 eta2|^p, |d1 beta . d2 eta2|^p, |d1 beta|^p,
// |d2 beta|^p on local uniform grids
struct OscProductIntegrals {
    double i1 = 0.0, i2 = 0.0, d1b = 0.0, d2b = 0.0; // p-th power integrals
};

OscProductIntegrals osc_product_quadrature(const data::PerturbationParams& b, const flow::FlowState& eta,
                                  double p, double patch_radius, int pts) {
    OscProductIntegrals acc;
    for (int e1 : {-1, 1})
        for (int e2 : {-1, 1}) {
            const double cx = e1 * b.x_star[0], cy = e2 * b.x_star[1];
            const double h = 2.0 * patch_radius / pts;
            std::vector<double> part(4, 0.0);
            std::vector<double> rows1(pts, 0.0), rows2(pts, 0.0), rows3(pts, 0.0), rows4(pts, 0.0);
#pragma omp parallel for schedule(static)
            for (int i = 0; i < pts; ++i) {
                double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
                for (int j = 0; j < pts; ++j) {
                    const double x = cx - patch_radius + (i + 0.5) * h;
                    const double y = cy - patch_radius + (j + 0.5) * h;
                    const auto bg = data::beta_grad(b, rho(), x, y);
                    const auto D = flow::interpolate_defgrad(eta, {x, y});
                    a1 += std::pow(std::abs(bg[1] * D[2]), p); // d2 beta . d1 eta2
                    a2 += std::pow(std::abs(bg[0] * D[3]), p); // d1 beta . d2 eta2
                    a3 += std::pow(std::abs(bg[0]), p);
                    a4 += std::pow(std::abs(bg[1]), p);
                }
                rows1[i] = a1;
                rows2[i] = a2;
                rows3[i] = a3;
                rows4[i] = a4;
            }
            for (int i = 0; i < pts; ++i) {
                part[0] += rows1[i];
                part[1] += rows2[i];
                part[2] += rows3[i];
                part[3] += rows4[i];
            }
            acc.i1 += part[0] * h * h;
            acc.i2 += part[1] * h * h;
            acc.d1b += part[2] * h * h;
            acc.d2b += part[3] * h * h;
        }
    return acc;
}

int patch_pts(const data::PerturbationParams& b, double patch_radius, int per_wavelength = 12) {
    const double wavelength = 2.0 * pi / b.k;
    int pts = int(std::ceil(2.0 * patch_radius / wavelength * per_wavelength));
    return std::clamp(pts, 256, 2048);
}

} // namespace

ExperimentReport run_e4(Workspace& ws) {
    const E2Result& e2 = ws.ensure_e2();
    ExperimentReport rep;
    rep.id = "e4";
    const double p = e2.q.p;
    std::vector<int> ns{9, 10, 11, 12};
    rep.config_echo = {{"n", "9,10,11,12"},
                       {"t0", std::to_string(e2.t0)},
                       {"x_star", std::to_string(e2.x_star[0]) + "," + std::to_string(e2.x_star[1])}};
    rep.notes.push_back("t0 is the final time of the e2 run; eta comes from its marker lattice");

    // sup |d1 eta2| over the lattice for the item-1 reference constant
    double sup_d21 = 0.0, sup_d22 = 0.0;
    for (const auto& m : e2.flow.markers)
        if (!m.flagged) {
            sup_d21 = std::max(sup_d21, std::abs(m.defgrad[2]));
            sup_d22 = std::max(sup_d22, std::abs(m.defgrad[3]));
        }

    report::Series table{"e4_osc_products", {"n", "item1", "item2", "item2_over_d22max", "item1_holder_bound"}, {}};
    std::vector<double> nvals, i1vals, ratio2;
    const double d2rho_lp = rho().lp_norm_d2_rho(p);
    double worst_holder = 0.0;
    for (int n : ns) {
        data::PerturbationParams b(n, e2.x_star, p);
        const double radius = 12.0 / b.lambda;
        const auto q = osc_product_quadrature(b, e2.flow, p, radius, patch_pts(b, radius));
        const double i1 = std::pow(q.i1, 1.0 / p);
        const double i2 = std::pow(q.i2, 1.0 / p);
        // exact Holder bound behind the lemma:
        // i1 <= 4^{1/p} k^{-1/2} ||d2 rho||_p sup|d1 eta2|
        const double bound1 =
            std::pow(4.0, 1.0 / p) * std::pow(b.k, -0.5) * d2rho_lp * sup_d21;
        worst_holder = std::max(worst_holder, i1 / bound1);
        table.rows.push_back({double(n), i1, i2, i2 / sup_d22, bound1});
        nvals.push_back(n);
        i1vals.push_back(i1);
        ratio2.push_back(i2 / sup_d22);
    }
    rep.series.push_back(table);

    rep.check_slope("11", "||d2 beta . d1 eta2||_p decay vs n", report::fit_loglog(nvals, i1vals),
                    -1.0, 0.3);
    rep.check_le("11", "item-1 Holder-bound margin over the sweep", worst_holder, 1.0);
    const auto [rlo, rhi] = std::minmax_element(ratio2.begin(), ratio2.end());
    rep.check_le("11", "item-2 plateau / sup|d2 eta2| stability (max/min)", *rhi / *rlo, 2.0);

    // identity flow: item 2 collapses to ||d1 beta||_p; cross-check the
    // patch quadrature against the grid route at the same x*
    {
        data::PerturbationParams b(9, e2.x_star, p);
        flow::SeedSpec id_spec;
        id_spec.half_extent = 1.2;
        id_spec.per_axis = 49;
        flow::FlowState identity = flow::FlowState::seed(id_spec);
        const double radius = 12.0 / b.lambda;
        const auto q = osc_product_quadrature(b, identity, p, radius, 2048);
        const double i2_identity = std::pow(q.i2, 1.0 / p);
        GridSpec g(ws.cfg.get("e3.grid", 4096), pi);
        ScalarField f = data::beta(b, rho(), g);
        const double grid_d1 = sp::lp_norm(sp::derivative(f, 1), p);
        // the grid route samples the carrier at ~5.6 points per wavelength,
        // which limits its |cos|^p quadrature near 3e-3; the patch route is
        // converged to ~1e-4 at this resolution
        rep.check_le("11", "identity-flow item 2 vs grid ||d1 beta||_p relative gap",
                     std::abs(i2_identity - grid_d1) / grid_d1, 8e-3);
        rep.measured["i2_identity"] = i2_identity;
        rep.measured["grid_d1_beta"] = grid_d1;
    }
    rep.measured["sup_d21"] = sup_d21;
    rep.measured["sup_d22"] = sup_d22;
    rep.measured["C0T"] = e2.c0T;
    return rep;
}

} // namespace bel::experiments
