#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "experiments_util.hpp"

namespace bel::experiments {

using std::numbers::pi;
namespace sp = bel::spectral;
using report::ExperimentReport;
using namespace detail;

// ---- E5: Besov equivalence and spectral concentration -----------------------

namespace {

struct RatioSet {
    double beta_b0 = 0.0;    // B^0_{inf,1}(beta) / ||beta||_inf
    double vel_b0 = 0.0;     // B^0_{inf,1}(u) / ||u||_inf (max over components)
    double vel_b1 = 0.0;     // B^1_{inf,1}(u) / (||u||_inf + ||Du||_inf)
    double dominance = 0.0;  // largest block share of the B^0_{inf,1} sum of beta
    double spectrum_mismatch = 0.0;
};

RatioSet besov_ratios(const data::PerturbationParams& b, const GridSpec& g) {
    RatioSet out;
    ScalarField f = data::beta(b, rho(), g);
    out.spectrum_mismatch = spectrum_oracle_mismatch(b, f);
    const lp::BesovParams b0{0.0, sp::infinity, 1.0};
    auto r = lp::besov_norm(f, b0);
    const double linf = sp::lp_norm(f, sp::infinity);
    out.beta_b0 = r.value / linf;
    double largest = 0.0, sum = 0.0;
    for (double w : r.weighted_term) {
        largest = std::max(largest, w);
        sum += w;
    }
    out.dominance = sum > 0 ? largest / sum : 0.0;

    VectorField u = euler::biot_savart(f);
    const double usup = std::max(sp::lp_norm(u.u1, sp::infinity), sp::lp_norm(u.u2, sp::infinity));
    out.vel_b0 =
        std::max(lp::besov_norm(u.u1, b0).value, lp::besov_norm(u.u2, b0).value) / usup;
    const auto vn = velocity_norms(f, true);
    out.vel_b1 = vn.b1 / (vn.sup_u + vn.sup_du);
    return out;
}

} // namespace

ExperimentReport run_e5(Workspace& ws) {
    ExperimentReport rep;
    rep.id = "e5";
    const double p = ws.cfg.get("e5.p", 2.5);
    const int npts = ws.cfg.get("e5.grid", 4096);
    rep.config_echo = {{"sweep_n", "9,12 on L=pi"},
                       {"aligned_n", "38 on L=pi/9"},
                       {"grid", std::to_string(npts)}};
    rep.notes.push_back("n = 38 places supp beta_hat inside the psi_14 plateau "
                        "[0.662, 0.925] x 2^14 in angular frequency, the dyadic-alignment "
                        "analogue of the n = 2^j choice");

    report::Series table{
        "e5_ratios", {"n", "beta_b0_over_linf", "vel_b0_over_linf", "vel_b1_over_c1", "dominant_share"}, {}};

    for (int n : {9, 12}) {
        data::PerturbationParams b(n, {ws.cfg.get("e3.xstar1", 0.15), ws.cfg.get("e3.xstar2", 0.11)}, p);
        auto r = besov_ratios(b, GridSpec(npts, pi));
        table.rows.push_back({double(n), r.beta_b0, r.vel_b0, r.vel_b1, r.dominance});
        rep.check_in("6", "B0/Linf ratio for beta, n=" + std::to_string(n), r.beta_b0, 1.0 / 3.0, 3.0);
        rep.check_in("6", "B0/Linf ratio for velocity, n=" + std::to_string(n), r.vel_b0, 1.0 / 3.0,
                     3.0);
        rep.check_in("6", "B1/C1 ratio for velocity, n=" + std::to_string(n), r.vel_b1, 1.0 / 3.0,
                     3.0);
    }

    // the dyadically aligned point carries the concentration claim
    {
        data::PerturbationParams b(38, {ws.cfg.get("e5.xstar1", 0.06), ws.cfg.get("e5.xstar2", 0.045)},
                                   p);
        auto r = besov_ratios(b, GridSpec(npts, pi / 9));
        table.rows.push_back({38.0, r.beta_b0, r.vel_b0, r.vel_b1, r.dominance});
        rep.check_ge("6", "dominant dyadic block share of B0 sum, n=38", r.dominance, 0.95);
        rep.check_in("6", "B0/Linf ratio for beta, n=38", r.beta_b0, 1.0 / 3.0, 3.0);
        rep.check_in("6", "B1/C1 ratio for velocity, n=38", r.vel_b1, 1.0 / 3.0, 3.0);
        rep.check_le("4", "closed-form spectrum mismatch at the aligned point (rel l2)", r.spectrum_mismatch, 1e-6);
        rep.measured["dominance_n38"] = r.dominance;
    }
    rep.series.push_back(table);
    return rep;
}

// ---- shared base solve on the perturbation grid (E6/E7) ---------------------

namespace {

ChainBase compute_chain_base(const report::KvConfig& cfg) {
    ChainBase base;
    base.q = data::QuadrupoleParams{cfg.get("chain.M", 2.0), cfg.get("chain.N", 1),
                                    cfg.get("chain.N0", 2), cfg.get("chain.p", 2.5)};
    base.grid = GridSpec(cfg.get("chain.grid", 2048), cfg.get("chain.L", pi / 4));
    const double t_end = cfg.get("chain.t_end", 1.0);

    ScalarField w0 = data::omega0(base.q, base.grid);
    VectorField u0 = euler::biot_savart(w0);
    const double umax = sup_vec(u0);
    // one fixed step size for every run on this grid so that base and
    // perturbed solves share step boundaries; the RK4 pseudo-spectral
    // stability bound is kappa_max umax dt <= 2.8, i.e. dt <~ 1.35 h/umax
    base.dt = std::min(cfg.get("chain.dt_max", 0.1),
                       0.9 * base.grid.spacing() / std::max(umax, 1e-12));
    const int steps_est = int(std::ceil(t_end / base.dt));
    const int stride = std::max(1, (steps_est + 7) / 8);

    flow::SeedSpec spec;
    spec.half_extent = cfg.get("chain.seed_half", 0.74);
    spec.per_axis = cfg.get("chain.seed_n", 97);
    StepRecorder rec(flow::FlowState::seed(spec), base.grid.half_width, 0.97);

    euler::SolverConfig scfg;
    scfg.t_end = t_end;
    scfg.dt = base.dt;
    scfg.dt_max = base.dt;
    scfg.cfl_cap = 1.0;
    scfg.symmetry_enforce = false; // comparable with the beta-perturbed runs
    scfg.snapshot_stride = stride;
    scfg.p_diag = base.q.p;
    base.traj = euler::solve(w0, scfg, rec.observer(), true);
    if (base.traj.halvings != 0)
        throw std::runtime_error("chain base solve: unexpected CFL halving, step grids differ");
    base.flow_steps = std::move(rec.steps);
    base.gronwall_integral = base.traj.gronwall_integral;
    base.c0T = std::exp(base.gronwall_integral);

    // map snapshot times back to step indices (marker states live per step)
    std::vector<int> snap_steps;
    for (double ts : base.traj.snapshot_times) {
        int idx = 0;
        for (std::size_t k = 0; k < base.traj.diag.size(); ++k)
            if (std::abs(base.traj.diag[k].t - ts) < 1e-12) idx = int(k);
        snap_steps.push_back(idx);
    }
    // t0: the snapshot time with maximal measured |d eta2/d x2|
    double best = -1.0;
    int best_snap = 0;
    for (std::size_t i = 0; i < snap_steps.size(); ++i) {
        const double v = scan_d22(base.flow_steps.at(snap_steps[i])).max;
        if (v > best) {
            best = v;
            best_snap = int(i);
        }
    }
    base.t0_index = best_snap; // index into the snapshot arrays
    base.step_of_snapshot = snap_steps;
    base.d22_max = best;
    base.t0 = base.traj.snapshot_times.at(best_snap);
    auto scan = scan_d22(base.flow_steps.at(snap_steps[best_snap]));
    base.x_star = canonical_quadrant(scan.seed);
    // keep the translates clear of the axes so they stay disjoint
    const double floor_xy = 0.06;
    base.x_star[0] = std::max(base.x_star[0], floor_xy);
    base.x_star[1] = std::max(base.x_star[1], floor_xy);
    base.w1p_t0 = sp::sobolev_w1p_norm(base.traj.snapshots.at(base.t0_index), base.q.p);
    return base;
}

} // namespace

const ChainBase& Workspace::ensure_chain() {
    if (!chain_) chain_ = compute_chain_base(cfg);
    return *chain_;
}

PerturbedRun Workspace::run_perturbed(int n, double scale) {
    const ChainBase& base = ensure_chain();
    PerturbedRun out;
    out.n = n;
    out.scale = scale;

    data::PerturbationParams b(n, base.x_star, base.q.p);
    ScalarField beta_field = data::beta(b, rho(), base.grid);
    ScalarField w0 = data::omega0(base.q, base.grid);
    std::vector<double> v(base.grid.size());
    kernels::linear_combine({w0.data(), beta_field.data()}, {1.0, scale}, v.data(), v.size());
    ScalarField w0n(base.grid, std::move(v));

    {
        ScalarField scaled_beta = beta_field;
        if (scale != 1.0) {
            std::vector<double> sv(beta_field.values());
            kernels::map_inplace(sv.data(), sv.size(), [scale](double x) { return scale * x; });
            scaled_beta = ScalarField(base.grid, std::move(sv));
        }
        auto vn = velocity_norms(scaled_beta, false);
        out.v0_sup = vn.sup_u;
        out.v0_grad_sup = vn.sup_du;
    }
    out.w1p_0 = sp::sobolev_w1p_norm(w0n, base.q.p);

    flow::SeedSpec spec;
    spec.half_extent = cfg.get("chain.seed_half", 0.74);
    spec.per_axis = cfg.get("chain.seed_n", 97);
    StepRecorder rec(flow::FlowState::seed(spec), base.grid.half_width, 0.97);

    euler::SolverConfig scfg;
    scfg.t_end = base.traj.final_time();
    scfg.dt = base.dt;
    scfg.dt_max = base.dt;
    scfg.cfl_cap = 1.0;
    scfg.symmetry_enforce = false;
    scfg.snapshot_stride = int(base.traj.config.snapshot_stride);
    scfg.p_diag = base.q.p;
    euler::Trajectory traj = euler::solve(w0n, scfg, rec.observer(), true);
    if (traj.halvings != 0)
        throw std::runtime_error("perturbed solve: unexpected CFL halving, step grids differ");
    if (traj.snapshots.size() != base.traj.snapshots.size())
        throw std::runtime_error("perturbed solve: step grid mismatch with the base run");

    // theta over every shared step; velocity-difference norms at the
    // sampled snapshot times
    for (std::size_t i = 0; i < base.flow_steps.size(); ++i) {
        auto cmp = flow::compare_flows(base.flow_steps[i], rec.steps[i], 1.0, 1.0);
        out.theta = std::max(out.theta, cmp.theta);
    }
    for (std::size_t i = 0; i < base.traj.snapshots.size(); ++i) {
        std::vector<double> dv(base.grid.size());
        kernels::linear_combine({traj.snapshots[i].data(), base.traj.snapshots[i].data()},
                                {1.0, -1.0}, dv.data(), dv.size());
        ScalarField diff(base.grid, std::move(dv));
        auto vn = velocity_norms(diff, true);
        out.vdiff_c1_sup = std::max(out.vdiff_c1_sup, vn.sup_u + vn.sup_du);
        out.vdiff_b1_sup = std::max(out.vdiff_b1_sup, vn.b1);
    }
    out.w1p_t0 = sp::sobolev_w1p_norm(traj.snapshots.at(base.t0_index), base.q.p);
    out.flow_t0 = rec.steps.at(base.step_of_snapshot.at(base.t0_index));
    out.gronwall_slack =
        flow::sup_deformation(rec.steps.back()).value / std::exp(traj.gronwall_integral) - 1.0;
    return out;
}

const PerturbedRun& Workspace::ensure_perturbed(int n) {
    auto it = perturbed_.find(n);
    if (it == perturbed_.end()) it = perturbed_.emplace(n, run_perturbed(n, 1.0)).first;
    return it->second;
}

// ---- E6: continuity probe ----------------------------------------------------

ExperimentReport run_e6(Workspace& ws) {
    const ChainBase& base = ws.ensure_chain();
    ExperimentReport rep;
    rep.id = "e6";
    rep.config_echo = {{"grid", std::to_string(base.grid.n)},
                       {"L", std::to_string(base.grid.half_width)},
                       {"window", "[0, " + std::to_string(base.traj.final_time()) + "]"},
                       {"n", "8,10,12"},
                       {"dt", std::to_string(base.dt)}};
    rep.notes.push_back("probes the continuity hypothesis the argument contradicts; only the "
                        "flow-comparison inequality is asserted, never the hypothesis");

    report::Series table{"e6_continuity",
                         {"n", "v0_sup", "v0_grad_sup", "theta", "vdiff_c1_sup", "vdiff_b1_sup",
                          "comparison_const"},
                         {}};
    std::vector<double> v0c1, thetas, consts;
    for (int n : {8, 10, 12}) {
        const PerturbedRun& run = ws.ensure_perturbed(n);
        const double c = run.theta / run.vdiff_c1_sup;
        table.rows.push_back(
            {double(n), run.v0_sup, run.v0_grad_sup, run.theta, run.vdiff_c1_sup, run.vdiff_b1_sup, c});
        v0c1.push_back(run.v0_sup + run.v0_grad_sup);
        thetas.push_back(run.theta);
        consts.push_back(c);
        rep.check_le("9", "Gronwall ceiling slack, perturbed n=" + std::to_string(n),
                     run.gronwall_slack, 0.01);
    }
    rep.series.push_back(table);

    const auto [clo, chi] = std::minmax_element(consts.begin(), consts.end());
    rep.check_le("9", "comparison constant stability across n (max/min)", *chi / *clo, 4.0);

    // dyadic scaling of the perturbation at fixed n: theta must scale linearly
    {
        const int n_scale = ws.cfg.get("e6.scale_n", 10);
        std::vector<double> scales{1.0, 0.5, 0.25}, th;
        for (double s : scales) {
            PerturbedRun run =
                s == 1.0 ? ws.ensure_perturbed(n_scale) : ws.run_perturbed(n_scale, s);
            th.push_back(run.theta);
        }
        rep.check_slope("9", "theta vs perturbation scale", report::fit_loglog(scales, th), 1.0,
                        0.1);
        report::Series sc{"e6_scaling", {"scale", "theta"}, {}};
        for (std::size_t i = 0; i < scales.size(); ++i) sc.rows.push_back({scales[i], th[i]});
        rep.series.push_back(sc);
    }

    // reported, not asserted: does theta_n track the initial velocity smallness?
    auto corr = report::fit_loglog(v0c1, thetas);
    rep.measured["theta_vs_v0_slope"] = corr.slope;
    rep.measured["theta_vs_v0_r2"] = corr.r2;
    rep.notes.push_back("theta_n vs ||v_n(0)||_C1 log-log slope " + std::to_string(corr.slope) +
                        " (probe output, no assertion)");
    return rep;
}

// ---- E7: norm inflation chain -------------------------------------------------

namespace {

// single-pass quadrature of every chain integrand over the support box
struct ChainIntegrals {
    // p-th power integrals
    double a_pert = 0.0;   // |grad(w0n o eta_n^-1)|, via the inverse-Jacobi rows
    double b_pert = 0.0;   // |d w0n (perp grad eta_{n,2})|
    double b_base = 0.0;   // |d w0n (perp grad eta_2)|, unperturbed flow
    double beta_term = 0.0;  // |d beta (perp grad eta_2)|
    double omega_term = 0.0; // |d w0 (perp grad eta_2)|
    double a_base0 = 0.0;  // |grad(w0 o eta^-1)|
    double grad_w0n = 0.0; // |grad w0n|
    double i1 = 0.0, i2 = 0.0; // the two oscillatory-product norms at this flow
};

ChainIntegrals chain_quadrature(const data::QuadrupoleParams& q,
                                const data::PerturbationParams& b, double beta_scale,
                                const flow::FlowState& eta, const flow::FlowState& eta_n, double p,
                                double half, int pts) {
    ChainIntegrals acc;
    const double h = 2.0 * half / pts;
    std::vector<ChainIntegrals> rows(pts);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < pts; ++i) {
        ChainIntegrals r;
        for (int j = 0; j < pts; ++j) {
            const double x = -half + (i + 0.5) * h;
            const double y = -half + (j + 0.5) * h;
            const auto gw = data::omega0_grad(q, x, y);
            auto gb = data::beta_grad(b, rho(), x, y);
            gb[0] *= beta_scale;
            gb[1] *= beta_scale;
            const double g1 = gw[0] + gb[0], g2 = gw[1] + gb[1];
            const auto D = flow::interpolate_defgrad(eta, {x, y});
            const auto Dn = flow::interpolate_defgrad(eta_n, {x, y});
            // d f (perp grad eta_2) = -f_1 d22 + f_2 d21; the inverse-Jacobi row pair
            const double row1n = -g1 * Dn[3] + g2 * Dn[2];
            const double row2n = g1 * Dn[1] - g2 * Dn[0];
            const double row1 = -g1 * D[3] + g2 * D[2];
            const double row1_w0 = -gw[0] * D[3] + gw[1] * D[2];
            const double row2_w0 = gw[0] * D[1] - gw[1] * D[0];
            const double row1_beta = -gb[0] * D[3] + gb[1] * D[2];
            r.a_pert += std::pow(std::hypot(row1n, row2n), p);
            r.b_pert += std::pow(std::abs(row1n), p);
            r.b_base += std::pow(std::abs(row1), p);
            r.beta_term += std::pow(std::abs(row1_beta), p);
            r.omega_term += std::pow(std::abs(row1_w0), p);
            r.a_base0 += std::pow(std::hypot(row1_w0, row2_w0), p);
            r.grad_w0n += std::pow(std::hypot(g1, g2), p);
            r.i1 += std::pow(std::abs(gb[1] * D[2]), p); // d2 beta . d1 eta2
            r.i2 += std::pow(std::abs(gb[0] * D[3]), p); // d1 beta . d2 eta2
        }
        rows[i] = r;
    }
    for (const auto& r : rows) {
        acc.a_pert += r.a_pert * h * h;
        acc.b_pert += r.b_pert * h * h;
        acc.b_base += r.b_base * h * h;
        acc.beta_term += r.beta_term * h * h;
        acc.omega_term += r.omega_term * h * h;
        acc.a_base0 += r.a_base0 * h * h;
        acc.grad_w0n += r.grad_w0n * h * h;
        acc.i1 += r.i1 * h * h;
        acc.i2 += r.i2 * h * h;
    }
    return acc;
}

} // namespace

ExperimentReport run_e7(Workspace& ws) {
    const ChainBase& base = ws.ensure_chain();
    ExperimentReport rep;
    rep.id = "e7";
    rep.config_echo = {{"grid", std::to_string(base.grid.n)},
                       {"t0", std::to_string(base.t0)},
                       {"n", "8,10,12"},
                       {"x_star", std::to_string(base.x_star[0]) + "," + std::to_string(base.x_star[1])}};
    rep.notes.push_back("t0 is the time of maximal measured |d eta2/d x2| within the window; "
                        "the deformation excess at desk scale is modest and every chain "
                        "inequality is verified with measured quantities");

    const flow::FlowState& eta = base.flow_steps.at(base.step_of_snapshot.at(base.t0_index));
    const double p = base.q.p;

    report::Series table{"e7_chain",
                         {"n", "w1p_t0_pert", "a_pert", "b_pert", "b_base", "beta_term",
                          "omega_term", "theta_grad", "grad_w0n", "inflation", "i1", "i2"},
                         {}};
    std::vector<double> nvals, inflations, i1vals;
    bool all_chain_ok = true;
    for (int n : {8, 10, 12}) {
        const PerturbedRun& run = ws.ensure_perturbed(n);
        data::PerturbationParams b(n, base.x_star, p);
        const int pts = std::clamp(int(std::ceil(2.0 * 0.70 / (2.0 * pi / b.k) * 8)), 512, 2304);
        auto q = chain_quadrature(base.q, b, 1.0, eta, run.flow_t0, p, 0.70, pts);
        const double inv_p = 1.0 / p;
        const double a_pert = std::pow(q.a_pert, inv_p);
        const double b_pert = std::pow(q.b_pert, inv_p);
        const double b_base = std::pow(q.b_base, inv_p);
        const double beta_term = std::pow(q.beta_term, inv_p);
        const double omega_term = std::pow(q.omega_term, inv_p);
        const double a_base0 = std::pow(q.a_base0, inv_p);
        const double grad_w0n = std::pow(q.grad_w0n, inv_p);
        const double i1 = std::pow(q.i1, inv_p), i2 = std::pow(q.i2, inv_p);

        // theta restricted to the gradient part at t0 (the MT correction uses it)
        auto cmp = flow::compare_flows(eta, run.flow_t0, 1.0, 1.0);
        const double theta_grad = cmp.grad_part;

        const std::string tag = ", n=" + std::to_string(n);
        bool ok = true;
        // conservation + embedding: ||w_n(t0)||_W1p >= ||grad(w0n o eta_n^-1)||_p
        ok &= rep.check_ge("11", "conservation: w1p of w_n(t0) vs pullback gradient norm" + tag,
                           run.w1p_t0 / a_pert, 1.0 - 5e-3);
        // vector norm dominates its component
        ok &= rep.check_ge("11", "pullback norm dominates its second row" + tag,
                           a_pert / b_pert, 1.0);
        // flow comparison: |B_n - B| <= theta ||grad w0n||_p
        ok &= rep.check_le("11", "flow-comparison correction bounds the row shift" + tag,
                           std::abs(b_pert - b_base) / (theta_grad * grad_w0n), 1.0 + 5e-3);
        // triangle: b_base >= beta_term - omega_term
        ok &= rep.check_ge("11", "triangle split: base row vs beta minus quadrupole terms" + tag,
                           b_base - (beta_term - omega_term), -1e-12);
        // quadrupole ceiling: omega_term <= ||grad(w0 o eta^-1)||_p <= ||w(t0)||_W1p
        ok &= rep.check_le("11", "quadrupole term vs unperturbed pullback" + tag,
                           omega_term / a_base0, 1.0);
        ok &= rep.check_le("11", "unperturbed pullback vs measured w1p(t0)" + tag,
                           a_base0 / base.w1p_t0, 1.0 + 1e-2);
        // oscillatory lower bound: beta_term >= i2 - i1
        ok &= rep.check_ge("11", "beta row dominates the oscillatory-product difference" + tag,
                           beta_term - (i2 - i1), -1e-12);
        all_chain_ok &= ok;

        const double inflation = run.w1p_t0 / run.w1p_0;
        table.rows.push_back({double(n), run.w1p_t0, a_pert, b_pert, b_base, beta_term, omega_term,
                              theta_grad, grad_w0n, inflation, i1, i2});
        nvals.push_back(n);
        inflations.push_back(inflation);
        i1vals.push_back(i1);
    }
    rep.series.push_back(table);

    bool nondecreasing = true;
    for (std::size_t i = 1; i < inflations.size(); ++i)
        if (inflations[i] < inflations[i - 1] * (1.0 - 1e-9)) nondecreasing = false;
    rep.add_check("11", "inflation factor nondecreasing over the n sweep",
                  nondecreasing ? 1.0 : 0.0, "nondecreasing", nondecreasing);

    // oscillatory product 1 at this flow: the exact Holder bound must dominate;
    // the raw slope is steeper than -1 here because d1 eta2 is still near
    // its t = 0 zero and the shrinking patches sample it ever closer to
    // x* (reported, the -1 +- 0.3 rate is asserted on the deformed flow in e4)
    double sup_d21 = 0.0;
    for (const auto& m : eta.markers)
        if (!m.flagged) sup_d21 = std::max(sup_d21, std::abs(m.defgrad[2]));
    const double d2rho_lp = rho().lp_norm_d2_rho(p);
    double worst_holder = 0.0;
    for (std::size_t i = 0; i < nvals.size(); ++i) {
        const double k = 9.0 * nvals[i] * nvals[i];
        const double bound1 = std::pow(4.0, 1.0 / p) * std::pow(k, -0.5) * d2rho_lp * sup_d21;
        worst_holder = std::max(worst_holder, i1vals[i] / bound1);
    }
    rep.check_le("11", "osc item-1 Holder-bound margin at t0", worst_holder, 1.0);
    auto i1fit = report::fit_loglog(nvals, i1vals);
    rep.measured["osc_item1_slope_t0"] = i1fit.slope;

    rep.measured["w1p_base_t0"] = base.w1p_t0;
    rep.measured["d22_max_t0"] = base.d22_max;
    rep.measured["C0T"] = base.c0T;
    return rep;
}

// ---- E8: structural invariants ------------------------------------------------

namespace {

struct BatteryOut {
    double l2_drift_per_time = 0.0;
    double linf_growth = 0.0;
    double sym_defect_rel = 0.0;
    double det_defect = 0.0;
    double axis_drift = 0.0;
    double reversibility = 0.0;
};

BatteryOut run_battery(const data::QuadrupoleParams& q, const GridSpec& g, double t_end) {
    BatteryOut out;
    ScalarField w0 = data::omega0(q, g);

    flow::SeedSpec spec;
    spec.half_extent = 0.7;
    spec.per_axis = 49;
    spec.clusters.push_back({{0.0, 0.45}, 0.0, 1});
    spec.clusters.push_back({{0.55, 0.0}, 0.0, 1});
    flow::CoIntegrator co(flow::FlowState::seed(spec), g.half_width);

    euler::SolverConfig cfg;
    cfg.t_end = t_end;
    cfg.dt_max = 0.1;
    cfg.p_diag = q.p;
    euler::Trajectory traj = euler::solve(w0, cfg, co.observer(), true);

    const auto& d0 = traj.diag.front();
    for (const auto& d : traj.diag) {
        out.l2_drift_per_time =
            std::max(out.l2_drift_per_time, d.t > 0 ? std::abs(d.l2 - d0.l2) / d0.l2 / d.t : 0.0);
        out.linf_growth = std::max(out.linf_growth, d.linf / d0.linf - 1.0);
        out.sym_defect_rel = std::max(out.sym_defect_rel, d.sym_defect / d.linf);
    }
    out.det_defect = flow::max_det_defect(co.state());
    const auto& on_x2 = co.state().markers[co.state().markers.size() - 2];
    const auto& on_x1 = co.state().markers.back();
    out.axis_drift = std::max(std::abs(on_x2.pos[0]), std::abs(on_x1.pos[1]));

    // fixed-step reversibility
    ScalarField w = sp::dealias(w0);
    const std::vector<double> start = w.values();
    for (int i = 0; i < 8; ++i) w = euler::step(w, 0.125);
    for (int i = 0; i < 8; ++i) w = euler::step(w, -0.125);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < start.size(); ++i) {
        num += (w.values()[i] - start[i]) * (w.values()[i] - start[i]);
        den += start[i] * start[i];
    }
    out.reversibility = std::sqrt(num / den);
    return out;
}

// halves-or-better with a roundoff floor
bool improved(double coarse, double fine, double floor_val) {
    return fine <= std::max(0.5 * coarse, floor_val);
}

} // namespace

ExperimentReport run_e8(Workspace& ws) {
    ExperimentReport rep;
    rep.id = "e8";
    data::QuadrupoleParams q{ws.cfg.get("e8.M", 2.0), ws.cfg.get("e8.N", 1), ws.cfg.get("e8.N0", 1),
                             ws.cfg.get("e8.p", 2.5)};
    const double t_end = ws.cfg.get("e8.t_end", 5.0);
    const int npts = ws.cfg.get("e8.grid", 512);
    rep.config_echo = {{"M", std::to_string(q.M)},
                       {"grid", std::to_string(npts) + " and " + std::to_string(2 * npts)},
                       {"t_end", std::to_string(t_end)}};

    BatteryOut c = run_battery(q, GridSpec(npts, pi / 2), t_end);
    BatteryOut f = run_battery(q, GridSpec(2 * npts, pi / 2), t_end);

    rep.check_le("7", "relative L2 drift per unit time", c.l2_drift_per_time, 1e-6);
    rep.check_le("7", "Linf growth over the run", c.linf_growth, 1e-3);
    rep.check_le("7", "odd-odd defect relative to ||w||_inf", c.sym_defect_rel, 1e-8);
    rep.check_le("7", "max |det Deta - 1|", c.det_defect, 1e-4);
    rep.check_le("7", "axis-seeded marker drift off axis", c.axis_drift, 1e-8);
    rep.check_le("8", "solver reversibility (relative L2)", c.reversibility, 1e-5);

    // radial zero-circulation vortex: everything conserved trivially
    {
        GridSpec g(256, pi);
        ScalarField radial(g, kernels::sample(g, [](double x, double y) {
                               const double s = (x * x + y * y) / 0.5;
                               return (1.0 - s) * std::exp(-s);
                           }));
        euler::SolverConfig cfg;
        cfg.t_end = 1.0;
        cfg.symmetry_enforce = false;
        euler::Trajectory traj = euler::solve(radial, cfg);
        double diff = 0.0, den = 0.0;
        const auto& a = traj.final_state().values();
        const auto& b = sp::dealias(radial).values();
        for (std::size_t i = 0; i < a.size(); ++i) {
            diff += (a[i] - b[i]) * (a[i] - b[i]);
            den += b[i] * b[i];
        }
        rep.check_le("7", "radial steady state drift (relative L2)", std::sqrt(diff / den), 1e-6);
    }

    // resolution doubling must not degrade any defect: halves or better
    // above the stated roundoff floors
    struct Row {
        const char* name;
        double coarse, fine, floor_val;
    };
    const Row rows[] = {
        {"l2_drift", c.l2_drift_per_time, f.l2_drift_per_time, 1e-12},
        {"linf_growth", c.linf_growth, f.linf_growth, 1e-9},
        {"sym_defect", c.sym_defect_rel, f.sym_defect_rel, 1e-12},
        {"det_defect", c.det_defect, f.det_defect, 1e-9},
        {"axis_drift", c.axis_drift, f.axis_drift, 1e-12},
    };
    report::Series table{"e8_defects", {"which", "coarse", "fine"}, {}};
    int idx = 0;
    for (const auto& r : rows) {
        table.rows.push_back({double(idx++), r.coarse, r.fine});
        rep.add_check("7", std::string("doubling improves ") + r.name + " (or at floor)", r.fine,
                      "<= max(coarse/2, floor)", improved(r.coarse, r.fine, r.floor_val));
    }
    rep.series.push_back(table);
    rep.measured["reversibility"] = c.reversibility;
    return rep;
}

ExperimentReport run_experiment(Workspace& ws, const std::string& id) {
    if (id == "e1") return run_e1(ws);
    if (id == "e2") return run_e2(ws);
    if (id == "e3") return run_e3(ws);
    if (id == "e4") return run_e4(ws);
    if (id == "e5") return run_e5(ws);
    if (id == "e6") return run_e6(ws);
    if (id == "e7") return run_e7(ws);
    if (id == "e8") return run_e8(ws);
    throw std::invalid_argument("unknown experiment id: " + id);
}

} // namespace bel::experiments
