#include "bel/euler.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "bel/fft.hpp"
#include "bel/kernels.hpp"
#include "bel/spectral.hpp"

namespace bel::euler {

using std::numbers::pi;

namespace {

struct StageResult {
    Spectrum k;      // spectral tendency -u . grad w (dealiased)
    StageField f;    // stage velocity (+ gradient)
    double umax = 0; // max |u| over the grid
};

// one fused pass: out[i] = multiplier(m1, m2) * w_hat[i] * fold, then c2r
template <class Fn>
ScalarField derived_field(const Spectrum& w_hat, Fn multiplier) {
    const GridSpec& g = w_hat.grid;
    const int n = g.n, cols = n / 2 + 1;
    std::vector<complexd> buf(w_hat.c.size());
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        const int m1 = r <= n / 2 ? r : r - n;
        const complexd* src = w_hat.c.data() + std::size_t(r) * cols;
        complexd* dst = buf.data() + std::size_t(r) * cols;
        for (int m2 = 0; m2 < cols; ++m2)
            dst[m2] = src[m2] * multiplier(m1, m2) * fft::inverse_fold_factor(g, r, m2);
    }
    return {g, fft::inverse_prepared(std::move(buf), g)};
}

// evaluate one RK stage from the spectral vorticity; velocity and gradient
// symbols are applied directly to w_hat (u = grad^perp lap^-1 w)
StageResult eval_stage(const Spectrum& w_hat, double stage_time, bool dealias_product,
                       bool need_du) {
    const GridSpec& g = w_hat.grid;
    const int half = g.n / 2;
    const double s = pi / g.half_width;
    StageResult r;

    auto nyq = [half](int m1, int m2) { return m1 == half || m1 == -half || m2 == half; };
    auto inv_k2 = [s](int m1, int m2) {
        return 1.0 / (s * s * (double(m1) * m1 + double(m2) * m2));
    };
    // u1 = -d2 lap^-1 w <-> i m2 / (s |m|^2);  u2 = d1 lap^-1 w <-> -i m1 / (s |m|^2)
    ScalarField u1 = derived_field(w_hat, [&](int m1, int m2) {
        if ((m1 == 0 && m2 == 0) || nyq(m1, m2)) return complexd(0.0);
        return complexd(0.0, m2 * s * inv_k2(m1, m2));
    });
    ScalarField u2 = derived_field(w_hat, [&](int m1, int m2) {
        if ((m1 == 0 && m2 == 0) || nyq(m1, m2)) return complexd(0.0);
        return complexd(0.0, -m1 * s * inv_k2(m1, m2));
    });
    ScalarField w1 = derived_field(w_hat, [&](int m1, int m2) {
        return nyq(m1, m2) ? complexd(0.0) : complexd(0.0, s * m1);
    });
    ScalarField w2 = derived_field(w_hat, [&](int m1, int m2) {
        return nyq(m1, m2) ? complexd(0.0) : complexd(0.0, s * m2);
    });

    std::vector<double> prod(g.size());
    {
        const double* a1 = u1.data();
        const double* a2 = u2.data();
        const double* b1 = w1.data();
        const double* b2 = w2.data();
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(g.size()); ++i)
            prod[i] = -(a1[i] * b1[i] + a2[i] * b2[i]);
    }
    r.k = fft::forward(g, prod);
    if (dealias_product) r.k = spectral::dealias(std::move(r.k));

    r.umax = kernels::reduce_max(g.size(), [&](std::size_t i) {
        const double a = u1.values()[i], b = u2.values()[i];
        return std::sqrt(a * a + b * b);
    });

    r.f.time = stage_time;
    r.f.u = VectorField(std::move(u1), std::move(u2));
    if (need_du) {
        // du11 = d1 u1 <-> -m1 m2 / |m|^2, du21 = d2 u1 <-> -m2^2 / |m|^2,
        // du12 = d1 u2 <-> m1^2 / |m|^2 (du22 = -du11 by incompressibility)
        r.f.du11 = derived_field(w_hat, [&](int m1, int m2) {
            if ((m1 == 0 && m2 == 0) || nyq(m1, m2)) return complexd(0.0);
            return complexd(-double(m1) * m2 * s * s * inv_k2(m1, m2));
        });
        r.f.du21 = derived_field(w_hat, [&](int m1, int m2) {
            if ((m1 == 0 && m2 == 0) || nyq(m1, m2)) return complexd(0.0);
            return complexd(-double(m2) * m2 * s * s * inv_k2(m1, m2));
        });
        r.f.du12 = derived_field(w_hat, [&](int m1, int m2) {
            if ((m1 == 0 && m2 == 0) || nyq(m1, m2)) return complexd(0.0);
            return complexd(double(m1) * m1 * s * s * inv_k2(m1, m2));
        });
        r.f.has_du = true;
    }
    return r;
}

Spectrum axpy(const Spectrum& a, double c, const Spectrum& b) {
    Spectrum out = a;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(out.c.size()); ++i) out.c[i] += c * b.c[i];
    return out;
}

double du_sup_of(const StageField& f) {
    if (!f.has_du) return 0.0;
    const std::size_t n = f.du11.grid().size();
    return kernels::reduce_max(n, [&](std::size_t i) {
        double m = std::abs(f.du11.values()[i]);
        m = std::max(m, std::abs(f.du21.values()[i]));
        m = std::max(m, std::abs(f.du12.values()[i]));
        return m;
    });
}

} // namespace

VectorField biot_savart(const ScalarField& omega) {
    return spectral::perp_gradient(spectral::inv_laplacian(omega));
}

ScalarField rhs(const ScalarField& omega, bool dealias_product) {
    auto r = eval_stage(omega.spectrum(), 0.0, dealias_product, false);
    return fft::inverse(r.k);
}

ScalarField step(const ScalarField& omega, double dt, bool dealias_product) {
    const Spectrum& w = omega.spectrum();
    auto s1 = eval_stage(w, 0.0, dealias_product, false);
    auto s2 = eval_stage(axpy(w, 0.5 * dt, s1.k), 0.0, dealias_product, false);
    auto s3 = eval_stage(axpy(w, 0.5 * dt, s2.k), 0.0, dealias_product, false);
    auto s4 = eval_stage(axpy(w, dt, s3.k), 0.0, dealias_product, false);
    Spectrum out = w;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(out.c.size()); ++i)
        out.c[i] += dt / 6.0 * (s1.k.c[i] + 2.0 * s2.k.c[i] + 2.0 * s3.k.c[i] + s4.k.c[i]);
    return fft::inverse(out);
}

ScalarField symmetrize_odd_odd(const ScalarField& w) {
    const GridSpec& g = w.grid();
    const int n = g.n;
    std::vector<double> out(g.size());
    const double* v = w.data();
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n; ++j1) {
        const int m1 = (n - j1) % n;
        for (int j2 = 0; j2 < n; ++j2) {
            const int m2 = (n - j2) % n;
            out[std::size_t(j1) * n + j2] =
                0.25 * (v[std::size_t(j1) * n + j2] - v[std::size_t(m1) * n + j2] -
                        v[std::size_t(j1) * n + m2] + v[std::size_t(m1) * n + m2]);
        }
    }
    return {g, std::move(out)};
}

double odd_odd_defect(const ScalarField& w) {
    const GridSpec& g = w.grid();
    const int n = g.n;
    const double* v = w.data();
    return kernels::reduce_max(g.size(), [&](std::size_t i) {
        const int j1 = int(i) / n, j2 = int(i) % n;
        const int m1 = (n - j1) % n, m2 = (n - j2) % n;
        const double d1 = std::abs(v[i] + v[std::size_t(m1) * n + j2]);
        const double d2 = std::abs(v[i] + v[std::size_t(j1) * n + m2]);
        return std::max(d1, d2);
    });
}

Trajectory solve(const ScalarField& omega0, const SolverConfig& cfg,
                 const StageObserver& observer, bool observer_needs_du) {
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("solve: t_end must be >= 0");
    if (!(cfg.cfl_cap > 0.0 && cfg.cfl_cap <= 1.0))
        throw std::invalid_argument("solve: cfl_cap must lie in (0, 1]");

    const GridSpec& g = omega0.grid();
    Trajectory traj;
    traj.grid = g;
    traj.config = cfg;

    ScalarField w = cfg.dealias ? spectral::dealias(omega0) : omega0;
    if (cfg.symmetry_enforce) w = symmetrize_odd_odd(w);
    Spectrum w_hat = w.spectrum();

    const bool need_du = cfg.track_du || observer_needs_du;
    const double h = g.spacing();

    auto record = [&](double t, const ScalarField& field, const StageResult& s1) {
        StepDiagnostics d;
        d.t = t;
        d.l2 = spectral::lp_norm(field, 2.0);
        d.lp = spectral::lp_norm(field, cfg.p_diag);
        d.linf = spectral::lp_norm(field, spectral::infinity);
        if (!std::isfinite(d.linf))
            throw std::runtime_error("solve: vorticity lost finiteness at t = " + std::to_string(t));
        const double h2 = h * h;
        d.energy = 0.5 * h2 *
                   kernels::reduce_sum(g.size(), [&](std::size_t i) {
                       const double a = s1.f.u.u1.values()[i], b = s1.f.u.u2.values()[i];
                       return a * a + b * b;
                   });
        d.sym_defect = odd_odd_defect(field);
        d.du_sup = du_sup_of(s1.f);
        traj.diag.push_back(d);
    };

    auto s1 = eval_stage(w_hat, 0.0, cfg.dealias, need_du);
    record(0.0, w, s1);
    traj.snapshot_times.push_back(0.0);
    traj.snapshots.push_back(w);

    if (cfg.t_end == 0.0) return traj;

    double dt_base = cfg.dt;
    if (dt_base <= 0.0)
        dt_base = std::min(cfg.dt_max, cfg.cfl_cap * h / std::max(s1.umax, 1e-12));
    dt_base = std::min(dt_base, cfg.dt_max);

    double t = 0.0;
    long accepted = 0;
    while (t < cfg.t_end * (1.0 - 1e-12)) {
        double dt = std::min(dt_base, cfg.t_end - t);
        // CFL guard against the freshly evaluated stage-1 velocity
        int halved = 0;
        while (s1.umax * std::abs(dt) > cfg.cfl_cap * h) {
            dt *= 0.5;
            if (++halved > cfg.max_halvings)
                throw std::runtime_error(
                    "CFL failure after " + std::to_string(cfg.max_halvings) +
                    " halvings: umax=" + std::to_string(s1.umax) + " dt=" + std::to_string(dt));
        }
        traj.halvings += halved;

        auto s2 = eval_stage(axpy(w_hat, 0.5 * dt, s1.k), t + 0.5 * dt, cfg.dealias, need_du);
        auto s3 = eval_stage(axpy(w_hat, 0.5 * dt, s2.k), t + 0.5 * dt, cfg.dealias, need_du);
        auto s4 = eval_stage(axpy(w_hat, dt, s3.k), t + dt, cfg.dealias, need_du);

#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(w_hat.c.size()); ++i)
            w_hat.c[i] += dt / 6.0 * (s1.k.c[i] + 2.0 * s2.k.c[i] + 2.0 * s3.k.c[i] + s4.k.c[i]);

        ScalarField next = fft::inverse(w_hat);
        if (cfg.symmetry_enforce) {
            next = symmetrize_odd_odd(next);
            w_hat = next.spectrum();
        }

        if (observer) {
            s1.f.time = t;
            observer(t, dt, {s1.f, s2.f, s3.f, s4.f});
        }

        // Gronwall integrand by trapezoid over the step
        const double du_t = du_sup_of(s1.f);
        t += dt;
        ++accepted;
        w = next;
        s1 = eval_stage(w_hat, t, cfg.dealias, need_du);
        traj.gronwall_integral += 0.5 * (du_t + du_sup_of(s1.f)) * dt;
        record(t, w, s1);

        const bool want_snap = cfg.snapshot_stride > 0 && accepted % cfg.snapshot_stride == 0;
        if (want_snap || t >= cfg.t_end * (1.0 - 1e-12)) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(w);
        }
    }
    return traj;
}

double kato_ponce_reference(const Trajectory& traj, double p) {
    double sup = 0.0;
    for (const auto& snap : traj.snapshots)
        sup = std::max(sup, spectral::sobolev_w1p_norm(snap, p));
    return sup;
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(fp, "t,l2,lp,linf,energy,sym_defect\n");
    for (const auto& d : traj.diag)
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.t, d.l2, d.lp, d.linf,
                     d.energy, d.sym_defect);
    std::fclose(fp);
}

} // namespace bel::euler
