#include "bel/lagrangian.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bel/kernels.hpp"
#include "bel/spectral.hpp"

namespace bel::flow {

// ---- seeding ---------------------------------------------------------------

FlowState FlowState::seed(const SeedSpec& spec) {
    FlowState s;
    const int n = spec.per_axis;
    const double step = 2.0 * spec.half_extent / std::max(1, n - 1);
    s.lattice_origin = {spec.center[0] - spec.half_extent, spec.center[1] - spec.half_extent};
    s.lattice_spacing = step;
    s.lattice_n = n;
    s.markers.reserve(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Marker m;
            m.seed = {s.lattice_origin[0] + i * step, s.lattice_origin[1] + j * step};
            m.pos = m.seed;
            s.markers.push_back(m);
        }
    for (const auto& c : spec.clusters) {
        const int cn = c.per_axis;
        const double cs = 2.0 * c.half_extent / std::max(1, cn - 1);
        for (int i = 0; i < cn; ++i)
            for (int j = 0; j < cn; ++j) {
                Marker m;
                m.seed = {c.center[0] - c.half_extent + i * cs,
                          c.center[1] - c.half_extent + j * cs};
                m.pos = m.seed;
                s.markers.push_back(m);
            }
    }
    return s;
}

// ---- bicubic sampling --------------------------------------------------

namespace {

inline void lagrange_weights(double t, double w[4]) {
    // nodes at offsets -1, 0, 1, 2; exact for cubics
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t * t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -t * (t + 1.0) * (t - 2.0) / 2.0;
    w[3] = t * (t * t - 1.0) / 6.0;
}

template <class Field>
double bicubic_impl(const Field& f, double x1, double x2) {
    const GridSpec& g = f.grid();
    const int n = g.n;
    const double h = g.spacing();
    const double u = (x1 + g.half_width) / h;
    const double v = (x2 + g.half_width) / h;
    const double fu = std::floor(u), fv = std::floor(v);
    const int i0 = int(fu), j0 = int(fv);
    double wu[4], wv[4];
    lagrange_weights(u - fu, wu);
    lagrange_weights(v - fv, wv);
    const double* vals = f.data();
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int ia = ((i0 + a - 1) % n + n) % n;
        const double* row = vals + std::size_t(ia) * n;
        double rowacc = 0.0;
        for (int b = 0; b < 4; ++b) {
            const int jb = ((j0 + b - 1) % n + n) % n;
            rowacc += wv[b] * row[jb];
        }
        acc += wu[a] * rowacc;
    }
    return acc;
}

} // namespace

double sample_bicubic(const ScalarField& f, double x1, double x2) {
    return bicubic_impl(f, x1, x2);
}
double sample_bicubic_serial(const ScalarField& f, double x1, double x2) {
    return bicubic_impl(f, x1, x2);
}

// ---- samplers ----------------------------------------------------------

struct TrajectorySampler::Level {
    VectorField u;
    ScalarField du11, du21, du12;
};

TrajectorySampler::TrajectorySampler(const euler::Trajectory& traj)
    : TrajectorySampler(traj.snapshot_times, traj.snapshots) {}

TrajectorySampler::TrajectorySampler(std::vector<double> times, std::vector<ScalarField> vorticity)
    : times_(std::move(times)), w_(std::move(vorticity)) {
    if (times_.size() != w_.size() || times_.empty())
        throw std::invalid_argument("TrajectorySampler: times and snapshots must match");
    cache_.resize(times_.size());
}

namespace {
// bracketing index and linear weight for time t
std::pair<std::size_t, double> bracket(const std::vector<double>& times, double t) {
    if (t <= times.front()) return {0, 0.0};
    if (t >= times.back()) return {times.size() - 2, 1.0};
    std::size_t lo = 0, hi = times.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (times[mid] <= t ? lo : hi) = mid;
    }
    return {lo, (t - times[lo]) / (times[lo + 1] - times[lo])};
}
} // namespace

const TrajectorySampler::Level& TrajectorySampler::level(std::size_t i) const {
    if (!cache_[i]) {
        auto lv = std::make_shared<Level>();
        lv->u = euler::biot_savart(w_[i]);
        lv->du11 = spectral::derivative(lv->u.u1, 1);
        lv->du21 = spectral::derivative(lv->u.u1, 2);
        lv->du12 = spectral::derivative(lv->u.u2, 1);
        cache_[i] = std::move(lv);
    }
    return *cache_[i];
}

void TrajectorySampler::prepare(double t0, double t1) const {
    if (times_.size() == 1) {
        level(0);
        return;
    }
    const std::size_t lo = bracket(times_, std::min(t0, t1)).first;
    const std::size_t hi = bracket(times_, std::max(t0, t1)).first + 1;
    for (std::size_t i = lo; i <= hi && i < times_.size(); ++i) level(i);
    // bound the working set: drop levels far outside the active window
    for (std::size_t i = 0; i < cache_.size(); ++i)
        if (i + 4 < lo || i > hi + 4) cache_[i].reset();
}

Vec2 TrajectorySampler::velocity(double t, const Vec2& x) const {
    if (times_.size() == 1) {
        const Level& lv = level(0);
        return {sample_bicubic(lv.u.u1, x[0], x[1]), sample_bicubic(lv.u.u2, x[0], x[1])};
    }
    auto [i, a] = bracket(times_, t);
    const Level& l0 = level(i);
    const Level& l1 = level(i + 1);
    return {(1 - a) * sample_bicubic(l0.u.u1, x[0], x[1]) + a * sample_bicubic(l1.u.u1, x[0], x[1]),
            (1 - a) * sample_bicubic(l0.u.u2, x[0], x[1]) + a * sample_bicubic(l1.u.u2, x[0], x[1])};
}

Mat2 TrajectorySampler::velocity_grad(double t, const Vec2& x) const {
    auto grad_at = [&x](const Level& lv) -> Mat2 {
        const double d11 = sample_bicubic(lv.du11, x[0], x[1]);
        const double d21 = sample_bicubic(lv.du21, x[0], x[1]);
        const double d12 = sample_bicubic(lv.du12, x[0], x[1]);
        return {d11, d21, d12, -d11}; // [du1/dx1, du1/dx2; du2/dx1, du2/dx2]
    };
    if (times_.size() == 1) return grad_at(level(0));
    auto [i, a] = bracket(times_, t);
    Mat2 g0 = grad_at(level(i)), g1 = grad_at(level(i + 1));
    return {(1 - a) * g0[0] + a * g1[0], (1 - a) * g0[1] + a * g1[1],
            (1 - a) * g0[2] + a * g1[2], (1 - a) * g0[3] + a * g1[3]};
}

// ---- RK4 advance ---------------------------------------------------------

namespace {

struct Deriv {
    Vec2 k;
    Mat2 K;
};

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Deriv eval(const VelocitySampler& u, double t, const Vec2& x, const Mat2& D) {
    Deriv d;
    d.k = u.velocity(t, x);
    d.K = matmul(u.velocity_grad(t, x), D);
    return d;
}

void rk4_marker(Marker& m, const VelocitySampler& u, double t, double dt) {
    const Vec2 x0 = m.pos;
    const Mat2 D0 = m.defgrad;
    const Deriv d1 = eval(u, t, x0, D0);
    const Vec2 x2{x0[0] + 0.5 * dt * d1.k[0], x0[1] + 0.5 * dt * d1.k[1]};
    Mat2 D2;
    for (int i = 0; i < 4; ++i) D2[i] = D0[i] + 0.5 * dt * d1.K[i];
    const Deriv d2 = eval(u, t + 0.5 * dt, x2, D2);
    const Vec2 x3{x0[0] + 0.5 * dt * d2.k[0], x0[1] + 0.5 * dt * d2.k[1]};
    Mat2 D3;
    for (int i = 0; i < 4; ++i) D3[i] = D0[i] + 0.5 * dt * d2.K[i];
    const Deriv d3 = eval(u, t + 0.5 * dt, x3, D3);
    const Vec2 x4{x0[0] + dt * d3.k[0], x0[1] + dt * d3.k[1]};
    Mat2 D4;
    for (int i = 0; i < 4; ++i) D4[i] = D0[i] + dt * d3.K[i];
    const Deriv d4 = eval(u, t + dt, x4, D4);
    m.pos = {x0[0] + dt / 6.0 * (d1.k[0] + 2 * d2.k[0] + 2 * d3.k[0] + d4.k[0]),
             x0[1] + dt / 6.0 * (d1.k[1] + 2 * d2.k[1] + 2 * d3.k[1] + d4.k[1])};
    for (int i = 0; i < 4; ++i)
        m.defgrad[i] = D0[i] + dt / 6.0 * (d1.K[i] + 2 * d2.K[i] + 2 * d3.K[i] + d4.K[i]);
}

void flag_outside(Marker& m, double L, double frac) {
    if (L > 0.0 && (std::abs(m.pos[0]) > frac * L || std::abs(m.pos[1]) > frac * L))
        m.flagged = true;
}

} // namespace

FlowState advance_flow(const FlowState& s, const VelocitySampler& u, double t_target, double dt,
                       double box_half_width, double interior_frac) {
    if (dt <= 0.0) throw std::invalid_argument("advance_flow: dt must be positive");
    FlowState out = s;
    const double dir = t_target >= s.time ? 1.0 : -1.0;
    double t = s.time;
    while (dir * (t_target - t) > 1e-14) {
        const double step = dir * std::min(dt, dir * (t_target - t));
        u.prepare(t, t + step);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(out.markers.size()); ++i) {
            rk4_marker(out.markers[i], u, t, step);
            flag_outside(out.markers[i], box_half_width, interior_frac);
        }
        t += step;
    }
    out.time = t_target;
    return out;
}

// ---- co-integration with the Euler solver -----------------------------------

CoIntegrator::CoIntegrator(FlowState initial, double box_half_width, double interior_frac)
    : state_(std::move(initial)), L_(box_half_width), interior_(interior_frac) {
    sup_series_.push_back(sup_deformation(state_).value);
    times_.push_back(state_.time);
}

euler::StageObserver CoIntegrator::observer() {
    return [this](double t, double dt, const std::array<euler::StageField, 4>& st) {
        auto vel = [&st](int stage, const Vec2& x) -> Vec2 {
            return {sample_bicubic(st[stage].u.u1, x[0], x[1]),
                    sample_bicubic(st[stage].u.u2, x[0], x[1])};
        };
        auto grad = [&st](int stage, const Vec2& x) -> Mat2 {
            const double d11 = sample_bicubic(st[stage].du11, x[0], x[1]);
            const double d21 = sample_bicubic(st[stage].du21, x[0], x[1]);
            const double d12 = sample_bicubic(st[stage].du12, x[0], x[1]);
            return {d11, d21, d12, -d11};
        };
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(state_.markers.size()); ++i) {
            Marker& m = state_.markers[i];
            const Vec2 x0 = m.pos;
            const Mat2 D0 = m.defgrad;
            Vec2 k1 = vel(0, x0);
            Mat2 K1 = matmul(grad(0, x0), D0);
            Vec2 xa{x0[0] + 0.5 * dt * k1[0], x0[1] + 0.5 * dt * k1[1]};
            Mat2 Da;
            for (int c = 0; c < 4; ++c) Da[c] = D0[c] + 0.5 * dt * K1[c];
            Vec2 k2 = vel(1, xa);
            Mat2 K2 = matmul(grad(1, xa), Da);
            Vec2 xb{x0[0] + 0.5 * dt * k2[0], x0[1] + 0.5 * dt * k2[1]};
            Mat2 Db;
            for (int c = 0; c < 4; ++c) Db[c] = D0[c] + 0.5 * dt * K2[c];
            Vec2 k3 = vel(2, xb);
            Mat2 K3 = matmul(grad(2, xb), Db);
            Vec2 xc{x0[0] + dt * k3[0], x0[1] + dt * k3[1]};
            Mat2 Dc;
            for (int c = 0; c < 4; ++c) Dc[c] = D0[c] + dt * K3[c];
            Vec2 k4 = vel(3, xc);
            Mat2 K4 = matmul(grad(3, xc), Dc);
            m.pos = {x0[0] + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                     x0[1] + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
            for (int c = 0; c < 4; ++c)
                m.defgrad[c] = D0[c] + dt / 6.0 * (K1[c] + 2 * K2[c] + 2 * K3[c] + K4[c]);
            flag_outside(m, L_, interior_);
        }
        state_.time = t + dt;
        sup_series_.push_back(sup_deformation(state_).value);
        times_.push_back(state_.time);
    };
}

// ---- diagnostics ------------------------------------------------------------

DeformationReport sup_deformation(const FlowState& s) {
    if (s.markers.empty()) throw std::invalid_argument("sup_deformation: empty marker set");
    DeformationReport r;
    r.value = 0.0;
    for (const auto& m : s.markers) {
        if (m.flagged) continue;
        for (int c = 0; c < 4; ++c) {
            const double a = std::abs(m.defgrad[c]);
            if (a > r.value) {
                r.value = a;
                r.seed = m.seed;
                r.pos = m.pos;
                r.entry = c;
            }
        }
    }
    return r;
}

double max_det_defect(const FlowState& s) {
    double worst = 0.0;
    for (const auto& m : s.markers)
        if (!m.flagged) worst = std::max(worst, std::abs(det(m.defgrad) - 1.0));
    return worst;
}

std::vector<Vec2> pullback_gradient(const FlowState& s,
                                    const std::function<Vec2(const Vec2&)>& grad_f) {
    std::vector<Vec2> out(s.markers.size());
    for (std::size_t i = 0; i < s.markers.size(); ++i) {
        const Marker& m = s.markers[i];
        const double dj = det(m.defgrad);
        if (dj < 0.25 || dj > 4.0)
            throw std::runtime_error("deformation too strong for pullback");
        const Vec2 g = grad_f(m.seed);
        // grad(f o eta^{-1}) at eta(x): (-grad f . perp(eta_2), grad f . perp(eta_1))
        // with perp(eta_i) = (-d2 eta_i, d1 eta_i)
        const double d11 = m.defgrad[0], d12 = m.defgrad[1];
        const double d21 = m.defgrad[2], d22 = m.defgrad[3];
        out[i] = {-(g[0] * -d22 + g[1] * d21), g[0] * -d12 + g[1] * d11};
    }
    return out;
}

FlowComparison compare_flows(const FlowState& a, const FlowState& b, double v_bound_sup,
                             double v_grad_bound_sup) {
    if (a.markers.size() != b.markers.size())
        throw std::invalid_argument("compare_flows: mismatched seeds");
    FlowComparison r;
    for (std::size_t i = 0; i < a.markers.size(); ++i) {
        const Marker& ma = a.markers[i];
        const Marker& mb = b.markers[i];
        if (ma.flagged || mb.flagged) continue;
        if (ma.seed != mb.seed) throw std::invalid_argument("compare_flows: mismatched seeds");
        const double dp = std::hypot(ma.pos[0] - mb.pos[0], ma.pos[1] - mb.pos[1]);
        Mat2 dd;
        for (int c = 0; c < 4; ++c) dd[c] = ma.defgrad[c] - mb.defgrad[c];
        const double dg = max_abs_entry(dd);
        r.pos_part = std::max(r.pos_part, dp);
        r.grad_part = std::max(r.grad_part, dg);
        r.theta = std::max(r.theta, dp + dg);
    }
    const double denom = v_bound_sup + v_grad_bound_sup;
    r.ratio = denom > 0.0 ? r.theta / denom : 0.0;
    return r;
}

namespace {
// cubic interpolation over the main seed lattice of per-marker quantities
double lattice_interp(const FlowState& s, const Vec2& x, const std::function<double(const Marker&)>& get) {
    if (s.lattice_n < 4) throw std::invalid_argument("lattice interpolation needs a seeded lattice");
    const double u = (x[0] - s.lattice_origin[0]) / s.lattice_spacing;
    const double v = (x[1] - s.lattice_origin[1]) / s.lattice_spacing;
    const int i0 = int(std::floor(u)), j0 = int(std::floor(v));
    if (i0 < 1 || j0 < 1 || i0 + 2 >= s.lattice_n || j0 + 2 >= s.lattice_n)
        throw std::out_of_range("lattice interpolation outside the seeded region");
    double wu[4], wv[4];
    lagrange_weights(u - std::floor(u), wu);
    lagrange_weights(v - std::floor(v), wv);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Marker& m = s.markers[std::size_t(i0 + a - 1) * s.lattice_n + (j0 + b - 1)];
            acc += wu[a] * wv[b] * get(m);
        }
    return acc;
}
} // namespace

Mat2 interpolate_defgrad(const FlowState& s, const Vec2& x) {
    Mat2 out;
    for (int c = 0; c < 4; ++c)
        out[c] = lattice_interp(s, x, [c](const Marker& m) { return m.defgrad[c]; });
    return out;
}

Vec2 interpolate_position(const FlowState& s, const Vec2& x) {
    return {lattice_interp(s, x, [](const Marker& m) { return m.pos[0]; }),
            lattice_interp(s, x, [](const Marker& m) { return m.pos[1]; })};
}

void write_markers_csv(const std::string& path, const FlowState& s) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(fp, "seed_x,seed_y,pos_x,pos_y,d11,d12,d21,d22,det\n");
    for (const auto& m : s.markers)
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.seed[0],
                     m.seed[1], m.pos[0], m.pos[1], m.defgrad[0], m.defgrad[1], m.defgrad[2],
                     m.defgrad[3], det(m.defgrad));
    std::fclose(fp);
}

} // namespace bel::flow
