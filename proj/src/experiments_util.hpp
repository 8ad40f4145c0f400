#pragma once

// Internal helpers shared by the experiment translation units.

#include <cmath>
#include <numbers>

#include "bel/experiments.hpp"
#include "bel/fft.hpp"
#include "bel/initial_data.hpp"
#include "bel/kernels.hpp"
#include "bel/littlewood_paley.hpp"
#include "bel/spectral.hpp"

namespace bel::experiments::detail {

inline const data::RhoSpec& rho() { return data::RhoSpec::standard(); }

inline double sup_vec(const VectorField& u) {
    return kernels::reduce_max(u.grid().size(), [&](std::size_t i) {
        return std::hypot(u.u1.values()[i], u.u2.values()[i]);
    });
}

struct VelocityNorms {
    double sup_u = 0.0, sup_du = 0.0, b1 = 0.0;
};

// sup and gradient-sup of grad^perp lap^-1 w, optionally its B^1_{inf,1}
// (vector fields take the max over components)
inline VelocityNorms velocity_norms(const ScalarField& w, bool with_besov) {
    namespace sp = bel::spectral;
    VelocityNorms out;
    VectorField u = euler::biot_savart(w);
    out.sup_u = sup_vec(u);
    ScalarField d11 = sp::derivative(u.u1, 1);
    ScalarField d21 = sp::derivative(u.u1, 2);
    ScalarField d12 = sp::derivative(u.u2, 1);
    out.sup_du = kernels::reduce_max(w.grid().size(), [&](std::size_t i) {
        double m = std::abs(d11.values()[i]);
        m = std::max(m, std::abs(d21.values()[i]));
        m = std::max(m, std::abs(d12.values()[i]));
        return m;
    });
    if (with_besov)
        out.b1 = std::max(lp::besov_b1_infty_1(u.u1), lp::besov_b1_infty_1(u.u2));
    return out;
}

// relative l2 mismatch between the discrete transform of a beta field and
// the closed-form spectrum (criterion 4 oracle)
inline double spectrum_oracle_mismatch(const data::PerturbationParams& b, const ScalarField& field) {
    const Spectrum& s = field.spectrum();
    const GridSpec& g = field.grid();
    const int n = g.n, cols = s.cols();
    std::vector<double> num_part(n, 0.0), den_part(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        double nacc = 0.0, dacc = 0.0;
        for (int m2 = 0; m2 < cols; ++m2) {
            const int m1 = s.signed_m1(r);
            const complexd want =
                data::beta_spectrum_analytic(b, rho(), g.mode_freq(m1), g.mode_freq(m2));
            const complexd got = s.c[s.idx(r, m2)];
            const double wmult = (m2 == 0 || m2 == n / 2) ? 1.0 : 2.0;
            nacc += wmult * std::norm(got - want);
            dacc += wmult * std::norm(want);
        }
        num_part[r] = nacc;
        den_part[r] = dacc;
    }
    double num = 0.0, den = 0.0;
    for (int r = 0; r < n; ++r) {
        num += num_part[r];
        den += den_part[r];
    }
    return std::sqrt(num / den);
}

inline flow::Vec2 canonical_quadrant(const flow::Vec2& x) {
    return {std::abs(x[0]), std::abs(x[1])};
}

struct D22Scan {
    double max = 0.0;
    flow::Vec2 seed{};
    double delta = 0.0;
};

// argmax of |d eta2/d x2| over unflagged markers, plus the radius around it
// where the entry stays above half the max
inline D22Scan scan_d22(const flow::FlowState& fs) {
    D22Scan out;
    for (const auto& m : fs.markers)
        if (!m.flagged && std::abs(m.defgrad[3]) > out.max) {
            out.max = std::abs(m.defgrad[3]);
            out.seed = m.seed;
        }
    double delta = 1e300;
    for (const auto& m : fs.markers) {
        if (m.flagged || std::abs(m.defgrad[3]) >= 0.5 * out.max) continue;
        delta = std::min(delta, std::hypot(m.seed[0] - out.seed[0], m.seed[1] - out.seed[1]));
    }
    out.delta = delta == 1e300 ? 0.0 : delta;
    return out;
}

// co-integrator that also snapshots the marker state after every step
struct StepRecorder {
    flow::CoIntegrator co;
    std::vector<flow::FlowState> steps;
    explicit StepRecorder(flow::FlowState init, double L, double interior = 0.9)
        : co(std::move(init), L, interior) {
        steps.push_back(co.state());
    }
    euler::StageObserver observer() {
        auto inner = co.observer();
        return [this, inner](double t, double dt, const std::array<euler::StageField, 4>& st) {
            inner(t, dt, st);
            steps.push_back(co.state());
        };
    }
};

} // namespace bel::experiments::detail
