#pragma once

// Shared test helpers: deterministic random fields and an O(n^4) direct
// DFT used as the independent oracle for the FFT path.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bel/fft.hpp"
#include "bel/grid.hpp"
#include "bel/kernels.hpp"
#include "bel/spectral.hpp"

namespace belt {

inline bel::ScalarField random_field(const bel::GridSpec& g, unsigned seed, double amp = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    std::vector<double> v(g.size());
    for (auto& x : v) x = u(rng);
    return {g, std::move(v)};
}

// random field whose spectrum is confined to max(|m1|,|m2|) <= cut
inline bel::ScalarField random_band_limited(const bel::GridSpec& g, unsigned seed, int cut,
                                            double amp = 1.0) {
    bel::Spectrum s = random_field(g, seed, amp).spectrum();
    const int n = g.n, cols = s.cols();
    for (int r = 0; r < n; ++r) {
        const int m1 = r <= n / 2 ? r : r - n;
        for (int m2 = 0; m2 < cols; ++m2)
            if (std::abs(m1) > cut || m2 > cut) s.c[s.idx(r, m2)] = 0.0;
    }
    return bel::fft::inverse(s);
}

// continuum-normalized direct transform at signed mode (m1, m2)
inline bel::complexd naive_mode(const bel::ScalarField& f, int m1, int m2) {
    const auto& g = f.grid();
    const double h2 = g.spacing() * g.spacing();
    const double w = std::numbers::pi / g.half_width; // 2 pi xi_m . x = w (m . x)
    bel::complexd acc = 0.0;
    for (int j1 = 0; j1 < g.n; ++j1)
        for (int j2 = 0; j2 < g.n; ++j2) {
            const double phase = -w * (m1 * g.x1(j1) + m2 * g.x2(j2));
            acc += f.at(j1, j2) * bel::complexd(std::cos(phase), std::sin(phase));
        }
    return acc * h2;
}

// exact evaluation of a spectrum at an arbitrary point (direct mode sum)
inline double eval_spectral_at(const bel::Spectrum& s, double x1, double x2) {
    const auto& g = s.grid;
    const double w = std::numbers::pi / g.half_width;
    const int n = g.n, cols = s.cols();
    double acc = 0.0;
    for (int r = 0; r < n; ++r) {
        const int m1 = s.signed_m1(r);
        for (int m2 = 0; m2 < cols; ++m2) {
            const double mult = (m2 == 0 || m2 == n / 2) ? 1.0 : 2.0;
            const double phase = w * (m1 * x1 + m2 * x2);
            const bel::complexd c = s.c[s.idx(r, m2)];
            acc += mult * (c.real() * std::cos(phase) - c.imag() * std::sin(phase));
        }
    }
    const double box = 2.0 * g.half_width;
    return acc / (box * box);
}

inline double rel_l2_error(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace belt
