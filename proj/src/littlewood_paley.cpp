#include "bel/littlewood_paley.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bel/fft.hpp"
#include "bel/kernels.hpp"
#include "bel/spectral.hpp"

namespace bel::lp {

using std::numbers::pi;

namespace {

// C^inf ramp: 0 at u<=0, 1 at u>=1
double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

} // namespace

double BumpProfile::operator()(double r) const {
    if (r <= 0.5) return 1.0;
    if (r >= outer_edge) return 0.0;
    return 1.0 - smoothstep((r - 0.5) / (outer_edge - 0.5));
}

double shell_value(int ell, const BumpProfile& psi, double xi_abs) {
    if (ell == -1) return psi(xi_abs);
    const double z = std::ldexp(xi_abs, -ell); // 2^{-ell} |xi|
    return psi(0.5 * z) - psi(z);
}

int max_resolved_shell(const GridSpec& g) {
    const double nyq = pi * (g.n / 2) / g.half_width; // angular Nyquist
    int ell = 0;
    while (std::ldexp(1.0, ell) < nyq) ++ell;
    return ell; // 2^{ell-1} < nyq <= 2^{ell}: last shell with resolved content
}

ShellMultiplier make_shell_multiplier(int ell, const BumpProfile& psi, const GridSpec& g) {
    if (ell < -1) throw std::invalid_argument("shell index must be >= -1");
    if (ell >= 0 && std::ldexp(1.0, ell - 1) >= pi * (g.n / 2) / g.half_width)
        throw std::runtime_error("unresolved shell");
    ShellMultiplier m{g, ell, std::vector<double>(std::size_t(g.n) * (g.n / 2 + 1))};
    const int n = g.n, cols = g.n / 2 + 1;
    const double dxi = pi / g.half_width;
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        const int m1 = r <= n / 2 ? r : r - n;
        double* row = m.w.data() + std::size_t(r) * cols;
        for (int m2 = 0; m2 < cols; ++m2) {
            const double xi = dxi * std::sqrt(double(m1) * m1 + double(m2) * m2);
            row[m2] = shell_value(ell, psi, xi);
        }
    }
    return m;
}

ScalarField project_block(const ScalarField& f, int ell, const BumpProfile& psi) {
    if (ell >= 0 && std::ldexp(1.0, ell - 1) >= pi * (f.grid().n / 2) / f.grid().half_width)
        throw std::runtime_error("unresolved shell");
    Spectrum s = f.spectrum();
    const double dxi = pi / f.grid().half_width;
    kernels::apply_multiplier(s, [&psi, ell, dxi](int m1, int m2) {
        const double xi = dxi * std::sqrt(double(m1) * m1 + double(m2) * m2);
        return complexd(shell_value(ell, psi, xi));
    });
    return fft::inverse(s);
}

DyadicDecomposition decompose(const ScalarField& f, const BumpProfile& psi) {
    DyadicDecomposition d{f, psi, max_resolved_shell(f.grid()), {}};
    d.blocks.reserve(std::size_t(d.ell_max + 2));
    for (int ell = -1; ell <= d.ell_max; ++ell) d.blocks.push_back(project_block(f, ell, psi));
    return d;
}

namespace {

// bound on the sup of the spectral content beyond radius xi_cut
double unresolved_mass(const Spectrum& s, double xi_cut) {
    const int n = s.grid.n, cols = s.cols();
    const double dk = pi / s.grid.half_width;           // angular mode spacing
    const double measure = 1.0 / (2.0 * s.grid.half_width); // cyclic Plancherel measure
    double acc = kernels::reduce_sum(std::size_t(n) * cols, [&](std::size_t i) {
        const int r = int(i) / cols, m2 = int(i) % cols;
        const int m1 = r <= n / 2 ? r : r - n;
        const double xi = dk * std::sqrt(double(m1) * m1 + double(m2) * m2);
        if (xi <= xi_cut) return 0.0;
        const double mult = m2 == 0 || m2 == n / 2 ? 1.0 : 2.0; // Hermitian half-plane
        return mult * std::abs(s.c[i]);
    });
    return acc * measure * measure;
}

} // namespace

BesovResult besov_norm(const ScalarField& f, const BesovParams& prm, const BumpProfile& psi) {
    if (!(prm.p >= 1.0) || !(prm.q >= 1.0))
        throw std::invalid_argument("besov_norm: requires p, q >= 1");
    BesovResult res;
    res.ell_max = max_resolved_shell(f.grid());
    for (int ell = -1; ell <= res.ell_max; ++ell) {
        const double blp = spectral::lp_norm(project_block(f, ell, psi), prm.p);
        res.block_lp.push_back(blp);
        res.weighted_term.push_back(std::pow(2.0, prm.s * ell) * blp);
    }
    if (prm.q == spectral::infinity) {
        for (double w : res.weighted_term) res.value = std::max(res.value, w);
    } else {
        double acc = 0.0;
        for (double w : res.weighted_term) acc += std::pow(w, prm.q);
        res.value = std::pow(acc, 1.0 / prm.q);
    }

    // truncation control: spectral mass above the last fully resolved sphere
    const double tail_sup = unresolved_mass(f.spectrum(), std::ldexp(1.0, res.ell_max));
    double tail = std::pow(2.0, prm.s * (res.ell_max + 1)) * tail_sup;
    if (prm.p != spectral::infinity) {
        const double area = 4.0 * f.grid().half_width * f.grid().half_width;
        tail *= std::pow(area, 1.0 / prm.p);
    }
    res.tail_estimate = tail;
    if (res.tail_estimate > 0.5 * res.value && res.tail_estimate > 0.0)
        throw std::runtime_error("unresolved dominant shell");
    return res;
}

double besov_b1_infty_1(const ScalarField& f, const BumpProfile& psi) {
    return besov_norm(f, {1.0, spectral::infinity, 1.0}, psi).value;
}

double holder_zygmund(const ScalarField& f, double s, const BumpProfile& psi) {
    return besov_norm(f, {s, spectral::infinity, spectral::infinity}, psi).value;
}

} // namespace bel::lp
