#include "bel/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bel/fft.hpp"
#include "bel/kernels.hpp"

namespace bel::spectral {

using std::numbers::pi;

namespace {

// derivative multipliers vanish on the Nyquist row/column: the signed
// mode there is ambiguous and all project fields are dealiased below it
ScalarField derivative_impl(const ScalarField& f, int axis) {
    Spectrum s = f.spectrum();
    const int half = s.grid.n / 2;
    const double scale = pi / s.grid.half_width;
    if (axis == 1) {
        kernels::apply_multiplier(s, [half, scale](int m1, int) {
            if (m1 == half || m1 == -half) return complexd(0.0);
            return complexd(0.0, scale * m1);
        });
    } else {
        kernels::apply_multiplier(s, [half, scale](int, int m2) {
            if (m2 == half) return complexd(0.0);
            return complexd(0.0, scale * m2);
        });
    }
    return fft::inverse(s);
}

} // namespace

ScalarField derivative(const ScalarField& f, int axis) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("derivative: axis must be 1 or 2");
    return derivative_impl(f, axis);
}

ScalarField inv_laplacian(const ScalarField& f) {
    Spectrum s = f.spectrum();
    const double scale = pi / s.grid.half_width;
    kernels::apply_multiplier(s, [scale](int m1, int m2) {
        if (m1 == 0 && m2 == 0) return complexd(0.0);
        const double k2 = scale * scale * (double(m1) * m1 + double(m2) * m2);
        return complexd(-1.0 / k2);
    });
    return fft::inverse(s);
}

ScalarField laplacian(const ScalarField& f) {
    Spectrum s = f.spectrum();
    const double scale = pi / s.grid.half_width;
    kernels::apply_multiplier(s, [scale](int m1, int m2) {
        return complexd(-scale * scale * (double(m1) * m1 + double(m2) * m2));
    });
    return fft::inverse(s);
}

VectorField perp_gradient(const ScalarField& f) {
    ScalarField d2 = derivative(f, 2);
    std::vector<double> neg(d2.values());
    kernels::map_inplace(neg.data(), neg.size(), [](double v) { return -v; });
    return {ScalarField(f.grid(), std::move(neg)), derivative(f, 1)};
}

ScalarField divergence(const VectorField& u) {
    ScalarField a = derivative(u.u1, 1), b = derivative(u.u2, 2);
    std::vector<double> v(a.grid().size());
    kernels::linear_combine({a.data(), b.data()}, {1.0, 1.0}, v.data(), v.size());
    return {a.grid(), std::move(v)};
}

ScalarField rot(const VectorField& u) {
    ScalarField a = derivative(u.u1, 2), b = derivative(u.u2, 1);
    std::vector<double> v(a.grid().size());
    kernels::linear_combine({b.data(), a.data()}, {1.0, -1.0}, v.data(), v.size());
    return {a.grid(), std::move(v)};
}

double mean(const ScalarField& f) {
    const double area = 4.0 * f.grid().half_width * f.grid().half_width;
    const double h2 = f.grid().spacing() * f.grid().spacing();
    return kernels::reduce_sum(f.grid().size(),
                               [d = f.data()](std::size_t i) { return d[i]; }) *
           h2 / area;
}

double lp_norm(const ScalarField& f, double p) {
    if (p == infinity) return kernels::abs_max(f.data(), f.grid().size());
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: requires p >= 1");
    const double h2 = f.grid().spacing() * f.grid().spacing();
    return std::pow(kernels::pow_sum(f.data(), f.grid().size(), p) * h2, 1.0 / p);
}

double sobolev_w1p_norm(const ScalarField& f, double p) {
    if (!(p >= 1.0) || p == infinity)
        throw std::invalid_argument("sobolev_w1p_norm: requires 1 <= p < infinity");
    return lp_norm(f, p) + lp_norm(derivative(f, 1), p) + lp_norm(derivative(f, 2), p);
}

Spectrum dealias(Spectrum s) {
    const int cut = s.grid.n / 3;
    kernels::apply_multiplier(s, [cut](int m1, int m2) {
        return (std::abs(m1) > cut || std::abs(m2) > cut) ? complexd(0.0) : complexd(1.0);
    });
    return s;
}

ScalarField dealias(const ScalarField& f) { return fft::inverse(dealias(f.spectrum())); }

} // namespace bel::spectral
