#pragma once

// Forward/inverse discrete transforms between grid samples and the
// continuum-normalized spectrum. Convention (fixed project-wide):
//
//   f_hat(xi) = integral f(x) e^{-2 pi i <xi, x>} dx,   xi_m = m / (2L)
//
// realized as f_hat_m = h^2 (-1)^{m1+m2} DFT_m (the sign flip moves the
// origin to the box center). FFTW with FFTW_ESTIMATE plans; results are
// deterministic for a fixed thread count.

#include "bel/grid.hpp"

namespace bel::fft {

void set_threads(int nthreads);

Spectrum forward(const ScalarField& f);
Spectrum forward(const GridSpec& g, const std::vector<double>& values);
std::vector<double> inverse_values(const Spectrum& s);
ScalarField inverse(const Spectrum& s); // field carrying s as its cache

// fast path: executes the c2r transform of a caller-prepared buffer in
// which the (-1)^{m1+m2} phase and the 1/(2L)^2 normalization are already
// folded (see inverse_fold_factor); the buffer is consumed
std::vector<double> inverse_prepared(std::vector<complexd> buf, const GridSpec& g);
inline double inverse_fold_factor(const GridSpec& g, int m1w, int m2) {
    const double box = 2.0 * g.half_width;
    return ((m1w + m2) & 1 ? -1.0 : 1.0) / (box * box);
}

} // namespace bel::fft
