#pragma once

// Spectral differential operators and L^p / W^{1,p} quadrature on the
// periodic box. All operators act through the continuum-normalized
// spectrum (see fft.hpp): d/dx_j <-> 2 pi i xi_j = i pi m_j / L,
// Laplacian <-> -|pi m / L|^2.

#include <limits>

#include "bel/grid.hpp"

namespace bel::spectral {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

ScalarField derivative(const ScalarField& f, int axis); // axis 1 or 2
// zero mode of the result set to 0 (gauge: velocity defined up to constants)
ScalarField inv_laplacian(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
VectorField perp_gradient(const ScalarField& f); // (-d2 f, d1 f)
ScalarField divergence(const VectorField& u);
ScalarField rot(const VectorField& u); // -d2 u1 + d1 u2

double mean(const ScalarField& f);

// rectangle-rule quadrature, spectrally accurate for smooth periodic
// integrands; p = infinity gives the grid max
double lp_norm(const ScalarField& f, double p);
// ||f||_p + ||d1 f||_p + ||d2 f||_p (fixed norm-equivalent convention)
double sobolev_w1p_norm(const ScalarField& f, double p);

// 2/3-rule truncation: zeroes modes with max(|m1|,|m2|) > n/3; idempotent
Spectrum dealias(Spectrum s);
ScalarField dealias(const ScalarField& f);

} // namespace bel::spectral
