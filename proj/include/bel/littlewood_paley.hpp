#pragma once

// Dyadic frequency decomposition and Besov-scale norms. Shells live in
// angular frequency |xi| = pi |m| / L (the variable of e^{i<xi,x>}, in
// which the derivative symbol is i xi):
//
//   psi_{-1}(xi) = psi(|xi|),   psi_l(xi) = psi0(2^{-l} xi),
//   psi0(z) = psi(|z|/2) - psi(|z|)
//
// with psi a radial C^inf bump, == 1 for r <= 1/2 and == 0 for
// r >= outer_edge. psi_l is supported in {2^{l-1} <= |xi| <= 2^{l+1}}
// and equals 1 at |xi| = 2^l. The default outer_edge = 21/32 keeps a
// plateau psi0 == 1 over [21/32, 1], so a band concentrated there is
// captured by a single block.

#include <vector>

#include "bel/grid.hpp"

namespace bel::lp {

struct BumpProfile {
    double outer_edge = 21.0 / 32.0; // in (1/2, 1]
    double operator()(double r) const;
};

// pointwise psi_ell at radius |xi| (ell >= -1)
double shell_value(int ell, const BumpProfile& psi, double xi_abs);

// largest ell whose shell has any resolved content on this grid
int max_resolved_shell(const GridSpec& g);

struct ShellMultiplier {
    GridSpec grid;
    int ell = 0;
    std::vector<double> w; // r2c half-plane layout, values in [0, 1]
};

// throws "unresolved shell" when the whole shell lies beyond Nyquist
ShellMultiplier make_shell_multiplier(int ell, const BumpProfile& psi, const GridSpec& g);

ScalarField project_block(const ScalarField& f, int ell, const BumpProfile& psi = {});

struct DyadicDecomposition {
    ScalarField source;
    BumpProfile profile;
    int ell_max = -1;
    std::vector<ScalarField> blocks; // blocks[0] is ell = -1
    const ScalarField& block(int ell) const { return blocks.at(std::size_t(ell + 1)); }
};

DyadicDecomposition decompose(const ScalarField& f, const BumpProfile& psi = {});

struct BesovParams {
    double s = 0.0;
    double p = 2.0; // 1 <= p <= infinity
    double q = 2.0; // 1 <= q <= infinity
};

struct BesovResult {
    double value = 0.0;
    double tail_estimate = 0.0; // bound on the unresolved-shell contribution
    int ell_max = -1;
    std::vector<double> block_lp;      // ||Delta_l f||_p, l = -1..ell_max
    std::vector<double> weighted_term; // 2^{s l} ||Delta_l f||_p
};

// finite realization of the Besov sum over resolved shells; throws
// "unresolved dominant shell" when the tail bound rivals the value
BesovResult besov_norm(const ScalarField& f, const BesovParams& prm, const BumpProfile& psi = {});

double besov_b1_infty_1(const ScalarField& f, const BumpProfile& psi = {});
double holder_zygmund(const ScalarField& f, double s, const BumpProfile& psi = {});

} // namespace bel::lp
