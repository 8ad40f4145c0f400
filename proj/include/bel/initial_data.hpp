#pragma once

// Explicit constructions: the radial bump phi, quadrupole phi0, dyadic
// copies phi_k, the vorticity omega0^{M,N}, the Fourier-side envelope
// rho, the oscillatory perturbation beta_{k,lambda}, and the perturbed
// sequence omega0 + beta_n. Everything is available both as an analytic
// pointwise evaluator (used by the bump-local quadratures) and as a grid
// field.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "bel/grid.hpp"

namespace bel::data {

// ---- quadrupole side -----------------------------------------------------

// radial C^inf bump, 1 at the origin, supported in |x| <= 1/4 so that the
// dyadic copies land in the disjoint balls B((e1 2^-k, e2 2^-k), 2^-(k+2))
double bump(double r); // profile of |x|, support [0, 1/4)
double bump_radial_derivative(double r);

double phi(double x1, double x2);
std::array<double, 2> phi_grad(double x1, double x2);

// sum_{e1,e2 = +-1} e1 e2 phi(x1 - e1, x2 - e2)
double phi0(double x1, double x2);
std::array<double, 2> phi0_grad(double x1, double x2);

// phi_k = 2^{(-1 + 2/p) k} phi0(2^k x)
double phi_k(double x1, double x2, int k, double p);
std::array<double, 2> phi_k_grad(double x1, double x2, int k, double p);

struct QuadrupoleParams {
    double M = 4.0;   // amplitude target, >= 2
    int    N = 2;     // dyadic copies: k runs over N0 .. N0 + N
    int    N0 = 2;    // starting scale, >= 1
    double p = 2.5;   // Lebesgue exponent in (2, 3]

    void validate() const;
    double amplitude() const; // M^-2 N^-1/p
    int k_min() const { return N0; }
    int k_max() const { return N0 + N; }
    double support_radius() const; // max |x|_inf over the support
    double finest_bump_radius() const { return std::ldexp(1.0, -(N0 + N + 2)); }
};

double omega0_eval(const QuadrupoleParams& q, double x1, double x2);
std::array<double, 2> omega0_grad(const QuadrupoleParams& q, double x1, double x2);

// throws "unresolved finest scale" when the finest bump radius has fewer
// than 8 grid cells
ScalarField omega0(const QuadrupoleParams& q, const GridSpec& g);

// ---- Fourier-side envelope ----------------------------------------------

// chi_hat = normalized radial bump in frequency (support B(0,1), integral 1);
// rho_hat(xi) = chi_hat(xi - xi0) + chi_hat(xi + xi0), xi0 = (2, 0), so that
// rho(x) = 2 cos(4 pi x1) chi(x) with chi the radial inverse transform of
// chi_hat, tabulated once via a padded 1D transform of its marginal.
class RhoSpec {
public:
    static const RhoSpec& standard();

    double chi_hat(double xi1, double xi2) const;
    double rho_hat(double xi1, double xi2) const;
    double chi(double r) const;       // radial profile, chi(0) = 1
    double chi_prime(double r) const; // d chi / dr
    double rho(double y1, double y2) const;
    std::array<double, 2> rho_grad(double y1, double y2) const;

    double chi_hat_peak() const { return peak_; }     // max of chi_hat, <= 1
    double eps_plateau() const { return eps_; }       // largest eps with |rho| >= 1 on B(0, eps)
    double tail_radius(double tol) const;             // r beyond which |chi| < tol
    double l1_rho_hat() const { return 2.0; }         // integral of |rho_hat| = 2 integral chi_hat
    double lp_norm_rho_hat(double p) const;           // ( integral |rho_hat|^p )^{1/p}
    double lp_norm_rho(double p, int quad_pts = 2048) const;
    double lp_norm_d1_rho(double p, int quad_pts = 2048) const;
    double lp_norm_d2_rho(double p, int quad_pts = 2048) const;

private:
    RhoSpec();
    std::vector<double> chi_tab_, chi_prime_tab_;
    double dr_ = 0.0, r_max_ = 0.0, peak_ = 0.0, eps_ = 0.0, norm_ = 1.0;
};

// ---- oscillatory perturbation ---------------------------------------------

struct PerturbationParams {
    int    n = 9;          // lambda = 3n, k = lambda^2 (eq. coupling, exact)
    double lambda = 27.0;
    double k = 729.0;
    std::array<double, 2> x_star{0.15, 0.11};
    double p = 2.5;

    PerturbationParams(int n_, std::array<double, 2> xs, double p_);
    double prefactor() const; // lambda^{-1+2/p} / sqrt(k)
    // beta_hat support: |xi1 -+ k/2pi| <= 3 lambda, |xi2| <= lambda
    double support_xi1_min() const;
    double support_xi1_max() const;
    bool separated_physical() const { return support_xi1_min() > 1.0; }
    bool separated_rescaled() const; // paper's supp rho_hat(. +- k/(2 pi lambda)) vs B(0,1)
};

// analytic pointwise evaluation (chi table underneath)
double beta_eval(const PerturbationParams& b, const RhoSpec& rho, double x1, double x2);
std::array<double, 2> beta_grad(const PerturbationParams& b, const RhoSpec& rho, double x1,
                                double x2);
// envelope alone: sum_e e1 e2 rho(lambda(x - x*_e)); odd in x1 and in x2
double beta_envelope(const PerturbationParams& b, const RhoSpec& rho, double x1, double x2);

// grid field; throws "unresolved oscillation" when the spectral support
// exceeds Nyquist and rejects a carrier that is not box-periodic
ScalarField beta(const PerturbationParams& b, const RhoSpec& rho, const GridSpec& g);

// closed-form spectrum (the oracle the discrete transform is tested against)
complexd beta_spectrum_analytic(const PerturbationParams& b, const RhoSpec& rho, double xi1,
                                double xi2);

// omega0 + beta_n on a common grid
ScalarField perturbed_sequence(const QuadrupoleParams& q, const PerturbationParams& b,
                               const RhoSpec& rho, const GridSpec& g);

// (||grad^perp lap^-1 beta||_inf, ||D grad^perp lap^-1 beta||_inf), spectrally
std::array<double, 2> velocity_smallness_check(const PerturbationParams& b, const RhoSpec& rho,
                                               const GridSpec& g);

// ---- bump-local quadrature -------------------------------------------------
// The L^p / W^{1,p} norms of omega0 reduce to integrals over the disjoint
// support balls of eq-level geometry; rectangle-rule quadrature on a local
// uniform grid per ball evaluates them at any N without a global grid.

struct W1pBreakdown {
    double lp = 0.0, d1_lp = 0.0, d2_lp = 0.0;
    double total() const { return lp + d1_lp + d2_lp; }
};

W1pBreakdown omega0_w1p_local(const QuadrupoleParams& q, double p, int pts_per_ball = 192);

// raw p-th power integral of fn over a local uniform grid on the square
// [cx - half, cx + half] x [cy - half, cy + half]; pieces are summed by
// the caller and rooted once
double integrate_pow_square(double cx, double cy, double half, double p, int pts,
                            const std::function<double(double, double)>& fn);

} // namespace bel::data
