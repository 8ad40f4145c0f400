#include "bel/initial_data.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bel/fft.hpp"
#include "bel/kernels.hpp"
#include "bel/spectral.hpp"

namespace bel::data {

using std::numbers::pi;

// ---- radial bump, support |x| < 1/4 ---------------------------------------

namespace {
// standard C^inf profile on [0, 1), peak value 1
double profile(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}
double profile_prime(double r) {
    if (r >= 1.0) return 0.0;
    const double d = 1.0 - r * r;
    return profile(r) * (-2.0 * r / (d * d));
}
} // namespace

double bump(double r) { return profile(4.0 * r); }
double bump_radial_derivative(double r) { return 4.0 * profile_prime(4.0 * r); }

double phi(double x1, double x2) { return bump(std::sqrt(x1 * x1 + x2 * x2)); }

std::array<double, 2> phi_grad(double x1, double x2) {
    const double r = std::sqrt(x1 * x1 + x2 * x2);
    if (r < 1e-14 || r >= 0.25) return {0.0, 0.0};
    const double d = bump_radial_derivative(r) / r;
    return {d * x1, d * x2};
}

double phi0(double x1, double x2) {
    double s = 0.0;
    for (int e1 : {-1, 1})
        for (int e2 : {-1, 1}) s += e1 * e2 * phi(x1 - e1, x2 - e2);
    return s;
}

std::array<double, 2> phi0_grad(double x1, double x2) {
    std::array<double, 2> g{0.0, 0.0};
    for (int e1 : {-1, 1})
        for (int e2 : {-1, 1}) {
            auto gg = phi_grad(x1 - e1, x2 - e2);
            g[0] += e1 * e2 * gg[0];
            g[1] += e1 * e2 * gg[1];
        }
    return g;
}

double phi_k(double x1, double x2, int k, double p) {
    const double scale = std::ldexp(1.0, k);
    return std::pow(2.0, (-1.0 + 2.0 / p) * k) * phi0(scale * x1, scale * x2);
}

std::array<double, 2> phi_k_grad(double x1, double x2, int k, double p) {
    const double scale = std::ldexp(1.0, k);
    const double amp = std::pow(2.0, (-1.0 + 2.0 / p) * k) * scale;
    auto g = phi0_grad(scale * x1, scale * x2);
    return {amp * g[0], amp * g[1]};
}

// ---- omega0 ----------------------------------------------------------------

void QuadrupoleParams::validate() const {
    if (!(M >= 2.0)) throw std::invalid_argument("QuadrupoleParams: M >= 2 required");
    if (N < 1) throw std::invalid_argument("QuadrupoleParams: N >= 1 required");
    if (N0 < 1) throw std::invalid_argument("QuadrupoleParams: N0 >= 1 required");
    if (!(p > 2.0 && p <= 3.0)) throw std::invalid_argument("QuadrupoleParams: 2 < p <= 3 required");
}

double QuadrupoleParams::amplitude() const {
    return std::pow(M, -2.0) * std::pow(double(N), -1.0 / p);
}

double QuadrupoleParams::support_radius() const {
    return std::ldexp(1.0, -N0) + std::ldexp(1.0, -(N0 + 2));
}

double omega0_eval(const QuadrupoleParams& q, double x1, double x2) {
    double s = 0.0;
    for (int k = q.k_min(); k <= q.k_max(); ++k) s += phi_k(x1, x2, k, q.p);
    return q.amplitude() * s;
}

std::array<double, 2> omega0_grad(const QuadrupoleParams& q, double x1, double x2) {
    std::array<double, 2> g{0.0, 0.0};
    for (int k = q.k_min(); k <= q.k_max(); ++k) {
        auto gk = phi_k_grad(x1, x2, k, q.p);
        g[0] += gk[0];
        g[1] += gk[1];
    }
    const double a = q.amplitude();
    return {a * g[0], a * g[1]};
}

ScalarField omega0(const QuadrupoleParams& q, const GridSpec& g) {
    q.validate();
    if (q.support_radius() > 0.9 * g.half_width)
        throw std::runtime_error("quadrupole support does not fit the box");
    if (q.finest_bump_radius() < 8.0 * g.spacing())
        throw std::runtime_error("unresolved finest scale");
    return {g, kernels::sample(g, [&q](double x1, double x2) { return omega0_eval(q, x1, x2); })};
}

// ---- rho -------------------------------------------------------------------

namespace {

double simpson(double a, double b, int n, const std::function<double(double)>& f) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

RhoSpec::RhoSpec() {
    // normalization: integral of the raw profile over R^2
    const double raw_mass =
        2.0 * pi * simpson(0.0, 1.0, 2000, [](double r) { return profile(r) * r; });
    norm_ = 1.0 / raw_mass;
    peak_ = norm_; // profile peaks at 1

    // marginal g(xi1) = integral chi_hat(xi1, xi2) d xi2, then one padded
    // transform gives chi and chi' on a fine radial lattice
    const int n1 = 1 << 21;
    const double dxi = 1.0 / 2048.0;
    dr_ = 1.0 / (n1 * dxi); // = 2048 / 2^21 = 1/1024
    r_max_ = 1500.0;

    std::vector<double> marginal(n1, 0.0);
    const int isup = int(1.0 / dxi) + 1;
#pragma omp parallel for schedule(static)
    for (int i = 0; i <= isup; ++i) {
        const double xi1 = i * dxi;
        if (xi1 >= 1.0) continue;
        const double half = std::sqrt(1.0 - xi1 * xi1);
        marginal[i] = 2.0 * norm_ *
                      simpson(0.0, half, 400, [xi1](double xi2) {
                          return profile(std::sqrt(xi1 * xi1 + xi2 * xi2));
                      });
    }

    // chi(r_j)  = dxi (2 Re C_j - g0),  C = sum_i g_i e^{+2 pi i i j / n1}
    // chi'(r_j) = -2 dxi Im D_j,        D = sum_i (2 pi xi_i g_i) e^{+...}
    std::vector<std::complex<double>> in(n1), out(n1);
    for (int i = 0; i < n1; ++i)
        in[i] = {marginal[i], 2.0 * pi * (i * dxi) * marginal[i]};
    fftw_plan plan = fftw_plan_dft_1d(n1, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const std::size_t keep = std::size_t(r_max_ / dr_) + 2;
    chi_tab_.resize(keep);
    chi_prime_tab_.resize(keep);
    // packed input a + i b with a = g, b = 2 pi xi g; for Z = DFT^+(a + ib):
    //   sum a cos = (Re Z_j + Re Z_{N-j}) / 2,  sum b sin = (Re Z_{N-j} - Re Z_j) / 2
    for (std::size_t j = 0; j < keep; ++j) {
        const std::size_t jr = j == 0 ? 0 : n1 - j;
        const auto f = out[j], fr = out[jr];
        chi_tab_[j] = dxi * (f.real() + fr.real() - marginal[0]);
        chi_prime_tab_[j] = dxi * (f.real() - fr.real()); // = -2 dxi sum b sin
    }

    // measured plateau: largest eps with |rho| >= 1 on B(0, eps); the
    // binding direction is the carrier axis
    double eps = 0.0;
    for (double r = 0.0; r < 0.25; r += 1e-5) {
        if (2.0 * std::cos(4.0 * pi * r) * chi(r) < 1.0) break;
        eps = r;
    }
    eps_ = eps;
}

const RhoSpec& RhoSpec::standard() {
    static RhoSpec spec;
    return spec;
}

double RhoSpec::chi_hat(double xi1, double xi2) const {
    return norm_ * profile(std::sqrt(xi1 * xi1 + xi2 * xi2));
}

double RhoSpec::rho_hat(double xi1, double xi2) const {
    return chi_hat(xi1 - 2.0, xi2) + chi_hat(xi1 + 2.0, xi2);
}

namespace {
double table_interp(const std::vector<double>& tab, double dr, double x, bool odd) {
    // 4-point Catmull-Rom on the uniform table; parity supplies tab[-1]
    const double u = x / dr;
    const std::size_t j = std::size_t(u);
    if (j + 2 >= tab.size()) return 0.0;
    const double t = u - double(j);
    const double pm1 = j == 0 ? (odd ? -tab[1] : tab[1]) : tab[j - 1];
    const double p0 = tab[j], p1 = tab[j + 1], p2 = tab[j + 2];
    return p0 + 0.5 * t * (p1 - pm1 + t * (2 * pm1 - 5 * p0 + 4 * p1 - p2 + t * (3 * (p0 - p1) + p2 - pm1)));
}
} // namespace

double RhoSpec::chi(double r) const { return table_interp(chi_tab_, dr_, std::abs(r), false); }

double RhoSpec::chi_prime(double r) const {
    const double v = table_interp(chi_prime_tab_, dr_, std::abs(r), true);
    return r < 0.0 ? -v : v;
}

double RhoSpec::rho(double y1, double y2) const {
    const double r = std::sqrt(y1 * y1 + y2 * y2);
    if (r >= r_max_) return 0.0;
    return 2.0 * std::cos(4.0 * pi * y1) * chi(r);
}

std::array<double, 2> RhoSpec::rho_grad(double y1, double y2) const {
    const double r = std::sqrt(y1 * y1 + y2 * y2);
    if (r >= r_max_) return {0.0, 0.0};
    const double c = std::cos(4.0 * pi * y1), s = std::sin(4.0 * pi * y1);
    const double cp = chi_prime(r);
    const double rr = r < 1e-14 ? 1.0 : r; // chi'(0) = 0, direction moot
    return {-8.0 * pi * s * chi(r) + 2.0 * c * cp * y1 / rr, 2.0 * c * cp * y2 / rr};
}

double RhoSpec::tail_radius(double tol) const {
    for (std::size_t j = chi_tab_.size(); j-- > 0;)
        if (std::abs(chi_tab_[j]) >= tol) return (j + 1) * dr_;
    return 0.0;
}

double RhoSpec::lp_norm_rho_hat(double p) const {
    // the two chi_hat translates are disjoint
    const double ip =
        2.0 * pi * simpson(0.0, 1.0, 2000, [&](double r) { return std::pow(norm_ * profile(r), p) * r; });
    return std::pow(2.0 * ip, 1.0 / p);
}

namespace {
double lp_norm_2d(double R, int pts, double p, const std::function<double(double, double)>& fn) {
    const double h = 2.0 * R / pts;
    const double acc = kernels::reduce_sum(std::size_t(pts) * pts, [&](std::size_t i) {
        const int a = int(i) / pts, b = int(i) % pts;
        const double y1 = -R + (a + 0.5) * h, y2 = -R + (b + 0.5) * h;
        return std::pow(std::abs(fn(y1, y2)), p);
    });
    return std::pow(acc * h * h, 1.0 / p);
}
} // namespace

double RhoSpec::lp_norm_rho(double p, int quad_pts) const {
    const double R = tail_radius(1e-10);
    return lp_norm_2d(R, quad_pts, p, [this](double a, double b) { return rho(a, b); });
}
double RhoSpec::lp_norm_d1_rho(double p, int quad_pts) const {
    const double R = tail_radius(1e-10);
    return lp_norm_2d(R, quad_pts, p, [this](double a, double b) { return rho_grad(a, b)[0]; });
}
double RhoSpec::lp_norm_d2_rho(double p, int quad_pts) const {
    const double R = tail_radius(1e-10);
    return lp_norm_2d(R, quad_pts, p, [this](double a, double b) { return rho_grad(a, b)[1]; });
}

// ---- beta ------------------------------------------------------------------

PerturbationParams::PerturbationParams(int n_, std::array<double, 2> xs, double p_)
    : n(n_), lambda(3.0 * n_), k(lambda * lambda), x_star(xs), p(p_) {
    if (n < 5) throw std::invalid_argument("PerturbationParams: n >= 5 (lambda >= 15) required");
    if (!(p > 2.0 && p <= 3.0)) throw std::invalid_argument("PerturbationParams: 2 < p <= 3 required");
}

double PerturbationParams::prefactor() const {
    return std::pow(lambda, -1.0 + 2.0 / p) / std::sqrt(k);
}

double PerturbationParams::support_xi1_min() const { return k / (2.0 * pi) - 3.0 * lambda; }
double PerturbationParams::support_xi1_max() const { return k / (2.0 * pi) + 3.0 * lambda; }

bool PerturbationParams::separated_rescaled() const {
    // supp rho_hat(. +- k/(2 pi lambda), .) disjoint from B(0,1):
    // nearest center at lambda/(2 pi) - 2, radius 1
    return lambda / (2.0 * pi) - 2.0 > 2.0;
}

double beta_envelope(const PerturbationParams& b, const RhoSpec& rho, double x1, double x2) {
    double s = 0.0;
    for (int e1 : {-1, 1})
        for (int e2 : {-1, 1})
            s += e1 * e2 *
                 rho.rho(b.lambda * (x1 - e1 * b.x_star[0]), b.lambda * (x2 - e2 * b.x_star[1]));
    return s;
}

double beta_eval(const PerturbationParams& b, const RhoSpec& rho, double x1, double x2) {
    return b.prefactor() * beta_envelope(b, rho, x1, x2) * std::sin(b.k * x1);
}

std::array<double, 2> beta_grad(const PerturbationParams& b, const RhoSpec& rho, double x1,
                                double x2) {
    double e = 0.0, e1g = 0.0, e2g = 0.0;
    for (int s1 : {-1, 1})
        for (int s2 : {-1, 1}) {
            const double y1 = b.lambda * (x1 - s1 * b.x_star[0]);
            const double y2 = b.lambda * (x2 - s2 * b.x_star[1]);
            const double sgn = s1 * s2;
            e += sgn * rho.rho(y1, y2);
            auto g = rho.rho_grad(y1, y2);
            e1g += sgn * b.lambda * g[0];
            e2g += sgn * b.lambda * g[1];
        }
    const double pre = b.prefactor();
    const double sk = std::sin(b.k * x1), ck = std::cos(b.k * x1);
    return {pre * (e1g * sk + e * b.k * ck), pre * e2g * sk};
}

ScalarField beta(const PerturbationParams& b, const RhoSpec& rho, const GridSpec& g) {
    const double carrier_mode = b.k * g.half_width / pi;
    if (std::abs(carrier_mode - std::round(carrier_mode)) > 1e-9)
        throw std::invalid_argument("beta: carrier sin(k x1) is not periodic on this box");
    if (b.support_xi1_max() >= g.nyquist_freq())
        throw std::runtime_error("unresolved oscillation");
    const double margin = 8.0 / b.lambda;
    if (std::abs(b.x_star[0]) + margin >= g.half_width ||
        std::abs(b.x_star[1]) + margin >= g.half_width)
        throw std::invalid_argument("beta: translates x*_eps do not fit inside the box");
    return {g, kernels::sample(g, [&](double x1, double x2) { return beta_eval(b, rho, x1, x2); })};
}

complexd beta_spectrum_analytic(const PerturbationParams& b, const RhoSpec& rho, double xi1,
                                double xi2) {
    const double shift = b.k / (2.0 * pi);
    const double il2 = 1.0 / (b.lambda * b.lambda);
    const complexd inv2i(0.0, -0.5); // 1 / (2i)
    complexd acc = 0.0;
    for (int e1 : {-1, 1})
        for (int e2 : {-1, 1}) {
            const double a1 = e1 * b.x_star[0], a2 = e2 * b.x_star[1];
            const double pm = -2.0 * pi * ((xi1 - shift) * a1 + xi2 * a2);
            const double pp = -2.0 * pi * ((xi1 + shift) * a1 + xi2 * a2);
            const complexd term =
                complexd(std::cos(pm), std::sin(pm)) * (il2 * rho.rho_hat((xi1 - shift) / b.lambda, xi2 / b.lambda)) -
                complexd(std::cos(pp), std::sin(pp)) * (il2 * rho.rho_hat((xi1 + shift) / b.lambda, xi2 / b.lambda));
            acc += double(e1 * e2) * inv2i * term;
        }
    return b.prefactor() * acc;
}

ScalarField perturbed_sequence(const QuadrupoleParams& q, const PerturbationParams& b,
                               const RhoSpec& rho, const GridSpec& g) {
    ScalarField w = omega0(q, g);
    ScalarField be = beta(b, rho, g);
    std::vector<double> v(g.size());
    kernels::linear_combine({w.data(), be.data()}, {1.0, 1.0}, v.data(), v.size());
    return {g, std::move(v)};
}

std::array<double, 2> velocity_smallness_check(const PerturbationParams& b, const RhoSpec& rho,
                                               const GridSpec& g) {
    ScalarField be = beta(b, rho, g);
    ScalarField psi = spectral::inv_laplacian(be);
    VectorField u = spectral::perp_gradient(psi);
    const double sup_u = kernels::reduce_max(g.size(), [&](std::size_t i) {
        const double a = u.u1.values()[i], c = u.u2.values()[i];
        return std::sqrt(a * a + c * c);
    });
    ScalarField d11 = spectral::derivative(u.u1, 1);
    ScalarField d21 = spectral::derivative(u.u1, 2);
    ScalarField d12 = spectral::derivative(u.u2, 1);
    // incompressible: d u2 / d x2 = - d u1 / d x1
    const double sup_du = kernels::reduce_max(g.size(), [&](std::size_t i) {
        double m = std::abs(d11.values()[i]);
        m = std::max(m, std::abs(d21.values()[i]));
        m = std::max(m, std::abs(d12.values()[i]));
        return m;
    });
    return {sup_u, sup_du};
}

// ---- bump-local quadrature ---------------------------------------------

double integrate_pow_square(double cx, double cy, double half, double p, int pts,
                            const std::function<double(double, double)>& fn) {
    const double h = 2.0 * half / pts;
    const double acc = kernels::reduce_sum(std::size_t(pts) * pts, [&](std::size_t i) {
        const int a = int(i) / pts, b = int(i) % pts;
        const double x = cx - half + (a + 0.5) * h;
        const double y = cy - half + (b + 0.5) * h;
        return std::pow(std::abs(fn(x, y)), p);
    });
    return acc * h * h;
}

W1pBreakdown omega0_w1p_local(const QuadrupoleParams& q, double p, int pts_per_ball) {
    q.validate();
    const double amp = q.amplitude();
    double acc_lp = 0.0, acc_d1 = 0.0, acc_d2 = 0.0;
    for (int k = q.k_min(); k <= q.k_max(); ++k) {
        const double c = std::ldexp(1.0, -k);
        const double r = std::ldexp(1.0, -(k + 2));
        for (int e1 : {-1, 1})
            for (int e2 : {-1, 1}) {
                acc_lp += integrate_pow_square(e1 * c, e2 * c, 1.02 * r, p, pts_per_ball,
                                               [&](double x, double y) {
                                                   return amp * phi_k(x, y, k, q.p);
                                               });
                acc_d1 += integrate_pow_square(e1 * c, e2 * c, 1.02 * r, p, pts_per_ball,
                                               [&](double x, double y) {
                                                   return amp * phi_k_grad(x, y, k, q.p)[0];
                                               });
                acc_d2 += integrate_pow_square(e1 * c, e2 * c, 1.02 * r, p, pts_per_ball,
                                               [&](double x, double y) {
                                                   return amp * phi_k_grad(x, y, k, q.p)[1];
                                               });
            }
    }
    const double inv_p = 1.0 / p;
    return {std::pow(acc_lp, inv_p), std::pow(acc_d1, inv_p), std::pow(acc_d2, inv_p)};
}

} // namespace bel::data
