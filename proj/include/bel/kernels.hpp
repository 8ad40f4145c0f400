#pragma once

// Data-parallel inner loops shared by the spectral and Lagrangian layers.
// Every kernel has a serial reference twin (suffix _serial) used by the
// tests and the bench tool; the unsuffixed version parallelizes with
// OpenMP. Reductions use a fixed per-thread partition with an ordered
// combine so results are deterministic for a fixed thread count.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bel/grid.hpp"

namespace bel::kernels {

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---- pointwise field ops ----------------------------------------------

template <class F>
void map_inplace_serial(double* a, std::size_t n, F f) {
    for (std::size_t i = 0; i < n; ++i) a[i] = f(a[i]);
}

template <class F>
void map_inplace(double* a, std::size_t n, F f) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) a[i] = f(a[i]);
}

inline void multiply_serial(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

inline void multiply(const double* a, const double* b, double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) out[i] = a[i] * b[i];
}

// out = sum_k coef[k] * field[k], fused
inline void linear_combine_serial(const std::vector<const double*>& fields,
                                  const std::vector<double>& coef, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < fields.size(); ++k) s += coef[k] * fields[k][i];
        out[i] = s;
    }
}

inline void linear_combine(const std::vector<const double*>& fields,
                           const std::vector<double>& coef, double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < fields.size(); ++k) s += coef[k] * fields[k][i];
        out[i] = s;
    }
}

// ---- spectral multiplier application -----------------------------------
// fn(m1, m2) -> complex multiplier at signed mode (m1, m2); applied over
// the r2c half-plane layout of Spectrum.

template <class F>
void apply_multiplier_serial(Spectrum& s, F fn) {
    const int n = s.grid.n, cols = s.cols();
    for (int r = 0; r < n; ++r) {
        const int m1 = r <= n / 2 ? r : r - n;
        complexd* row = s.c.data() + std::size_t(r) * cols;
        for (int m2 = 0; m2 < cols; ++m2) row[m2] *= fn(m1, m2);
    }
}

template <class F>
void apply_multiplier(Spectrum& s, F fn) {
    const int n = s.grid.n, cols = s.cols();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        const int m1 = r <= n / 2 ? r : r - n;
        complexd* row = s.c.data() + std::size_t(r) * cols;
        for (int m2 = 0; m2 < cols; ++m2) row[m2] *= fn(m1, m2);
    }
}

// ---- deterministic reductions ------------------------------------------
// Per-thread partial sums over fixed contiguous chunks, combined in chunk
// order: bitwise reproducible for a fixed thread count.

namespace detail {
inline std::size_t chunk_begin(std::size_t n, int nchunks, int k) {
    return n * std::size_t(k) / nchunks;
}
} // namespace detail

template <class F>
double reduce_sum_serial(std::size_t n, F term) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
}

template <class F>
double reduce_sum(std::size_t n, F term) {
    const int nc = std::max(1, thread_count());
    std::vector<double> partial(nc, 0.0);
#pragma omp parallel for schedule(static, 1)
    for (int k = 0; k < nc; ++k) {
        double s = 0.0;
        const std::size_t b = detail::chunk_begin(n, nc, k), e = detail::chunk_begin(n, nc, k + 1);
        for (std::size_t i = b; i < e; ++i) s += term(i);
        partial[k] = s;
    }
    double s = 0.0;
    for (int k = 0; k < nc; ++k) s += partial[k];
    return s;
}

template <class F>
double reduce_max_serial(std::size_t n, F term) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, term(i));
    return m;
}

template <class F>
double reduce_max(std::size_t n, F term) {
    const int nc = std::max(1, thread_count());
    std::vector<double> partial(nc, 0.0);
#pragma omp parallel for schedule(static, 1)
    for (int k = 0; k < nc; ++k) {
        double m = 0.0;
        const std::size_t b = detail::chunk_begin(n, nc, k), e = detail::chunk_begin(n, nc, k + 1);
        for (std::size_t i = b; i < e; ++i) m = std::max(m, term(i));
        partial[k] = m;
    }
    double m = 0.0;
    for (int k = 0; k < nc; ++k) m = std::max(m, partial[k]);
    return m;
}

inline double abs_max(const double* a, std::size_t n) {
    return reduce_max(n, [a](std::size_t i) { return std::abs(a[i]); });
}
inline double abs_max_serial(const double* a, std::size_t n) {
    return reduce_max_serial(n, [a](std::size_t i) { return std::abs(a[i]); });
}

inline double pow_sum(const double* a, std::size_t n, double p) {
    return reduce_sum(n, [a, p](std::size_t i) { return std::pow(std::abs(a[i]), p); });
}
inline double pow_sum_serial(const double* a, std::size_t n, double p) {
    return reduce_sum_serial(n, [a, p](std::size_t i) { return std::pow(std::abs(a[i]), p); });
}

// ---- grid sampling of analytic functions --------------------------------

template <class F>
std::vector<double> sample_serial(const GridSpec& g, F f) {
    std::vector<double> v(g.size());
    for (int j1 = 0; j1 < g.n; ++j1)
        for (int j2 = 0; j2 < g.n; ++j2) v[std::size_t(j1) * g.n + j2] = f(g.x1(j1), g.x2(j2));
    return v;
}

template <class F>
std::vector<double> sample(const GridSpec& g, F f) {
    std::vector<double> v(g.size());
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < g.n; ++j1)
        for (int j2 = 0; j2 < g.n; ++j2) v[std::size_t(j1) * g.n + j2] = f(g.x1(j1), g.x2(j2));
    return v;
}

} // namespace bel::kernels
