#include "bel/fft.hpp"

#include "bel/kernels.hpp"

#include <fftw3.h>
#ifdef __GLIBC__
#include <malloc.h>
#endif

#include <cstring>
#include <map>
#include <mutex>

namespace bel::fft {

namespace {

std::mutex plan_mutex;
bool threads_ready = false;

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// FFTW_ESTIMATE + FFTW_UNALIGNED: planning never touches the arrays and
// the same plan serves any buffer of the right shape.
PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> real(std::size_t(n) * n);
    std::vector<fftw_complex> cplx(std::size_t(n) * (n / 2 + 1));
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_2d(n, n, real.data(), cplx.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_2d(n, n, cplx.data(), real.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

// field-sized buffers churn constantly; keep glibc from handing them
// back to the kernel on every free (page faulting dominates otherwise)
void tune_allocator() {
#ifdef __GLIBC__
    static bool done = false;
    if (!done) {
        mallopt(M_MMAP_MAX, 0);
        mallopt(M_TRIM_THRESHOLD, 1 << 30);
        done = true;
    }
#endif
}

void ensure_threads() {
    if (!threads_ready) {
        tune_allocator();
        fftw_init_threads();
        fftw_plan_with_nthreads(kernels::thread_count());
        threads_ready = true;
    }
}

} // namespace

void set_threads(int nthreads) {
    std::lock_guard lock(plan_mutex);
    tune_allocator();
    fftw_init_threads();
    fftw_plan_with_nthreads(nthreads);
    threads_ready = true;
}

Spectrum forward(const GridSpec& g, const std::vector<double>& values) {
    const int n = g.n;
    const int cols = n / 2 + 1;
    std::vector<double> in(values);
    Spectrum out(g);
    {
        std::lock_guard lock(plan_mutex);
        ensure_threads();
        fftw_execute_dft_r2c(plans_for(n).r2c, in.data(),
                             reinterpret_cast<fftw_complex*>(out.c.data()));
    }
    const double h2 = g.spacing() * g.spacing();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        complexd* row = out.c.data() + std::size_t(r) * cols;
        for (int m2 = 0; m2 < cols; ++m2) {
            const double sign = ((r + m2) & 1) ? -h2 : h2;
            row[m2] *= sign;
        }
    }
    return out;
}

Spectrum forward(const ScalarField& f) { return forward(f.grid(), f.values()); }

std::vector<double> inverse_values(const Spectrum& s) {
    const int n = s.grid.n;
    const int cols = n / 2 + 1;
    const double box = 2.0 * s.grid.half_width;
    const double norm = 1.0 / (box * box);
    std::vector<complexd> in(s.c.size());
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        const complexd* src = s.c.data() + std::size_t(r) * cols;
        complexd* dst = in.data() + std::size_t(r) * cols;
        for (int m2 = 0; m2 < cols; ++m2) {
            const double sign = ((r + m2) & 1) ? -norm : norm;
            dst[m2] = src[m2] * sign;
        }
    }
    std::vector<double> out(s.grid.size());
    {
        std::lock_guard lock(plan_mutex);
        ensure_threads();
        fftw_execute_dft_c2r(plans_for(n).c2r,
                             reinterpret_cast<fftw_complex*>(in.data()), out.data());
    }
    return out;
}

ScalarField inverse(const Spectrum& s) {
    return {s.grid, inverse_values(s), s};
}

std::vector<double> inverse_prepared(std::vector<complexd> buf, const GridSpec& g) {
    const int n = g.n;
    if (buf.size() != std::size_t(n) * (n / 2 + 1))
        throw std::invalid_argument("inverse_prepared: buffer shape mismatch");
    std::vector<double> out(g.size());
    {
        std::lock_guard lock(plan_mutex);
        ensure_threads();
        fftw_execute_dft_c2r(plans_for(n).c2r,
                             reinterpret_cast<fftw_complex*>(buf.data()), out.data());
    }
    return out;
}

} // namespace bel::fft
