// Benchmark of the OpenMP kernels against their serial reference twins.
// Usage: bench [points_per_axis...]

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "bel/fft.hpp"
#include "bel/grid.hpp"
#include "bel/kernels.hpp"
#include "bel/spectral.hpp"

using namespace bel;
using clk = std::chrono::steady_clock;

namespace {

double ms_per_call(int reps, const std::function<void()>& fn) {
    fn(); // warm up
    auto t0 = clk::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count() / reps;
}

void line(const char* name, double serial_ms, double parallel_ms) {
    std::printf("  %-28s %10.3f ms %10.3f ms   x%.2f\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> sizes;
    for (int i = 1; i < argc; ++i) sizes.push_back(std::atoi(argv[i]));
    if (sizes.empty()) sizes = {512, 1024, 2048};

    std::printf("threads: %d\n", kernels::thread_count());
    for (int n : sizes) {
        GridSpec g(n, std::numbers::pi);
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> a(g.size()), b(g.size()), out(g.size());
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        ScalarField fa(g, a);
        Spectrum s = fa.spectrum();

        const int reps = n <= 1024 ? 10 : 4;
        std::printf("%d^2 grid\n", n);

        line("pointwise multiply",
             ms_per_call(reps, [&] { kernels::multiply_serial(a.data(), b.data(), out.data(), a.size()); }),
             ms_per_call(reps, [&] { kernels::multiply(a.data(), b.data(), out.data(), a.size()); }));

        auto mult = [half = n / 2, w = std::numbers::pi / g.half_width](int m1, int m2) {
            if (m1 == half || m1 == -half) return complexd(0.0);
            return complexd(0.0, w * m1) * complexd(0.0, w * m2);
        };
        Spectrum s1 = s, s2 = s;
        line("spectral multiplier",
             ms_per_call(reps, [&] { kernels::apply_multiplier_serial(s1, mult); }),
             ms_per_call(reps, [&] { kernels::apply_multiplier(s2, mult); }));

        line("L^p power sum",
             ms_per_call(reps, [&] { kernels::pow_sum_serial(a.data(), a.size(), 2.5); }),
             ms_per_call(reps, [&] { kernels::pow_sum(a.data(), a.size(), 2.5); }));

        auto smooth = [](double x1, double x2) {
            return std::sin(3 * x1) * std::cos(2 * x2) + 0.3 * std::sin(7 * x2);
        };
        line("analytic sampling",
             ms_per_call(reps, [&] { kernels::sample_serial(g, smooth); }),
             ms_per_call(reps, [&] { kernels::sample(g, smooth); }));

        // the transform backend is a library call; no serial twin to race
        std::printf("  %-28s %10.3f ms   (fftw, %d threads)\n", "fft round trip (library)",
                    ms_per_call(reps, [&] { fft::inverse_values(fft::forward(g, a)); }),
                    kernels::thread_count());
    }
    return 0;
}
