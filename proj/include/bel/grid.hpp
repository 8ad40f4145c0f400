#pragma once

// Periodic-box discretization: uniform grid on [-L, L)^2 with cached
// spectral coefficients. Fields are immutable values; copies are cheap
// (shared storage) and all operations on them are pure.

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bel {

using complexd = std::complex<double>;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct GridSpec {
    int    n = 0;            // points per axis, power of two, >= 16
    double half_width = 0.0; // L; box is [-L, L)^2

    GridSpec() = default;
    GridSpec(int points_per_axis, double L) : n(points_per_axis), half_width(L) {
        if (n < 16 || !is_pow2(n))
            throw std::invalid_argument("GridSpec: points_per_axis must be a power of two >= 16");
        if (!(L > 0.0))
            throw std::invalid_argument("GridSpec: half_width must be positive");
    }

    // exact for power-of-two n: spacing * n == 2L bit-for-bit
    double spacing() const { return 2.0 * half_width / n; }
    double x1(int j1) const { return -half_width + j1 * spacing(); }
    double x2(int j2) const { return -half_width + j2 * spacing(); }
    std::size_t size() const { return std::size_t(n) * std::size_t(n); }
    // physical frequency of integer mode m (transform convention e^{-2 pi i <xi,x>})
    double mode_freq(int m) const { return m / (2.0 * half_width); }
    double nyquist_freq() const { return mode_freq(n / 2); }

    bool operator==(const GridSpec& o) const { return n == o.n && half_width == o.half_width; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

// Spectral coefficients in r2c half-plane layout: index (m1w, m2) with
// m1w in [0, n) wrapping the signed mode and m2 in [0, n/2]. Values are
// the continuum-normalized transform f_hat(xi_m), xi_m = m / (2L).
struct Spectrum {
    GridSpec grid;
    std::vector<complexd> c; // size n * (n/2 + 1)

    Spectrum() = default;
    explicit Spectrum(const GridSpec& g) : grid(g), c(std::size_t(g.n) * (g.n / 2 + 1)) {}

    int cols() const { return grid.n / 2 + 1; }
    std::size_t idx(int m1w, int m2) const { return std::size_t(m1w) * cols() + m2; }

    // signed first mode for a wrapped row index
    int signed_m1(int m1w) const { return m1w <= grid.n / 2 ? m1w : m1w - grid.n; }
    int wrap_m1(int m1) const { return m1 >= 0 ? m1 : m1 + grid.n; }

    // coefficient at signed mode (m1, m2), any sign of m2 (Hermitian fill-in)
    complexd at_mode(int m1, int m2) const {
        if (m2 >= 0) return c[idx(wrap_m1(m1), m2)];
        return std::conj(c[idx(wrap_m1(-m1), -m2)]);
    }
};

namespace detail {
struct SpectrumCache {
    std::once_flag once;
    std::shared_ptr<const Spectrum> spec;
};
} // namespace detail

class ScalarField {
public:
    ScalarField() = default;
    ScalarField(const GridSpec& g, std::vector<double> vals)
        : grid_(g),
          values_(std::make_shared<const std::vector<double>>(std::move(vals))),
          cache_(std::make_shared<detail::SpectrumCache>()) {
        if (values_->size() != g.size())
            throw std::invalid_argument("ScalarField: value count does not match grid");
    }
    ScalarField(const GridSpec& g, std::vector<double> vals, Spectrum spec)
        : ScalarField(g, std::move(vals)) {
        cache_->spec = std::make_shared<const Spectrum>(std::move(spec));
        primed_ = true;
    }

    static ScalarField zeros(const GridSpec& g) {
        return {g, std::vector<double>(g.size(), 0.0)};
    }

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return *values_; }
    const double* data() const { return values_->data(); }
    double at(int j1, int j2) const { return (*values_)[std::size_t(j1) * grid_.n + j2]; }
    bool empty() const { return !values_; }

    // memoized forward transform; thread-safe, field itself never mutates
    const Spectrum& spectrum() const;
    bool has_spectrum() const { return primed_ || (cache_ && cache_->spec != nullptr); }

private:
    GridSpec grid_;
    std::shared_ptr<const std::vector<double>> values_;
    std::shared_ptr<detail::SpectrumCache> cache_;
    bool primed_ = false;
};

struct VectorField {
    ScalarField u1, u2;

    VectorField() = default;
    VectorField(ScalarField a, ScalarField b) : u1(std::move(a)), u2(std::move(b)) {
        if (u1.grid() != u2.grid())
            throw std::invalid_argument("VectorField: components on different grids");
    }
    const GridSpec& grid() const { return u1.grid(); }
};

// Snapshot file format: magic "BEL1", u32 LE points_per_axis,
// f64 LE half_width, then row-major f64 values (rows = x1 index).
void        write_snapshot(const std::string& path, const ScalarField& f);
ScalarField read_snapshot(const std::string& path);

} // namespace bel
