#pragma once

// Lagrangian flow map and deformation gradient along a velocity field:
//
//   d eta / dt = u(t, eta),      eta(0, x) = x
//   d Deta / dt = Du(t, eta) Deta,  Deta(0, x) = I
//
// integrated with RK4 either against an analytic/stored sampler or
// co-integrated with the Euler solver through its stage observer (the
// joint system is advanced by one RK4 scheme). Spatial sampling of grid
// velocities is 4-point Lagrange bicubic (O(h^4)); time interpolation of
// stored trajectories is linear between snapshots (O(dt^2)).

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bel/euler.hpp"
#include "bel/grid.hpp"

namespace bel::flow {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<double, 4>; // row-major: [0]=d11 [1]=d12 [2]=d21 [3]=d22

inline double det(const Mat2& m) { return m[0] * m[3] - m[1] * m[2]; }
inline double max_abs_entry(const Mat2& m) {
    return std::max(std::max(std::abs(m[0]), std::abs(m[1])),
                    std::max(std::abs(m[2]), std::abs(m[3])));
}

struct Marker {
    Vec2 seed{};
    Vec2 pos{};
    Mat2 defgrad{1.0, 0.0, 0.0, 1.0};
    bool flagged = false; // left the trusted interior; excluded from sup statistics
};

struct SeedSpec {
    // main uniform lattice
    Vec2 center{0.0, 0.0};
    double half_extent = 1.0;
    int per_axis = 64;
    // refined clusters (center, half extent, per-axis count)
    struct Cluster {
        Vec2 center;
        double half_extent;
        int per_axis;
    };
    std::vector<Cluster> clusters;
};

struct FlowState {
    double time = 0.0;
    std::vector<Marker> markers;
    // main-lattice geometry (first lattice_n^2 markers), kept for interpolation
    Vec2 lattice_origin{};
    double lattice_spacing = 0.0;
    int lattice_n = 0;

    static FlowState seed(const SeedSpec& spec);
};

// ---- velocity samplers ---------------------------------------------------

class VelocitySampler {
public:
    virtual ~VelocitySampler() = default;
    virtual Vec2 velocity(double t, const Vec2& x) const = 0;
    virtual Mat2 velocity_grad(double t, const Vec2& x) const = 0;
    virtual double time_begin() const = 0;
    virtual double time_end() const = 0;
    // called single-threaded before a window is sampled concurrently
    virtual void prepare(double, double) const {}
};

class AnalyticSampler final : public VelocitySampler {
public:
    using VelFn = std::function<Vec2(double, const Vec2&)>;
    using GradFn = std::function<Mat2(double, const Vec2&)>;
    AnalyticSampler(VelFn u, GradFn du) : u_(std::move(u)), du_(std::move(du)) {}
    Vec2 velocity(double t, const Vec2& x) const override { return u_(t, x); }
    Mat2 velocity_grad(double t, const Vec2& x) const override { return du_(t, x); }
    double time_begin() const override { return -1e300; }
    double time_end() const override { return 1e300; }

private:
    VelFn u_;
    GradFn du_;
};

// samples the Biot-Savart velocity of stored vorticity snapshots; fields
// per snapshot are derived lazily and cached
class TrajectorySampler final : public VelocitySampler {
public:
    explicit TrajectorySampler(const euler::Trajectory& traj);
    TrajectorySampler(std::vector<double> times, std::vector<ScalarField> vorticity);
    Vec2 velocity(double t, const Vec2& x) const override;
    Mat2 velocity_grad(double t, const Vec2& x) const override;
    double time_begin() const override { return times_.front(); }
    double time_end() const override { return times_.back(); }
    void prepare(double t0, double t1) const override;

private:
    struct Level;
    const Level& level(std::size_t i) const;
    std::vector<double> times_;
    std::vector<ScalarField> w_;
    mutable std::vector<std::shared_ptr<Level>> cache_;
};

// periodic 4-point Lagrange interpolation of a grid field
double sample_bicubic(const ScalarField& f, double x1, double x2);
// serial reference twin (tests, bench)
double sample_bicubic_serial(const ScalarField& f, double x1, double x2);

// ---- integration -----------------------------------------------------------

// advance to t_target (forward or backward) with steps of magnitude <= dt;
// markers crossing outside |x|_inf > interior_frac * L are flagged
FlowState advance_flow(const FlowState& s, const VelocitySampler& u, double t_target, double dt,
                       double box_half_width = 0.0, double interior_frac = 0.9);

// joint RK4 with the Euler solver: attach `observer()` to euler::solve
// (observer_needs_du = true) and read `state()` when the run finishes
class CoIntegrator {
public:
    CoIntegrator(FlowState initial, double box_half_width, double interior_frac = 0.9);
    euler::StageObserver observer();
    const FlowState& state() const { return state_; }
    // running sup over steps of the deformation maximum (strictness checks)
    const std::vector<double>& sup_series() const { return sup_series_; }
    const std::vector<double>& times() const { return times_; }

private:
    FlowState state_;
    double L_, interior_;
    std::vector<double> sup_series_, times_;
};

// ---- diagnostics -----------------------------------------------------------

struct DeformationReport {
    double value = 1.0;   // max over unflagged markers of max |Deta entry|
    Vec2 seed{};          // seed of the arg max marker
    Vec2 pos{};           // its current position
    int entry = 0;        // 0..3 row-major, expected 3 (= d eta2 / d x2)
};

DeformationReport sup_deformation(const FlowState& s);

double max_det_defect(const FlowState& s); // max |det Deta - 1|

// gradient of f . eta^{-1} at marker image points via the inverse-Jacobi
// formula; grad_f supplies the analytic gradient of f at seeds. Throws
// "deformation too strong for pullback" when det Deta leaves [1/4, 4].
std::vector<Vec2> pullback_gradient(const FlowState& s,
                                    const std::function<Vec2(const Vec2&)>& grad_f);

// theta(t) = max over common unflagged markers of |eta - xi| + |Deta - Dxi|
struct FlowComparison {
    double theta = 0.0;
    double pos_part = 0.0, grad_part = 0.0;
    double ratio = 0.0; // theta / (v_bound_sup + v_grad_bound_sup)
};
FlowComparison compare_flows(const FlowState& a, const FlowState& b, double v_bound_sup,
                             double v_grad_bound_sup);

// bicubic interpolation of the main-lattice deformation entries at an
// arbitrary point inside the lattice (used by the product quadratures)
Mat2 interpolate_defgrad(const FlowState& s, const Vec2& x);
Vec2 interpolate_position(const FlowState& s, const Vec2& x);

void write_markers_csv(const std::string& path, const FlowState& s);

} // namespace bel::flow
