#pragma once

// Pseudo-spectral integration of the 2D vorticity equation
//
//   w_t + u . grad w = 0,   u = grad^perp lap^-1 w
//
// with RK4 in time, 2/3-rule dealiasing of the advection product, a
// CFL-capped adaptive step, and an optional odd-odd symmetry projection.
// Stage velocities (and velocity gradients) are handed to an observer so
// markers can be co-integrated as part of the same RK4 system.

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bel/grid.hpp"

namespace bel::euler {

struct SolverConfig {
    double dt = 0.0;     // base step; 0 picks from the CFL bound at start
    double t_end = 1.0;
    double cfl_cap = 0.5;                                // in (0, 1]
    double dt_max = std::numeric_limits<double>::infinity(); // accuracy cap
    bool dealias = true;
    bool symmetry_enforce = true; // odd-odd projection after each step
    double p_diag = 2.5;          // exponent of the tracked L^p norm
    int snapshot_stride = 0;      // 0: first and last only
    int max_halvings = 10;
    bool track_du = true;         // per-step ||Du||_inf (Gronwall integrand)
};

struct StepDiagnostics {
    double t = 0.0;
    double l2 = 0.0, lp = 0.0, linf = 0.0;
    double energy = 0.0;     // (1/2) ||u||_2^2
    double sym_defect = 0.0; // max over both axis reflections of |w(x) + w(mirror x)|
    double du_sup = 0.0;     // max |entry of Du|
};

struct Trajectory {
    GridSpec grid;
    SolverConfig config;
    std::vector<StepDiagnostics> diag;    // one per accepted step, starting at t = 0
    std::vector<double> snapshot_times;
    std::vector<ScalarField> snapshots;   // vorticity at sampled times (always incl. 0, t_end)
    double gronwall_integral = 0.0;       // integral of ||Du(t)||_inf dt
    int halvings = 0;                     // CFL interventions over the run
    const ScalarField& initial() const { return snapshots.front(); }
    const ScalarField& final_state() const { return snapshots.back(); }
    double final_time() const { return snapshot_times.back(); }
};

// velocity and (optionally) its gradient at one RK stage; du22 = -du11
struct StageField {
    double time = 0.0;
    VectorField u;
    ScalarField du11, du21, du12;
    bool has_du = false;
};

// observer invoked once per accepted step with the four stage fields
// (times t, t+dt/2, t+dt/2, t+dt)
using StageObserver = std::function<void(double t, double dt, const std::array<StageField, 4>&)>;

VectorField biot_savart(const ScalarField& omega);
ScalarField rhs(const ScalarField& omega, bool dealias_product = true);

// single RK4 step (no adaptivity); used by tests and the reversibility check
ScalarField step(const ScalarField& omega, double dt, bool dealias_product = true);

Trajectory solve(const ScalarField& omega0, const SolverConfig& cfg,
                 const StageObserver& observer = nullptr, bool observer_needs_du = false);

// sup over stored snapshots of the W^{1,p} norm (purely observational)
double kato_ponce_reference(const Trajectory& traj, double p);

// odd-odd projection: average of w over the reflection group {x1 -> -x1} x {x2 -> -x2}
ScalarField symmetrize_odd_odd(const ScalarField& w);
// max over both singleatomic reflections of |w + w.mirror|
double odd_odd_defect(const ScalarField& w);

void write_diagnostics_csv(const std::string& path, const Trajectory& traj);

} // namespace bel::euler
