#pragma once

#include "vivclust/viv/hydro.hpp"

#include <vector>

namespace vivclust::viv {

struct RigidCylinderConfig {
    double mass_ratio = 2.0;     // structural mass / displaced mass
    double fn_cf = 1.0;          // still-water natural frequency (added mass included), Hz
    double fn_ratio = 2.0;       // in-line / cross-flow natural frequency
    double damping_ratio = 0.005;  // fraction of critical, both directions
    double d = 1.0;
    double rho = 1025.0;
};

struct RigidCylinderResult {
    double a_over_d = 0.0;          // sqrt(2) * CF displacement std / D
    double a_over_d_il = 0.0;
    double f_osc_cf = 0.0;          // Hz
    double f_osc_il = 0.0;
    double f_hat = 0.0;             // f_osc_cf * D / U
    double reduced_velocity = 0.0;  // U / (fn * D)
    double mean_power_fluid = 0.0;  // drag + vortex power into the structure, W/m
    double mean_power_damping = 0.0;
    double max_phase_rate_ratio = 0.0;  // max |dphi_y/dt| / bound
    double max_force_ratio_y = 0.0;     // max |F_vy| / (0.5 rho D C_vy |v|^2)
    double max_force_ratio_x = 0.0;
    std::vector<double> t, x, y;    // retained window (decimated)
};

struct RigidRunOptions {
    double discard_fraction = 0.25;  // transient share excluded from statistics
    double power_window = 0.5;       // trailing share used for the power balance
    std::size_t keep_every = 10;     // decimation for the stored histories
};

// Two-degree-of-freedom elastically mounted cylinder in uniform flow u, integrated
// with classical RK4. Throws a validation Error if dt is too coarse or the record
// too short, and a numerical Error on divergence.
RigidCylinderResult simulate_rigid_cylinder(const RigidCylinderConfig& cfg,
                                            const EmpiricalParameters& params, double u,
                                            double duration, double dt,
                                            const RigidRunOptions& options = {});

// Step size giving 200 steps per period of the fastest of the shedding and
// in-line natural frequencies.
double rigid_cylinder_time_step(const RigidCylinderConfig& cfg, const EmpiricalParameters& params,
                                double u);

struct LockInPoint {
    double reduced_velocity = 0.0;
    RigidCylinderResult result;
};

// Sweep of reduced velocity at fixed fn. Points are independent and run in parallel.
std::vector<LockInPoint> lock_in_sweep(const RigidCylinderConfig& cfg,
                                       const EmpiricalParameters& params,
                                       const std::vector<double>& reduced_velocities,
                                       double periods = 300.0);
std::vector<LockInPoint> lock_in_sweep_serial(const RigidCylinderConfig& cfg,
                                              const EmpiricalParameters& params,
                                              const std::vector<double>& reduced_velocities,
                                              double periods = 300.0);

}  // namespace vivclust::viv
