#pragma once

#include <Eigen/Core>

namespace vivclust::viv {

using Vec2 = Eigen::Vector2d;

struct FrequencyRange {
    double min = 0.0;
    double max = 0.0;
};

// Empirical hydrodynamic coefficients and synchronization ranges (nondimensional
// frequencies f_hat = f * D / |v|).
struct EmpiricalParameters {
    double c_d = 1.0;
    double c_m = 2.0;
    double c_vy = 0.8;
    double c_vx = 1.2;
    double f0_y = 0.25;
    FrequencyRange fy_range{0.125, 0.4};
    double f0_x = 0.5;
    FrequencyRange fx_range{0.25, 0.75};

    // Throws a validation Error when a range excludes its center or a coefficient is not positive.
    void validate() const;

    // Largest distance from the center to a range bound; sin(theta) = +-1 then
    // reaches the far bound and the clamp handles the near one.
    double delta_fy() const;
    double delta_fx() const;
};

struct StripState {
    Vec2 u_n = Vec2::Zero();      // incoming flow normal to the axis
    Vec2 u_n_dot = Vec2::Zero();  // its time derivative (Froude-Krylov term)
    Vec2 r_dot_n = Vec2::Zero();  // structure velocity
    Vec2 r_ddot_n = Vec2::Zero(); // structure acceleration
    double phi_exc_x = 0.0;
    double phi_exc_y = 0.0;
    double d = 1.0;

    Vec2 v_n() const { return u_n - r_dot_n; }
};

struct HydroForce {
    Vec2 froude_krylov = Vec2::Zero();
    Vec2 added_mass = Vec2::Zero();
    Vec2 drag = Vec2::Zero();
    Vec2 vortex_x = Vec2::Zero();
    Vec2 vortex_y = Vec2::Zero();

    Vec2 total() const { return froude_krylov + added_mass + drag + vortex_x + vortex_y; }
    // Everything except the added-mass reaction, for solvers that keep it on the mass side.
    Vec2 excitation() const { return froude_krylov + drag + vortex_x + vortex_y; }
};

// Force per unit length on one strip: Morison inertia and drag plus in-line and
// cross-flow vortex shedding terms.
HydroForce hydro_force(const StripState& strip, const EmpiricalParameters& params, double rho);

// Local flow frame: in_line along v_n, cross_flow = e3 x in_line. Falls back to the
// global axes when v_n vanishes.
struct LocalFrame {
    Vec2 in_line = Vec2::UnitX();
    Vec2 cross_flow = Vec2::UnitY();
};
LocalFrame local_frame(const Vec2& v_n);

inline Vec2 rotate_plus_90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

// f_hat = clamp(f0 + delta * sin(theta), range).
double excitation_frequency_hat(double theta, double f0, double delta, FrequencyRange range);

// Returns the phase after one step dt; the phase is frozen when |v_n| = 0.
double advance_phase_y(const StripState& strip, double theta_y, double dt,
                       const EmpiricalParameters& params);
double advance_phase_x(const StripState& strip, double theta_x, double dt,
                       const EmpiricalParameters& params);

// Phase of a locally sinusoidal velocity from its value and its derivative:
// atan2(-acc / omega_hat, vel). Returns fallback when both are zero.
double instantaneous_velocity_phase(double vel, double acc, double omega_hat, double fallback);

// Shedding frequency S_t * U / D in Hz.
double strouhal_frequency(double u, double d, double st);

}  // namespace vivclust::viv
