#include "vivclust/viv/hydro.hpp"

#include "vivclust/core/error.hpp"
#include "vivclust/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace vivclust::viv {

void EmpiricalParameters::validate() const {
    if (!(c_d > 0 && c_m > 0 && c_vy > 0 && c_vx > 0 && f0_y > 0 && f0_x > 0))
        throw validation_error("empirical coefficients must be positive");
    if (!(fy_range.min <= f0_y && f0_y <= fy_range.max))
        throw validation_error("cross-flow range must contain f0_y");
    if (!(fx_range.min <= f0_x && f0_x <= fx_range.max))
        throw validation_error("in-line range must contain f0_x");
}

double EmpiricalParameters::delta_fy() const {
    return std::max(fy_range.max - f0_y, f0_y - fy_range.min);
}

double EmpiricalParameters::delta_fx() const {
    return std::max(fx_range.max - f0_x, f0_x - fx_range.min);
}

HydroForce hydro_force(const StripState& s, const EmpiricalParameters& p, double rho) {
    HydroForce f;
    const double area = kPi * s.d * s.d / 4.0;
    f.froude_krylov = p.c_m * rho * area * s.u_n_dot;
    f.added_mass = -(p.c_m - 1.0) * rho * area * s.r_ddot_n;
    const Vec2 v = s.v_n();
    const double speed = v.norm();
    const double q = 0.5 * rho * s.d * speed;
    f.drag = q * p.c_d * v;
    f.vortex_x = q * p.c_vx * std::cos(s.phi_exc_x) * v;
    f.vortex_y = q * p.c_vy * std::cos(s.phi_exc_y) * rotate_plus_90(v);
    return f;
}

LocalFrame local_frame(const Vec2& v_n) {
    const double speed = v_n.norm();
    if (speed <= 0.0) return {};
    LocalFrame frame;
    frame.in_line = v_n / speed;
    frame.cross_flow = rotate_plus_90(frame.in_line);
    return frame;
}

double excitation_frequency_hat(double theta, double f0, double delta, FrequencyRange range) {
    return std::clamp(f0 + delta * std::sin(theta), range.min, range.max);
}

double advance_phase_y(const StripState& s, double theta_y, double dt, const EmpiricalParameters& p) {
    const double fhat = excitation_frequency_hat(theta_y, p.f0_y, p.delta_fy(), p.fy_range);
    return s.phi_exc_y + 2.0 * kPi * (s.v_n().norm() / s.d) * fhat * dt;
}

double advance_phase_x(const StripState& s, double theta_x, double dt, const EmpiricalParameters& p) {
    const double fhat = excitation_frequency_hat(theta_x, p.f0_x, p.delta_fx(), p.fx_range);
    return s.phi_exc_x + 2.0 * kPi * (s.v_n().norm() / s.d) * fhat * dt;
}

double instantaneous_velocity_phase(double vel, double acc, double omega_hat, double fallback) {
    if (!(omega_hat > 0.0)) throw validation_error("omega_hat must be positive");
    if (vel == 0.0 && acc == 0.0) return fallback;
    return std::atan2(-acc / omega_hat, vel);
}

double strouhal_frequency(double u, double d, double st) {
    if (!(d > 0.0)) throw validation_error("diameter must be positive");
    return st * u / d;
}

}  // namespace vivclust::viv
