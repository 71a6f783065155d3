#include "vivclust/viv/rigid_cylinder.hpp"

#include "vivclust/core/error.hpp"
#include "vivclust/core/parallel.hpp"
#include "vivclust/core/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace vivclust::viv {

namespace {

// x, y, vx, vy, phi_x, phi_y
using State = std::array<double, 6>;

struct Dynamics {
    double u;
    double d;
    double rho;
    double mass;  // structural + added mass
    double kx, ky, cx, cy;
    EmpiricalParameters params;
    double fhat_x;  // shedding frequencies lagged by one step, for omega_hat
    double fhat_y;

    struct Eval {
        State rate{};
        Vec2 force_exc = Vec2::Zero();
        double vortex_ratio_x = 0.0;
        double vortex_ratio_y = 0.0;
        double phase_rate_ratio = 0.0;
        double fhat_x = 0.0;
        double fhat_y = 0.0;
    };

    Eval operator()(const State& s) const {
        Eval out;
        StripState strip;
        strip.u_n = Vec2(u, 0.0);
        strip.r_dot_n = Vec2(s[2], s[3]);
        strip.phi_exc_x = s[4];
        strip.phi_exc_y = s[5];
        strip.d = d;
        const HydroForce f = hydro_force(strip, params, rho);
        out.force_exc = f.excitation();
        const double ax = (out.force_exc.x() - cx * s[2] - kx * s[0]) / mass;
        const double ay = (out.force_exc.y() - cy * s[3] - ky * s[1]) / mass;
        out.rate = {s[2], s[3], ax, ay, 0.0, 0.0};

        const Vec2 v = strip.v_n();
        const double speed = v.norm();
        const double q = 0.5 * rho * d * speed * speed;
        if (q > 0.0) {
            out.vortex_ratio_x = f.vortex_x.norm() / (q * params.c_vx);
            out.vortex_ratio_y = f.vortex_y.norm() / (q * params.c_vy);
        }
        if (speed > 0.0) {
            const LocalFrame frame = local_frame(v);
            const Vec2 vel = strip.r_dot_n;
            const Vec2 acc(ax, ay);
            // omega_hat from the shedding frequency of the previous step
            const double w_y = 2.0 * kPi * speed * fhat_y / d;
            const double w_x = 2.0 * kPi * speed * fhat_x / d;
            const double phase_ydot = instantaneous_velocity_phase(
                vel.dot(frame.cross_flow), acc.dot(frame.cross_flow), w_y, s[5]);
            const double phase_xdot = instantaneous_velocity_phase(
                vel.dot(frame.in_line), acc.dot(frame.in_line), w_x, s[4]);
            out.fhat_y = excitation_frequency_hat(phase_ydot - s[5], params.f0_y, params.delta_fy(),
                                                  params.fy_range);
            out.fhat_x = excitation_frequency_hat(phase_xdot - s[4], params.f0_x, params.delta_fx(),
                                                  params.fx_range);
            out.rate[4] = 2.0 * kPi * speed / d * out.fhat_x;
            out.rate[5] = 2.0 * kPi * speed / d * out.fhat_y;
            out.phase_rate_ratio = out.rate[5] / (2.0 * kPi * speed / d * params.fy_range.max);
        } else {
            out.fhat_x = params.f0_x;
            out.fhat_y = params.f0_y;
        }
        return out;
    }
};

State axpy(const State& s, double h, const State& k) {
    State r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = s[i] + h * k[i];
    return r;
}

// Mean frequency from zero up-crossings of the mean-removed signal.
double crossing_frequency(const std::vector<double>& v, double dt) {
    if (v.size() < 3) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double first = -1.0, last = -1.0;
    int count = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double a = v[i - 1] - m, b = v[i] - m;
        if (a < 0.0 && b >= 0.0) {
            const double t = (static_cast<double>(i - 1) + a / (a - b)) * dt;
            if (count == 0) first = t;
            last = t;
            ++count;
        }
    }
    if (count < 2 || last <= first) return 0.0;
    return static_cast<double>(count - 1) / (last - first);
}

double std_dev(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

double rigid_cylinder_time_step(const RigidCylinderConfig& cfg, const EmpiricalParameters& params,
                                double u) {
    const double f_shed = params.f0_y * std::abs(u) / cfg.d;
    const double f = std::max({f_shed, cfg.fn_cf, cfg.fn_cf * cfg.fn_ratio});
    return 1.0 / (200.0 * f);
}

RigidCylinderResult simulate_rigid_cylinder(const RigidCylinderConfig& cfg,
                                            const EmpiricalParameters& params, double u,
                                            double duration, double dt,
                                            const RigidRunOptions& options) {
    params.validate();
    if (!(cfg.mass_ratio > 0.0) || !(cfg.fn_cf > 0.0) || !(cfg.fn_ratio > 0.0) || !(cfg.d > 0.0))
        throw validation_error("rigid cylinder needs positive mass ratio, fn, fn ratio and diameter");
    if (!(dt > 0.0)) throw validation_error("dt must be positive");
    const double f_shed = params.f0_y * std::abs(u) / cfg.d;
    if (f_shed > 0.0 && dt > 1.0 / (200.0 * f_shed) * (1.0 + 1e-12))
        throw validation_error("dt exceeds 1/(200 f_strouhal)");
    if (duration < 60.0 / cfg.fn_cf * (1.0 - 1e-12))
        throw validation_error("duration shorter than 60 cross-flow natural periods");

    const double area = kPi * cfg.d * cfg.d / 4.0;
    const double m_struct = cfg.mass_ratio * cfg.rho * area;
    const double m_added = (params.c_m - 1.0) * cfg.rho * area;
    const double mass = m_struct + m_added;
    const double wy = 2.0 * kPi * cfg.fn_cf;
    const double wx = wy * cfg.fn_ratio;

    Dynamics dyn{u,
                 cfg.d,
                 cfg.rho,
                 mass,
                 mass * wx * wx,
                 mass * wy * wy,
                 2.0 * cfg.damping_ratio * mass * wx,
                 2.0 * cfg.damping_ratio * mass * wy,
                 params,
                 params.f0_x,
                 params.f0_y};

    const auto n_steps = static_cast<std::size_t>(std::llround(duration / dt));
    const auto start = static_cast<std::size_t>(std::floor(options.discard_fraction * n_steps));
    const auto power_start =
        static_cast<std::size_t>(std::floor((1.0 - options.power_window) * n_steps));

    RigidCylinderResult res;
    res.reduced_velocity = u / (cfg.fn_cf * cfg.d);
    std::vector<double> xs, ys;
    xs.reserve(n_steps - start + 1);
    ys.reserve(n_steps - start + 1);

    State s{};
    double p_fluid = 0.0, p_damp = 0.0;
    std::size_t p_count = 0;
    for (std::size_t n = 0; n <= n_steps; ++n) {
        const auto k1 = dyn(s);
        if (n >= start) {
            xs.push_back(s[0]);
            ys.push_back(s[1]);
            res.max_force_ratio_x = std::max(res.max_force_ratio_x, k1.vortex_ratio_x);
            res.max_force_ratio_y = std::max(res.max_force_ratio_y, k1.vortex_ratio_y);
            res.max_phase_rate_ratio = std::max(res.max_phase_rate_ratio, k1.phase_rate_ratio);
            if (options.keep_every > 0 && (n - start) % options.keep_every == 0) {
                res.t.push_back(static_cast<double>(n) * dt);
                res.x.push_back(s[0]);
                res.y.push_back(s[1]);
            }
        }
        if (n >= power_start) {
            p_fluid += k1.force_exc.x() * s[2] + k1.force_exc.y() * s[3];
            p_damp += dyn.cx * s[2] * s[2] + dyn.cy * s[3] * s[3];
            ++p_count;
        }
        if (n == n_steps) break;

        const auto k2 = dyn(axpy(s, 0.5 * dt, k1.rate));
        const auto k3 = dyn(axpy(s, 0.5 * dt, k2.rate));
        const auto k4 = dyn(axpy(s, dt, k3.rate));
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] += dt / 6.0 * (k1.rate[i] + 2.0 * k2.rate[i] + 2.0 * k3.rate[i] + k4.rate[i]);
        dyn.fhat_x = k1.fhat_x;
        dyn.fhat_y = k1.fhat_y;

        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || std::abs(s[0]) > 100.0 * cfg.d ||
            std::abs(s[1]) > 100.0 * cfg.d)
            throw numerical_error("divergent integration");
    }

    res.a_over_d = std::sqrt(2.0) * std_dev(ys) / cfg.d;
    res.a_over_d_il = std::sqrt(2.0) * std_dev(xs) / cfg.d;
    res.f_osc_cf = crossing_frequency(ys, dt);
    res.f_osc_il = crossing_frequency(xs, dt);
    res.f_hat = u > 0.0 ? res.f_osc_cf * cfg.d / u : 0.0;
    if (p_count > 0) {
        res.mean_power_fluid = p_fluid / static_cast<double>(p_count);
        res.mean_power_damping = p_damp / static_cast<double>(p_count);
    }
    return res;
}

namespace {

LockInPoint sweep_point(const RigidCylinderConfig& cfg, const EmpiricalParameters& params,
                        double urn, double periods) {
    const double u = urn * cfg.fn_cf * cfg.d;
    const double dt = rigid_cylinder_time_step(cfg, params, u);
    const double duration = periods / cfg.fn_cf;
    RigidRunOptions opts;
    opts.keep_every = 0;
    return {urn, simulate_rigid_cylinder(cfg, params, u, duration, dt, opts)};
}

}  // namespace

std::vector<LockInPoint> lock_in_sweep(const RigidCylinderConfig& cfg,
                                       const EmpiricalParameters& params,
                                       const std::vector<double>& reduced_velocities,
                                       double periods) {
    std::vector<LockInPoint> out(reduced_velocities.size());
    parallel_for(reduced_velocities.size(), [&](std::size_t i) {
        out[i] = sweep_point(cfg, params, reduced_velocities[i], periods);
    });
    return out;
}

std::vector<LockInPoint> lock_in_sweep_serial(const RigidCylinderConfig& cfg,
                                              const EmpiricalParameters& params,
                                              const std::vector<double>& reduced_velocities,
                                              double periods) {
    std::vector<LockInPoint> out;
    out.reserve(reduced_velocities.size());
    for (double urn : reduced_velocities) out.push_back(sweep_point(cfg, params, urn, periods));
    return out;
}

}  // namespace vivclust::viv
