#include "vivclust/viv/riser_sim.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace vivclust::viv {

namespace {

// Current interpolated in depth at every profile time, for a fixed set of depths.
struct DepthTable {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> values;  // [time][point]
};

Vec2 interpolate_depth(const CurrentProfile& p, Eigen::Index it, double depth) {
    double d0 = 0.0, d1 = 0.0;
    Vec2 v0 = Vec2::Zero(), v1 = Vec2::Zero();
    bool have_above = false, have_below = false;
    for (Eigen::Index id = 0; id < static_cast<Eigen::Index>(p.depths.size()); ++id) {
        if (!p.has_sample(it, id)) continue;
        const double d = p.depths[id];
        const Vec2 v(p.u_east(it, id), p.u_north(it, id));
        if (d <= depth) {
            d0 = d;
            v0 = v;
            have_above = true;
        } else if (!have_below) {
            d1 = d;
            v1 = v;
            have_below = true;
        }
    }
    if (have_above && have_below) {
        const double w = (depth - d0) / (d1 - d0);
        return (1.0 - w) * v0 + w * v1;
    }
    if (have_above) return v0;
    if (have_below) return v1;
    return Vec2::Zero();
}

DepthTable tabulate(const CurrentProfile& p, const std::vector<double>& depths) {
    DepthTable t;
    t.times = p.times;
    for (Eigen::Index it = 0; it < static_cast<Eigen::Index>(p.times.size()); ++it) {
        std::vector<Vec2> row;
        row.reserve(depths.size());
        for (double d : depths) row.push_back(interpolate_depth(p, it, d));
        t.values.push_back(std::move(row));
    }
    return t;
}

// Value and time slope of the tabulated current at point i.
std::pair<Vec2, Vec2> sample_table(const DepthTable& t, std::size_t i, double time) {
    if (t.times.empty()) return {Vec2::Zero(), Vec2::Zero()};
    if (t.times.size() == 1 || time <= t.times.front()) return {t.values.front()[i], Vec2::Zero()};
    if (time >= t.times.back()) return {t.values.back()[i], Vec2::Zero()};
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(t.times.begin(), t.times.end(), time) - t.times.begin());
    const std::size_t lo = hi - 1;
    const double span = t.times[hi] - t.times[lo];
    const double w = (time - t.times[lo]) / span;
    const Vec2 v = (1.0 - w) * t.values[lo][i] + w * t.values[hi][i];
    return {v, (t.values[hi][i] - t.values[lo][i]) / span};
}

// Prescribed top motion with differentiated companions, linearly interpolated.
struct TopMotion {
    double t0 = 0.0, dt = 1.0;
    std::vector<double> d, v, a;

    explicit TopMotion(const TimeSeries& ts) : t0(ts.t0), dt(ts.dt), d(ts.values) {
        v = dsp::central_difference(d, dt);
        a.assign(d.size(), 0.0);
        for (std::size_t i = 1; i + 1 < d.size(); ++i)
            a[i] = (d[i + 1] - 2.0 * d[i] + d[i - 1]) / (dt * dt);
        if (d.size() > 2) {
            a.front() = a[1];
            a.back() = a[d.size() - 2];
        }
    }

    static double lerp(const std::vector<double>& x, double s) {
        if (x.empty()) return 0.0;
        if (s <= 0.0) return x.front();
        const auto i = static_cast<std::size_t>(s);
        if (i + 1 >= x.size()) return x.back();
        const double w = s - static_cast<double>(i);
        return (1.0 - w) * x[i] + w * x[i + 1];
    }
    double disp(double t) const { return lerp(d, (t - t0) / dt); }
    double vel(double t) const { return lerp(v, (t - t0) / dt); }
    double acc(double t) const { return lerp(a, (t - t0) / dt); }
};

std::vector<double> strip_depths(const BeamModel& m) {
    std::vector<double> out;
    for (double z : m.elem_mid_z) out.push_back(m.water_depth - z);
    return out;
}

double max_shedding_frequency(const BeamModel& m, const DepthTable& table,
                              const EmpiricalParameters& params) {
    double f = 0.0;
    for (const auto& row : table.values)
        for (int e = 0; e < m.n_elements(); ++e)
            if (m.elem_submerged[e]) f = std::max(f, params.f0_y * row[e].norm() / m.elem_diameter[e]);
    return f;
}

double ramp_factor(double t, double t_ramp) {
    if (t_ramp <= 0.0 || t >= t_ramp) return 1.0;
    return std::max(t, 0.0) / t_ramp;
}

}  // namespace

Vec2 current_at(const CurrentProfile& profile, double depth, double t) {
    const DepthTable table = tabulate(profile, {depth});
    return sample_table(table, 0, t).first;
}

double riser_time_step(const BeamModel& model, const RiserLoadCase& load,
                       const EmpiricalParameters& params, const RiserSimOptions& options) {
    if (!(options.output_dt > 0.0) || !(options.max_dt > 0.0))
        throw validation_error("output_dt and max_dt must be positive");
    const double f = max_shedding_frequency(model, tabulate(load.current, strip_depths(model)), params);
    double dt = options.max_dt;
    if (f > 0.0) dt = std::min(dt, 1.0 / (200.0 * f));
    const double per_output = std::ceil(options.output_dt / dt - 1e-9);
    return options.output_dt / per_output;
}

double dominant_frequency(const std::vector<std::vector<double>>& series, double dt,
                          double f_min) {
    if (series.empty() || series.front().size() < 64) return 0.0;
    const std::size_t seg = dsp::segment_length_for(series.front().size(), 1024);
    std::vector<double> total;
    std::vector<double> freqs;
    for (const auto& s : series) {
        const auto p = dsp::welch(s, dt, seg, 0.5);
        if (total.empty()) {
            total.assign(p.psd.size(), 0.0);
            freqs = p.freqs;
        }
        for (std::size_t k = 0; k < p.psd.size(); ++k) total[k] += p.psd[k];
    }
    std::size_t first = 1;
    while (first + 1 < total.size() && freqs[first] < f_min) ++first;
    std::size_t best = first;
    for (std::size_t k = first; k < total.size(); ++k)
        if (total[k] > total[best]) best = k;
    return total[best] > 0.0 ? freqs[best] : 0.0;
}

NewmarkStepper::NewmarkStepper(const Eigen::SparseMatrix<double>& M,
                               const Eigen::SparseMatrix<double>& C,
                               const Eigen::SparseMatrix<double>& K, double dt)
    : M_(M), C_(C), dt_(dt) {
    if (!(dt > 0.0)) throw validation_error("Newmark step must be positive");
    a0_ = 1.0 / (kBeta * dt * dt);
    a1_ = kGamma / (kBeta * dt);
    a2_ = 1.0 / (kBeta * dt);
    a3_ = 1.0 / (2.0 * kBeta) - 1.0;
    a4_ = kGamma / kBeta - 1.0;
    a5_ = dt / 2.0 * (kGamma / kBeta - 2.0);
    const Eigen::SparseMatrix<double> K_eff = K + a0_ * M + a1_ * C;
    solver_.compute(K_eff);
    mass_solver_.compute(M);
    if (solver_.info() != Eigen::Success || mass_solver_.info() != Eigen::Success)
        throw numerical_error("Newmark system factorisation failed");
}

Eigen::VectorXd NewmarkStepper::initial_acceleration(const Eigen::VectorXd& u,
                                                     const Eigen::VectorXd& v,
                                                     const Eigen::VectorXd& f,
                                                     const Eigen::SparseMatrix<double>* K) const {
    Eigen::VectorXd r = f - C_ * v;
    if (K) r -= *K * u;
    return mass_solver_.solve(r);
}

void NewmarkStepper::step(Eigen::VectorXd& u, Eigen::VectorXd& v, Eigen::VectorXd& a,
                          const Eigen::VectorXd& f_next) const {
    const Eigen::VectorXd rhs = f_next + M_ * (a0_ * u + a2_ * v + a3_ * a) +
                                C_ * (a1_ * u + a4_ * v + a5_ * a);
    const Eigen::VectorXd u1 = solver_.solve(rhs);
    const Eigen::VectorXd acc1 = a0_ * (u1 - u) - a2_ * v - a3_ * a;
    v += dt_ * ((1.0 - kGamma) * a + kGamma * acc1);
    a = acc1;
    u = u1;
}

double mechanical_energy(const Eigen::SparseMatrix<double>& M, const Eigen::SparseMatrix<double>& K,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return 0.5 * v.dot(M * v) + 0.5 * u.dot(K * u);
}

SimResult simulate_riser(const BeamModel& model, const RiserLoadCase& load,
                         const EmpiricalParameters& params, const RiserSimOptions& options) {
    params.validate();
    if (!(options.duration > 0.0)) throw validation_error("duration must be positive");
    if (model.frequencies.size() < std::max(options.damping_mode_low, options.damping_mode_high))
        throw validation_error("beam model has too few modes for the damping fit");

    const int ne = model.n_elements();
    const int nf = model.n_free();
    const auto depths = strip_depths(model);
    const DepthTable table = tabulate(load.current, depths);
    const double f_max = max_shedding_frequency(model, table, params);

    double dt = options.dt;
    if (dt <= 0.0) dt = riser_time_step(model, load, params, options);
    if (f_max > 0.0 && dt > 1.0 / (200.0 * f_max) * (1.0 + 1e-12))
        throw validation_error("dt exceeds 1/(200 f_strouhal) for the fastest strip");
    const auto out_every = static_cast<std::size_t>(std::llround(options.output_dt / dt));
    if (out_every == 0 || std::abs(static_cast<double>(out_every) * dt - options.output_dt) > 1e-9)
        throw validation_error("output_dt must be a whole number of time steps");
    const auto n_steps = static_cast<std::size_t>(std::llround(options.duration / dt));

    // Rayleigh damping matched at two modes.
    const double wa = 2.0 * kPi * model.frequencies[options.damping_mode_low - 1];
    const double wb = 2.0 * kPi * model.frequencies[options.damping_mode_high - 1];
    const double alpha = 2.0 * options.damping_ratio * wa * wb / (wa + wb);
    const double beta_r = 2.0 * options.damping_ratio / (wa + wb);
    const Eigen::SparseMatrix<double> C = alpha * model.mass + beta_r * model.stiffness;

    const NewmarkStepper stepper(model.mass, C, model.stiffness, dt);

    const SwayLoads sway = sway_loads(model);
    const TopMotion top[2] = {TopMotion(load.top_x), TopMotion(load.top_y)};

    std::vector<Probe> strip_probe;
    for (int e = 0; e < ne; ++e) strip_probe.push_back(make_probe(model, model.elem_mid_z[e]));
    std::vector<Probe> out_probe;
    for (const auto& [id, z] : options.probes) out_probe.push_back(make_probe(model, z));

    Eigen::VectorXd u[2], v[2], a[2];
    for (int ax = 0; ax < 2; ++ax) {
        u[ax] = Eigen::VectorXd::Zero(nf);
        v[ax] = Eigen::VectorXd::Zero(nf);
        const Eigen::VectorXd f0 =
            -sway.mass_coupling * top[ax].acc(0.0) - sway.stiffness_coupling * top[ax].disp(0.0);
        a[ax] = stepper.initial_acceleration(u[ax], v[ax], f0);
    }

    std::vector<double> phi_x(ne, 0.0), phi_y(ne, 0.0);
    std::vector<double> fhat_x(ne, params.f0_x), fhat_y(ne, params.f0_y);
    const double t_ramp = options.ramp_fraction * options.duration;
    const double t_stat = options.discard_fraction * options.duration;
    const double ca = std::cos(options.main_angle), sa = std::sin(options.main_angle);
    double d_max = 0.0;
    for (double d : model.elem_diameter) d_max = std::max(d_max, d);

    SimResult res;
    res.dt = dt;
    res.steps = n_steps;
    res.node_z = model.node_z;
    const std::size_t n_out = n_steps / out_every;
    for (std::size_t p = 0; p < options.probes.size(); ++p) {
        ProbeSeries ps;
        ps.z = options.probes[p].second;
        ps.acc_x.dt = ps.acc_y.dt = options.output_dt;
        ps.acc_x.values.reserve(n_out);
        ps.acc_y.values.reserve(n_out);
        res.probes[options.probes[p].first] = std::move(ps);
    }
    std::vector<ProbeSeries*> probe_out;
    for (const auto& [id, z] : options.probes) probe_out.push_back(&res.probes[id]);

    const int n_nodes = ne + 1;
    std::vector<std::vector<double>> main_hist(n_nodes), cross_hist(n_nodes);

    Eigen::VectorXd force[2] = {Eigen::VectorXd::Zero(nf), Eigen::VectorXd::Zero(nf)};
    auto record = [&](std::size_t n) {
        const double t = static_cast<double>(n) * dt;
        for (std::size_t p = 0; p < out_probe.size(); ++p) {
            const double s = probe_out[p]->z / model.length;
            probe_out[p]->acc_x.values.push_back(out_probe[p].eval(a[0]) + s * top[0].acc(t));
            probe_out[p]->acc_y.values.push_back(out_probe[p].eval(a[1]) + s * top[1].acc(t));
        }
        if (t + 1e-9 < t_stat) return;
        res.t.push_back(t);
        for (int i = 0; i < n_nodes; ++i) {
            const int f = model.full_to_free[2 * i];
            const double x = f >= 0 ? u[0][f] : 0.0;
            const double y = f >= 0 ? u[1][f] : 0.0;
            main_hist[i].push_back(ca * x + sa * y);
            cross_hist[i].push_back(-sa * x + ca * y);
        }
    };

    for (std::size_t n = 0; n < n_steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        if (n % out_every == 0) record(n);

        force[0].setZero();
        force[1].setZero();
        if (options.hydro) {
            const double ramp = ramp_factor(t, t_ramp);
            const double ramp_rate = (t_ramp > 0.0 && t < t_ramp) ? 1.0 / t_ramp : 0.0;
            for (int e = 0; e < ne; ++e) {
                if (!model.elem_submerged[e]) continue;
                const Probe& pr = strip_probe[e];
                const double s = model.elem_mid_z[e] / model.length;
                const auto [uc, uc_rate] = sample_table(table, static_cast<std::size_t>(e), t);
                StripState st;
                st.u_n = ramp * uc;
                st.u_n_dot = ramp_rate * uc + ramp * uc_rate;
                st.r_dot_n = Vec2(pr.eval(v[0]) + s * top[0].vel(t), pr.eval(v[1]) + s * top[1].vel(t));
                st.r_ddot_n = Vec2(pr.eval(a[0]) + s * top[0].acc(t), pr.eval(a[1]) + s * top[1].acc(t));
                st.phi_exc_x = phi_x[e];
                st.phi_exc_y = phi_y[e];
                st.d = model.elem_diameter[e];
                const Vec2 p = hydro_force(st, params, options.rho).excitation();

                const Vec2 vrel = st.v_n();
                const double speed = vrel.norm();
                if (speed > 0.0) {
                    const LocalFrame frame = local_frame(vrel);
                    const double w_y = 2.0 * kPi * speed * fhat_y[e] / st.d;
                    const double w_x = 2.0 * kPi * speed * fhat_x[e] / st.d;
                    const double ph_y = instantaneous_velocity_phase(
                        st.r_dot_n.dot(frame.cross_flow), st.r_ddot_n.dot(frame.cross_flow), w_y, phi_y[e]);
                    const double ph_x = instantaneous_velocity_phase(
                        st.r_dot_n.dot(frame.in_line), st.r_ddot_n.dot(frame.in_line), w_x, phi_x[e]);
                    fhat_y[e] = excitation_frequency_hat(ph_y - phi_y[e], params.f0_y, params.delta_fy(),
                                                         params.fy_range);
                    fhat_x[e] = excitation_frequency_hat(ph_x - phi_x[e], params.f0_x, params.delta_fx(),
                                                         params.fx_range);
                    phi_y[e] += 2.0 * kPi * speed / st.d * fhat_y[e] * dt;
                    phi_x[e] += 2.0 * kPi * speed / st.d * fhat_x[e] * dt;
                }

                // consistent nodal loads of a uniform strip load
                const double l = model.elem_length[e];
                const double shares[4] = {l / 2.0, l * l / 12.0, l / 2.0, -l * l / 12.0};
                for (int k = 0; k < 4; ++k) {
                    const int f = model.full_to_free[2 * e + k];
                    if (f < 0) continue;
                    force[0][f] += p.x() * shares[k];
                    force[1][f] += p.y() * shares[k];
                }
            }
        }

        const double t1 = t + dt;
        for (int ax = 0; ax < 2; ++ax) {
            const Eigen::VectorXd f1 = force[ax] - sway.mass_coupling * top[ax].acc(t1) -
                                       sway.stiffness_coupling * top[ax].disp(t1);
            stepper.step(u[ax], v[ax], a[ax], f1);
            const double peak = u[ax].cwiseAbs().maxCoeff();
            if (!std::isfinite(peak) || peak > 100.0 * d_max)
                throw numerical_error("divergent integration");
        }
    }

    // statistics over the retained window
    res.std_main.assign(n_nodes, 0.0);
    res.std_cross.assign(n_nodes, 0.0);
    auto std_of = [](const std::vector<double>& x) {
        if (x.empty()) return 0.0;
        const double m = dsp::mean(x);
        double s = 0.0;
        for (double v : x) s += (v - m) * (v - m);
        return std::sqrt(s / static_cast<double>(x.size()));
    };
    int arg_cross = 0;
    for (int i = 0; i < n_nodes; ++i) {
        res.std_main[i] = std_of(main_hist[i]);
        res.std_cross[i] = std_of(cross_hist[i]);
        res.max_disp_std_main = std::max(res.max_disp_std_main, res.std_main[i]);
        if (res.std_cross[i] > res.std_cross[arg_cross]) arg_cross = i;
    }
    res.max_disp_std_cross = res.std_cross[arg_cross];
    const int e_at = std::min(arg_cross, ne - 1);
    res.a_over_d = std::sqrt(2.0) * res.max_disp_std_cross / model.elem_diameter[e_at];
    res.dominant_freq = dominant_frequency(main_hist, options.output_dt, options.f_min);
    res.dominant_freq_cf = dominant_frequency(cross_hist, options.output_dt, options.f_min);
    if (options.keep_displacement) {
        const std::size_t ns = res.t.size();
        res.disp_main.assign(ns, std::vector<double>(n_nodes));
        res.disp_cross.assign(ns, std::vector<double>(n_nodes));
        for (std::size_t k = 0; k < ns; ++k)
            for (int i = 0; i < n_nodes; ++i) {
                res.disp_main[k][i] = main_hist[i][k];
                res.disp_cross[k][i] = cross_hist[i][k];
            }
    }
    return res;
}

}  // namespace vivclust::viv
