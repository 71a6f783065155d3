#include "test_util.hpp"

#include "vivclust/core/error.hpp"
#include "vivclust/core/parallel.hpp"
#include "vivclust/viv/beam.hpp"
#include "vivclust/viv/evaluate.hpp"
#include "vivclust/viv/hydro.hpp"
#include "vivclust/viv/rigid_cylinder.hpp"
#include "vivclust/viv/riser_sim.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vivclust;
using namespace vivclust::viv;
using vivclust::testing::uniform_current;

namespace {

constexpr double kRho = 1025.0;

// Uniform string-like riser: one segment, no weight or added mass in the model.
RiserProperties string_riser(double tension, double ei = 1e-3) {
    RiserProperties r;
    r.length = 500.0;
    r.water_depth = 500.0;
    r.top_tension = tension;
    r.segments = {{0.0, 500.0, 0.5, 400.0, 1e10, ei}};
    return r;
}

BeamOptions string_options() {
    BeamOptions o;
    o.c_m = 1.0;
    o.include_weight = false;
    return o;
}

const BeamModel& fixture_model() {
    static const BeamModel m = build_beam_model(helland_hansen_fixture().riser);
    return m;
}

}  // namespace

TEST(Hydro, StillWaterAtRestHasNoForce) {
    StripState s;
    s.u_n = Vec2::Zero();
    EXPECT_EQ(hydro_force(s, {}, kRho).total().norm(), 0.0);
}

TEST(Hydro, FixedCylinderCrossFlowForce) {
    const double U = 0.8, d = 1.13;
    StripState s;
    s.u_n = Vec2(U, 0.0);
    s.d = d;
    s.phi_exc_y = 0.0;
    EmpiricalParameters p;
    const HydroForce f = hydro_force(s, p, kRho);
    EXPECT_NEAR(f.vortex_y.norm(), 0.5 * kRho * d * p.c_vy * U * U, 1e-9);
    EXPECT_NEAR(f.vortex_y.x(), 0.0, 1e-12);
    EXPECT_NEAR(f.drag.x(), 0.5 * kRho * d * p.c_d * U * U, 1e-9);
    EXPECT_EQ(f.froude_krylov.norm(), 0.0);
}

TEST(Hydro, VortexForceBoundOverPhases) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    EmpiricalParameters p;
    for (int i = 0; i < 2000; ++i) {
        StripState s;
        s.u_n = Vec2(u(rng), u(rng));
        s.r_dot_n = Vec2(u(rng), u(rng)) * 0.3;
        s.phi_exc_x = 3.0 * u(rng);
        s.phi_exc_y = 3.0 * u(rng);
        s.d = 0.5 + std::abs(u(rng));
        const HydroForce f = hydro_force(s, p, kRho);
        const double q = 0.5 * kRho * s.d * s.v_n().squaredNorm();
        EXPECT_LE(f.vortex_y.norm(), q * p.c_vy * (1.0 + 1e-12));
        EXPECT_LE(f.vortex_x.norm(), q * p.c_vx * (1.0 + 1e-12));
    }
}

TEST(Hydro, LocalFrameIsRightHanded) {
    const LocalFrame f = local_frame(Vec2(0.0, 2.0));
    EXPECT_NEAR(f.in_line.y(), 1.0, 1e-15);
    EXPECT_NEAR(f.cross_flow.x(), -1.0, 1e-15);
    const LocalFrame g = local_frame(Vec2::Zero());
    EXPECT_EQ(g.in_line, Vec2::UnitX());
}

TEST(Hydro, ParameterValidation) {
    EmpiricalParameters p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.delta_fy(), 0.15, 1e-15);
    EXPECT_NEAR(p.delta_fx(), 0.25, 1e-15);
    p.fy_range = {0.3, 0.4};
    EXPECT_THROW(p.validate(), Error);
}

TEST(Phase, SynchronisedAndBoundedRates) {
    EmpiricalParameters p;
    StripState s;
    s.u_n = Vec2(0.5, 0.0);
    s.d = 1.0;
    const double dt = 0.01;
    const double base = 2.0 * kPi * 0.5 / 1.0;
    EXPECT_NEAR(advance_phase_y(s, 0.0, dt, p) / dt, base * p.f0_y, 1e-12);
    EXPECT_NEAR(advance_phase_y(s, kPi / 2.0, dt, p) / dt, base * 0.4, 1e-12);
    EXPECT_NEAR(advance_phase_y(s, -kPi / 2.0, dt, p) / dt, base * 0.125, 1e-12);
    for (double th = -kPi; th <= kPi; th += 0.01)
        EXPECT_LE(advance_phase_y(s, th, dt, p) / dt, base * p.fy_range.max * (1.0 + 1e-12));
    s.u_n = Vec2::Zero();
    s.phi_exc_y = 1.3;
    EXPECT_EQ(advance_phase_y(s, 0.4, dt, p), 1.3);
}

TEST(Phase, FrequencyHatClamps) {
    const FrequencyRange r{0.125, 0.4};
    EXPECT_EQ(excitation_frequency_hat(0.0, 0.25, 0.15, r), 0.25);
    EXPECT_EQ(excitation_frequency_hat(kPi / 2.0, 0.25, 0.15, r), 0.4);
    EXPECT_EQ(excitation_frequency_hat(-kPi / 2.0, 0.25, 0.15, r), 0.125);
}

TEST(Phase, VelocityPhaseIdentities) {
    const double w = 1.7;
    for (double t = 0.0; t < 10.0; t += 0.37) {
        const double ph = instantaneous_velocity_phase(std::cos(w * t), -w * std::sin(w * t), w, 0.0);
        const double diff = std::remainder(ph - w * t, 2.0 * kPi);
        EXPECT_NEAR(diff, 0.0, 1e-12);
    }
    EXPECT_EQ(instantaneous_velocity_phase(1.0, 0.0, 2.0, 9.0), 0.0);
    EXPECT_NEAR(instantaneous_velocity_phase(0.0, -1.0, 2.0, 9.0), kPi / 2.0, 1e-15);
    EXPECT_EQ(instantaneous_velocity_phase(0.0, 0.0, 2.0, 9.0), 9.0);
}

TEST(RigidCylinder, NoFlowNoMotion) {
    RigidCylinderConfig cfg;
    EmpiricalParameters p;
    const auto r = simulate_rigid_cylinder(cfg, p, 0.0, 100.0, 0.005);
    EXPECT_EQ(r.a_over_d, 0.0);
    EXPECT_EQ(r.a_over_d_il, 0.0);
}

TEST(RigidCylinder, LockInInvariants) {
    RigidCylinderConfig cfg;
    EmpiricalParameters p;
    const double u = 5.0 * cfg.fn_cf * cfg.d;
    const double dt = rigid_cylinder_time_step(cfg, p, u);
    const auto r = simulate_rigid_cylinder(cfg, p, u, 300.0, dt);
    EXPECT_GT(r.a_over_d, 0.3);
    EXPECT_LE(r.max_force_ratio_y, 1.0 + 1e-12);
    EXPECT_LE(r.max_force_ratio_x, 1.0 + 1e-12);
    EXPECT_LE(r.max_phase_rate_ratio, 1.0 + 1e-12);
    EXPECT_GE(r.f_hat, p.fy_range.min);
    EXPECT_LE(r.f_hat, p.fy_range.max);
    EXPECT_NEAR(r.f_osc_il / r.f_osc_cf, 2.0, 0.2);
    EXPECT_NEAR(r.mean_power_fluid / r.mean_power_damping, 1.0, 0.05);
    const auto half = simulate_rigid_cylinder(cfg, p, u, 300.0, dt / 2.0);
    EXPECT_LT(std::abs(half.a_over_d - r.a_over_d) / r.a_over_d, 0.02);
}

TEST(RigidCylinder, CoarseStepRejected) {
    RigidCylinderConfig cfg;
    EXPECT_THROW(simulate_rigid_cylinder(cfg, {}, 5.0, 300.0, 0.1), Error);
}

TEST(RigidCylinder, SweepParallelMatchesSerial) {
    set_num_threads(3);
    RigidCylinderConfig cfg;
    const std::vector<double> urn{3.0, 5.0, 7.5};
    const auto a = lock_in_sweep(cfg, {}, urn, 60.0);
    const auto b = lock_in_sweep_serial(cfg, {}, urn, 60.0);
    for (std::size_t i = 0; i < urn.size(); ++i) {
        EXPECT_EQ(a[i].result.a_over_d, b[i].result.a_over_d);
        EXPECT_EQ(a[i].result.f_osc_cf, b[i].result.f_osc_cf);
    }
}

TEST(Beam, FixtureFirstModeInPublishedBand) {
    const auto fx = helland_hansen_fixture();
    for (double T : {3.0e6, 3.5e6, 4.0e6}) {
        auto props = fx.riser;
        props.top_tension = T;
        const BeamModel m = build_beam_model(props);
        EXPECT_GE(m.frequencies[0], fx.eigen.at(1).f_low) << T;
        EXPECT_LE(m.frequencies[0], fx.eigen.at(1).f_high) << T;
    }
}

TEST(Beam, StringLimit) {
    const double T = 2.0e6;
    const BeamModel m = build_beam_model(string_riser(T), string_options());
    for (int n = 1; n <= 5; ++n) {
        const double analytic = n / (2.0 * 500.0) * std::sqrt(T / 400.0);
        EXPECT_NEAR(m.frequencies[n - 1], analytic, 0.01 * analytic) << "mode " << n;
    }
}

TEST(Beam, TensionScaling) {
    const double ei = 1e6;  // still tension dominated
    const double f1 = build_beam_model(string_riser(1e6, ei), string_options()).frequencies[0];
    const double f2 = build_beam_model(string_riser(2e6, ei), string_options()).frequencies[0];
    EXPECT_NEAR(f2 / f1, std::sqrt(2.0), 0.05 * std::sqrt(2.0));
}

TEST(Beam, ModesAreMassOrthonormalAndPinned) {
    const BeamModel& m = fixture_model();
    const Eigen::MatrixXd G = m.modes.transpose() * (m.mass * m.modes);
    EXPECT_LT((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(m.mode_value(0, 0.0), 0.0);
    EXPECT_EQ(m.mode_value(0, m.length), 0.0);
    const Probe p = make_probe(m, 0.5 * m.length);
    EXPECT_NEAR(p.eval(m.modes.col(0)), m.mode_value(0, 0.5 * m.length), 1e-12);
}

TEST(Beam, InvalidModels) {
    const auto fx = helland_hansen_fixture();
    BeamOptions few;
    few.n_elements = 10;
    EXPECT_THROW(build_beam_model(fx.riser, few), Error);
    auto slack = fx.riser;
    slack.top_tension = 1e5;  // below the submerged weight
    EXPECT_THROW(build_beam_model(slack), Error);
}

TEST(Beam, HermiteShapesInterpolate) {
    const auto n0 = hermite_shape(0.0, 2.0), n1 = hermite_shape(1.0, 2.0);
    EXPECT_EQ(n0[0], 1.0);
    EXPECT_EQ(n0[2], 0.0);
    EXPECT_EQ(n1[2], 1.0);
    EXPECT_EQ(n1[0], 0.0);
    const auto m = hermite_shape(0.5, 2.0);
    EXPECT_NEAR(m[0] + m[2], 1.0, 1e-15);  // rigid translation
}

TEST(Newmark, UndampedFreeVibrationConservesEnergy) {
    const BeamModel& m = fixture_model();
    const Eigen::SparseMatrix<double> C(m.n_free(), m.n_free());
    const double T1 = 1.0 / m.frequencies[0];
    const NewmarkStepper stepper(m.mass, C, m.stiffness, T1 / 40.0);
    // first mode plus some of the third, so energy moves between modes and states
    Eigen::VectorXd u = m.modes.col(0) * 2.0 + m.modes.col(2) * 0.5;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m.n_free());
    const Eigen::VectorXd f = Eigen::VectorXd::Zero(m.n_free());
    Eigen::VectorXd a = stepper.initial_acceleration(u, v, f, &m.stiffness);
    const double e0 = mechanical_energy(m.mass, m.stiffness, u, v);
    double worst = 0.0;
    for (int i = 0; i < 100 * 40; ++i) {
        stepper.step(u, v, a, f);
        worst = std::max(worst, std::abs(mechanical_energy(m.mass, m.stiffness, u, v) - e0) / e0);
    }
    EXPECT_LT(worst, 0.005);
}

TEST(RiserSim, NoCurrentNoTopMotion) {
    RiserLoadCase load{uniform_current(0.0, 0.0), {}, {}};
    RiserSimOptions o;
    o.duration = 200.0;
    const SimResult r = simulate_riser(fixture_model(), load, {}, o);
    EXPECT_LT(r.max_disp_std_cross, 1e-6);
    EXPECT_LT(r.max_disp_std_main, 1e-6);
}

TEST(RiserSim, TimeStepRules) {
    RiserLoadCase load{uniform_current(0.6, 0.0), {}, {}};
    RiserSimOptions o;
    const double dt = riser_time_step(fixture_model(), load, {}, o);
    EXPECT_LE(dt, 1.0 / (200.0 * 0.25 * 0.6 / kBareOuterDiameter) * (1.0 + 1e-12));
    const double steps = o.output_dt / dt;
    EXPECT_NEAR(steps, std::round(steps), 1e-9);
    o.dt = 0.05;
    o.duration = 100.0;
    EXPECT_THROW(simulate_riser(fixture_model(), load, {}, o), Error);
}

TEST(RiserSim, CurrentInterpolation) {
    CurrentProfile c;
    c.depths = {10.0, 30.0, 50.0};
    c.times = {0.0, 100.0};
    c.u_east.resize(2, 3);
    c.u_north = Eigen::MatrixXd::Zero(2, 3);
    c.u_east << 1.0, 2.0, 3.0, 3.0, std::nan(""), 5.0;
    EXPECT_NEAR(current_at(c, 20.0, 0.0).x(), 1.5, 1e-12);
    EXPECT_NEAR(current_at(c, 0.0, 0.0).x(), 1.0, 1e-12);
    EXPECT_NEAR(current_at(c, 80.0, 0.0).x(), 3.0, 1e-12);
    EXPECT_NEAR(current_at(c, 30.0, 100.0).x(), 4.0, 1e-12);  // gap bridged
    EXPECT_NEAR(current_at(c, 10.0, 500.0).x(), 3.0, 1e-12);  // clamped in time
}

TEST(RiserSim, DominantFrequencyOfSeries) {
    std::vector<std::vector<double>> s(2, std::vector<double>(4096));
    for (std::size_t i = 0; i < 4096; ++i) {
        s[0][i] = std::sin(2.0 * kPi * 0.1 * 0.5 * i);
        s[1][i] = 0.5 * std::sin(2.0 * kPi * 0.2 * 0.5 * i);
    }
    EXPECT_NEAR(dominant_frequency(s, 0.5), 0.1, 1.0 / 512.0);
}

TEST(RiserSim, UniformFlowRespondsNearSheddingFrequency) {
    RiserLoadCase load{uniform_current(0.67, 0.0), {}, {}};
    RiserSimOptions o;
    o.duration = 600.0;
    const SimResult r = simulate_riser(fixture_model(), load, {}, o);
    const double f_st = strouhal_frequency(0.67, kBuoyancyOuterDiameter, 0.25);
    EXPECT_NEAR(f_st, 0.148, 5e-4);
    EXPECT_NEAR(r.dominant_freq_cf, f_st, 0.3 * f_st);
    EXPECT_GT(r.max_disp_std_cross, 0.01);
}

TEST(RiserSim, ShearedFlowTravels) {
    CurrentProfile c = uniform_current(0.0, 0.0);
    for (Eigen::Index j = 0; j < c.u_east.cols(); ++j)
        c.u_east.col(j).setConstant(0.7 - 0.6 * c.depths[static_cast<std::size_t>(j)] / 670.46);
    RiserLoadCase load{c, {}, {}};
    RiserSimOptions o;
    o.duration = 600.0;
    o.keep_displacement = true;
    const SimResult r = simulate_riser(fixture_model(), load, {}, o);
    // envelope varies along z
    const auto [lo, hi] = std::minmax_element(r.std_cross.begin() + 5, r.std_cross.end() - 5);
    EXPECT_GT(*hi, 2.0 * *lo);
    // lag of the best cross-correlation between two stations
    const std::size_t na = r.node_z.size() / 3, nb = 2 * r.node_z.size() / 3;
    const std::size_t n = r.disp_cross.size();
    int best_lag = 0;
    double best = -1.0;
    for (int lag = -20; lag <= 20; ++lag) {
        double s = 0.0;
        for (std::size_t i = 20; i + 20 < n; ++i)
            s += r.disp_cross[i][na] * r.disp_cross[static_cast<std::size_t>(static_cast<int>(i) + lag)][nb];
        if (s > best) {
            best = s;
            best_lag = lag;
        }
    }
    EXPECT_NE(best_lag, 0);
}

TEST(Evaluate, Counting) {
    std::vector<PredictionPair> exact;
    for (int i = 0; i < 6; ++i) exact.push_back({"e" + std::to_string(i), i % 2, 0.3, 0.3, 0.1, 0.1});
    for (const auto& row : evaluate_predictions(exact)) {
        EXPECT_EQ(row.pct_disp_error, 0.0);
        EXPECT_EQ(row.pct_freq_error, 0.0);
    }
    std::vector<PredictionPair> four(4, {"x", 2, 0.3, 0.3, 0.1, 0.1});
    four[1].predicted_disp = 0.6;
    four[2].predicted_freq = 0.15;
    four[3].measured_disp = 0.0;
    const auto rows = evaluate_predictions(four);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].disp_errors, 2u);
    EXPECT_EQ(rows[0].undefined_ratio, 1u);
    EXPECT_EQ(rows[0].pct_disp_error, 50.0);
    EXPECT_EQ(rows[0].pct_freq_error, 25.0);
    EXPECT_THROW(evaluate_predictions({}), Error);
}

TEST(Evaluate, InjectedBiasesAreRecovered) {
    // cluster k gets exactly k biased cases out of 10
    std::vector<PredictionPair> pairs;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 10; ++i) {
            const bool biased = i < k;
            pairs.push_back({"c", k, biased ? 0.9 : 0.31, 0.3, biased ? 0.2 : 0.11, 0.1});
        }
    const auto rows = evaluate_predictions(pairs);
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(rows[k].cluster, k);
        EXPECT_EQ(rows[k].pct_disp_error, 10.0 * k);
        EXPECT_EQ(rows[k].pct_freq_error, 10.0 * k);
    }
}
