#include "test_util.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"
#include "vivclust/response/classify.hpp"
#include "vivclust/response/modal.hpp"
#include "vivclust/response/spectral.hpp"
#include "vivclust/viv/hydro.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vivclust;
using namespace vivclust::response;
using vivclust::testing::blank_event;
using vivclust::testing::gaussian;
using vivclust::testing::sine;

namespace {

const viv::BeamModel& fixture_model() {
    static const viv::BeamModel m = viv::build_beam_model(helland_hansen_fixture().riser);
    return m;
}

const ModalBasis& fixture_basis() {
    static const ModalBasis b = make_modal_basis(fixture_model(), 5);
    return b;
}

// Unit-peak shape of mode j (0-based) at z.
double unit_shape(int j, double z) {
    const auto& b = fixture_basis();
    const double peak = b.shapes.col(j).cwiseAbs().maxCoeff();
    return b.values_at({z})(0, j) / peak;
}

struct ModeTerm {
    int mode;
    double amp;   // m at the antinode
    double freq;  // Hz
};

double displacement(const std::vector<ModeTerm>& terms, double z, double t) {
    double w = 0.0;
    for (const auto& m : terms) w += m.amp * unit_shape(m.mode, z) * std::sin(2.0 * kPi * m.freq * t);
    return w;
}

std::vector<AccRecord> sensor_acc(const std::vector<ModeTerm>& terms, std::size_t n, double dt) {
    std::vector<AccRecord> out;
    for (const auto& [id, z] : default_sensor_layout(fixture_basis().length)) {
        AccRecord r;
        r.z = z;
        r.acc.dt = dt;
        r.acc.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double a = 0.0;
            for (const auto& m : terms) {
                const double w = 2.0 * kPi * m.freq;
                a -= w * w * m.amp * unit_shape(m.mode, z) * std::sin(w * dt * i);
            }
            r.acc.values[i] = a;
        }
        out.push_back(r);
    }
    return out;
}

double relative_error(const ModalDisplacement& rec, const std::vector<ModeTerm>& terms) {
    double err = 0.0, ref = 0.0;
    const double L = rec.basis.length;
    for (int k = 1; k < 50; ++k) {
        const double z = L * k / 50.0;
        const auto w = rec.at(z);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double truth = displacement(terms, z, rec.t0 + rec.dt * i);
            err += (w[i] - truth) * (w[i] - truth);
            ref += truth * truth;
        }
    }
    return std::sqrt(err / ref);
}

}  // namespace

TEST(Kurtosis, SinusoidOverWholePeriods) {
    const auto s = sine(4000, 0.5, 2.0, 0.05);  // 100 periods
    EXPECT_NEAR(kurtosis(s), 1.5, 0.01);
}

TEST(Kurtosis, GaussianNoise) {
    EXPECT_NEAR(kurtosis(gaussian(100000, 42)), 3.0, 0.1);
}

TEST(Kurtosis, MixtureLiesBetween) {
    auto x = sine(20000, 0.5, 1.0, 0.05).values;
    const auto n = gaussian(x.size(), 9, 0.7);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += n[i];
    const double k = kurtosis(x);
    EXPECT_GT(k, 1.5);
    EXPECT_LT(k, 3.0);
}

TEST(Kurtosis, AffineInvariance) {
    const auto x = gaussian(5000, 3);
    const double k = kurtosis(x);
    for (double a : {-3.0, 0.01, 250.0})
        for (double b : {-10.0, 0.0, 4.5}) {
            std::vector<double> y;
            for (double v : x) y.push_back(a * v + b);
            EXPECT_NEAR(kurtosis(y), k, 1e-9);
        }
}

TEST(Kurtosis, ConstantSignalIsDegenerate) {
    EXPECT_THROW(kurtosis(std::vector<double>(10, 1.0)), Error);
}

TEST(Welch, SinusoidPeak) {
    const auto ts = sine(8192, 0.25, 1.0, 0.05);
    const auto s = welch_psd(ts, 1024);
    const auto p = spectrum_peak(s);
    EXPECT_NEAR(p.freq, 0.05, s.freqs[1]);
}

TEST(Welch, TwoTonesEqualPower) {
    auto ts = sine(8192, 0.25, 1.0, 0.05);
    const auto b = sine(8192, 0.25, 1.0, 0.15);
    for (std::size_t i = 0; i < ts.size(); ++i) ts.values[i] += b.values[i];
    const auto s = welch_psd(ts, 1024);
    auto power = [&](double f0) {
        double p = 0.0;
        for (std::size_t k = 0; k < s.freqs.size(); ++k)
            if (std::abs(s.freqs[k] - f0) < 0.02) p += s.psd[k];
        return p * s.freqs[1];
    };
    const double p1 = power(0.05), p2 = power(0.15);
    EXPECT_NEAR(p1 / p2, 1.0, 0.1);
    EXPECT_NEAR(p1 + p2, 1.0, 0.05);
}

TEST(Welch, PeakSearchRespectsLowerLimit) {
    Spectrum s{{0.0, 0.005, 0.01, 0.02}, {9.0, 5.0, 1.0, 2.0}};
    EXPECT_EQ(spectrum_peak(s).freq, 0.005);
    EXPECT_EQ(spectrum_peak(s, 0.01).freq, 0.02);
}

TEST(EmpiricalCdf, Steps) {
    const EmpiricalCdf F({4.0, 2.0, 1.0, 3.0});
    EXPECT_EQ(F(2.5), 0.5);
    EXPECT_EQ(F(0.5), 0.0);
    EXPECT_EQ(F(4.0), 1.0);
    EXPECT_EQ(F.quantile(0.5), 2.0);
    EXPECT_EQ(F.quantile(0.7), 3.0);
    const EmpiricalCdf G({0.3});
    EXPECT_EQ(G(0.3 - 1e-12), 0.0);
    EXPECT_EQ(G(0.3), 1.0);
}

TEST(EmpiricalCdf, QuantileIsInverse) {
    const auto x = gaussian(101, 8);
    const EmpiricalCdf F(x);
    for (double p : {0.01, 0.3, 0.5, 0.7, 1.0}) {
        const double q = F.quantile(p);
        EXPECT_GE(F(q), p - 1e-15);
        for (double v : F.sorted()) {
            if (v < q) {
                EXPECT_LT(F(v), p);
            }
        }
    }
}

TEST(Strouhal, Anchors) {
    EXPECT_NEAR(viv::strouhal_frequency(0.1, 1.13, 0.28), 0.0248, 5e-5);
    EXPECT_EQ(viv::strouhal_frequency(0.0, 1.13, 0.28), 0.0);
    EXPECT_NEAR(viv::strouhal_frequency(0.67, 1.13, 0.25), 0.148, 5e-4);
}

namespace {

ResponseStats stats_with(double peak_a, double freq_a, double peak_b, double freq_b) {
    ResponseStats s;
    s.sensors["S3"].peak_psd = peak_a;
    s.sensors["S3"].peak_freq = freq_a;
    s.sensors["S4"].peak_psd = peak_b;
    s.sensors["S4"].peak_freq = freq_b;
    return s;
}

}  // namespace

TEST(Classify, Rules) {
    EXPECT_EQ(classify_event(stats_with(0.079, 0.05, 0.03, 0.05), 0.05), ResponseLabel::VivDominated);
    EXPECT_EQ(classify_event(stats_with(0.01, 0.05, 0.01, 0.1), 0.05), ResponseLabel::SmallResponse);
    EXPECT_EQ(classify_event(stats_with(0.05, 0.15, 0.01, 0.1), 0.03), ResponseLabel::WaveDominated);
    // large peak far from the shedding frequency and outside the wave band
    EXPECT_EQ(classify_event(stats_with(0.2, 0.3, 0.01, 0.1), 0.03), ResponseLabel::Combined);
}

TEST(Classify, LabelStrings) {
    for (auto l : {ResponseLabel::VivDominated, ResponseLabel::WaveDominated,
                   ResponseLabel::SmallResponse, ResponseLabel::Combined})
        EXPECT_EQ(label_from_string(to_string(l)), l);
    EXPECT_THROW(label_from_string("Lock-in"), Error);
}

TEST(Classify, MissingReferenceSensor) {
    ResponseStats s;
    s.sensors["S1"].peak_psd = 1.0;
    EXPECT_THROW(classify_event(s, 0.05), Error);
}

TEST(Modal, BasisIsPinned) {
    const auto& b = fixture_basis();
    EXPECT_EQ(b.n_modes(), 5);
    EXPECT_NEAR(b.values_at({0.0}).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    EXPECT_NEAR(b.values_at({b.length}).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    const auto aug = with_top_sway(b);
    EXPECT_EQ(aug.n_modes(), 6);
    EXPECT_NEAR(aug.values_at({b.length})(0, 5), 1.0, 1e-12);
    EXPECT_EQ(aug.frequencies[5], 0.0);
}

TEST(Modal, SingleModeRoundtrip) {
    const std::vector<ModeTerm> terms{{1, 0.5, 0.05}};
    const auto rec = modal_reconstruct(sensor_acc(terms, 4080, 0.5), fixture_basis());
    EXPECT_LT(relative_error(rec, terms), 0.05);
}

TEST(Modal, TwoModeAmplitudes) {
    const std::vector<ModeTerm> terms{{1, 0.4, 0.05}, {3, 0.2, 0.1}};
    const auto rec = modal_reconstruct(sensor_acc(terms, 4080, 0.5), fixture_basis());
    EXPECT_LT(relative_error(rec, terms), 0.05);
    const auto& b = fixture_basis();
    for (const auto& m : terms) {
        // modal coordinate amplitude times the shape peak is the antinode amplitude
        const double peak = b.shapes.col(m.mode).cwiseAbs().maxCoeff();
        const Eigen::VectorXd q = rec.q.row(m.mode).transpose();
        const double amp = std::sqrt(2.0) * std::sqrt(q.squaredNorm() / q.size()) * peak;
        EXPECT_NEAR(amp, m.amp, 0.05 * m.amp);
    }
}

TEST(Modal, ZeroInput) {
    const auto rec = modal_reconstruct(sensor_acc({}, 1024, 0.5), fixture_basis());
    EXPECT_EQ(rec.q.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Modal, RejectsBadSensorSets) {
    auto recs = sensor_acc({{1, 0.5, 0.05}}, 1024, 0.5);
    auto few = recs;
    few.resize(3);
    EXPECT_THROW(modal_reconstruct(few, fixture_basis()), Error);
    auto dup = recs;
    dup[1].z = dup[0].z;
    EXPECT_THROW(modal_reconstruct(dup, fixture_basis()), Error);
    auto off = recs;
    off[2].acc.dt = 0.25;
    EXPECT_THROW(modal_reconstruct(off, fixture_basis()), Error);
}

namespace {

// Event with rigid top sway in y and optional mode-2 motion in x and y.
MeasurementEvent sway_event(double B, double f_sway, double viv_amp_x, double viv_amp_y,
                            double f_viv) {
    auto e = blank_event();
    const double L = fixture_basis().length;
    for (auto& [id, rec] : e.riser_acc) {
        const double phi = unit_shape(1, rec.z);
        for (std::size_t i = 0; i < rec.acc_y.size(); ++i) {
            const double t = rec.acc_y.time_at(i);
            const double ws = 2.0 * kPi * f_sway, wv = 2.0 * kPi * f_viv;
            rec.acc_y.values[i] = -ws * ws * B * rec.z / L * std::sin(ws * t) -
                                  wv * wv * viv_amp_y * phi * std::sin(wv * t);
            rec.acc_x.values[i] = -wv * wv * viv_amp_x * phi * std::sin(wv * t);
        }
    }
    return e;
}

}  // namespace

TEST(TopMotion, RigidSwayAmplitude) {
    const double B = 3.0;
    const auto [tx, ty] = vessel_top_motion(sway_event(B, 0.02, 0.0, 0.0, 0.1), fixture_basis());
    const double amp = std::sqrt(2.0) * vivclust::dsp::rms(ty.values);
    EXPECT_NEAR(amp, B, 0.05 * B);
    EXPECT_LT(vivclust::dsp::rms(tx.values), 1e-9);
}

TEST(TopMotion, ModeLeakageIsSmall) {
    const double B = 3.0;
    const auto [tx, ty] = vessel_top_motion(sway_event(B, 0.02, 0.0, 1.0, 0.05), fixture_basis());
    const auto s = welch_psd(ty, 1024);
    double sway = 0.0, leak = 0.0;
    for (std::size_t k = 1; k < s.freqs.size(); ++k)
        (std::abs(s.freqs[k] - 0.02) < 0.01 ? sway : leak) += s.psd[k];
    EXPECT_LT(std::sqrt(leak / sway), 0.1);
}

TEST(TopMotion, ZeroInput) {
    const auto [tx, ty] = vessel_top_motion(blank_event(), fixture_basis());
    EXPECT_EQ(vivclust::dsp::rms(tx.values), 0.0);
    EXPECT_EQ(vivclust::dsp::rms(ty.values), 0.0);
}

TEST(ResponseStats, SingleModeEvent) {
    const double A = 0.8;
    const auto e = sway_event(0.0, 0.02, 0.3, A, 0.05);
    const auto s = response_stats(e, fixture_basis(), 0.0);
    EXPECT_NEAR(s.freq_dom, 0.05, 2.0 / 2040.0 + 1.0 / 512.0);
    EXPECT_NEAR(s.ydisp_max, A / std::sqrt(2.0), 0.02 * A / std::sqrt(2.0));
    ASSERT_EQ(s.sensors.size(), 6u);
    for (const auto& [id, st] : s.sensors) {
        EXPECT_NEAR(st.kurtosis_cross, 1.5, 0.01);
        EXPECT_NEAR(st.peak_freq, 0.05, 1.0 / 512.0);
    }
}

TEST(ResponseStats, SwayIsNotDisplacement) {
    const auto s = response_stats(sway_event(3.0, 0.02, 0.0, 0.0, 0.05), fixture_basis(), 0.0);
    EXPECT_LT(s.ydisp_max, 0.01);
}

TEST(ResponseStats, QuiescentEvent) {
    const auto s = response_stats(blank_event(), fixture_basis(), 0.3);
    EXPECT_EQ(s.ydisp_max, 0.0);
    for (const auto& [id, st] : s.sensors) {
        EXPECT_EQ(st.acc_rms_main, 0.0);
        EXPECT_EQ(st.acc_rms_cross, 0.0);
        EXPECT_EQ(st.peak_psd, 0.0);
    }
}
