// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--out DIR] [--only 2,3,...] [--known-red 1,...]
//
// Exit status is nonzero when a criterion fails that is not listed in --known-red.
// Known-red criteria still print FAIL.
#include "oracles.hpp"

#include "vivclust/clustering/gmm.hpp"
#include "vivclust/clustering/silhouette.hpp"
#include "vivclust/core/dsp.hpp"
#include "vivclust/core/event_io.hpp"
#include "vivclust/core/fixture.hpp"
#include "vivclust/features/features.hpp"
#include "vivclust/pipeline/stages.hpp"
#include "vivclust/pipeline/synth.hpp"
#include "vivclust/response/modal.hpp"
#include "vivclust/response/spectral.hpp"
#include "vivclust/viv/beam.hpp"
#include "vivclust/viv/rigid_cylinder.hpp"
#include "vivclust/viv/riser_sim.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace vivclust;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Detail {
public:
    template <class T>
    Detail& operator()(const std::string& key, T value) {
        os_ << (first_ ? "" : ", ") << key << "=" << value;
        first_ = false;
        return *this;
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
    bool first_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::MatrixXd normal_matrix(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = nd(rng);
    return X;
}

// ---- 1: rigid-cylinder lock-in curve ------------------------------------------

std::vector<viv::LockInPoint> g_sweep;  // shared with criterion 10

Outcome lock_in_curve(const fs::path& out) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> urn;
    for (int i = 0; i <= 36; ++i) urn.push_back(3.0 + 0.25 * i);
    viv::RigidCylinderConfig cfg;
    cfg.mass_ratio = 2.0;
    cfg.fn_ratio = 2.0;
    g_sweep = viv::lock_in_sweep(cfg, viv::EmpiricalParameters{}, urn);
    const double secs = seconds_since(t0);

    std::ofstream csv(out / "lock_in_curve.csv");
    csv << "u_rn,a_over_d,f_hat,a_over_d_il\n";
    std::size_t peak = 0;
    for (std::size_t i = 0; i < g_sweep.size(); ++i) {
        const auto& r = g_sweep[i].result;
        csv << g_sweep[i].reduced_velocity << "," << r.a_over_d << "," << r.f_hat << "," << r.a_over_d_il << "\n";
        if (r.a_over_d > g_sweep[peak].result.a_over_d) peak = i;
    }
    // local maxima standing at least 5% of the peak above the deeper neighbouring valley
    const double amax = g_sweep[peak].result.a_over_d;
    int maxima = 0;
    for (std::size_t i = 0; i < g_sweep.size(); ++i) {
        const double a = g_sweep[i].result.a_over_d;
        const bool left = i == 0 || a > g_sweep[i - 1].result.a_over_d;
        const bool right = i + 1 == g_sweep.size() || a >= g_sweep[i + 1].result.a_over_d;
        if (!left || !right) continue;
        double lo_l = a, lo_r = a;
        for (std::size_t j = i; j-- > 0 && g_sweep[j].result.a_over_d <= a;) lo_l = std::min(lo_l, g_sweep[j].result.a_over_d);
        for (std::size_t j = i + 1; j < g_sweep.size() && g_sweep[j].result.a_over_d <= a; ++j)
            lo_r = std::min(lo_r, g_sweep[j].result.a_over_d);
        if (a - std::max(lo_l, lo_r) >= 0.05 * amax || i == peak) ++maxima;
    }
    const double fhat = g_sweep[peak].result.f_hat;
    const bool pass = maxima == 1 && std::abs(amax - 0.69) <= 0.07 && std::abs(fhat - 0.25) <= 0.02 && secs < 300.0;
    return {pass, Detail()("max_A/D", amax)("u_rn_at_peak", g_sweep[peak].reduced_velocity)(
                      "f_hat_at_peak", fhat)("local_maxima", maxima)("runtime_s", secs)
                      .str()};
}

// ---- 2: kurtosis ----------------------------------------------------------------

Outcome kurtosis_identities(const fs::path&) {
    std::vector<double> sine(4000);
    for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = 1.7 * std::sin(2.0 * kPi * 0.05 * 0.5 * i);
    const double ks = response::kurtosis(sine);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    std::vector<double> g(100000);
    for (auto& v : g) v = nd(rng);
    const double kg = response::kurtosis(g);
    double affine = 0.0;
    for (double a : {-2.0, 0.1, 40.0}) {
        std::vector<double> y;
        for (double v : g) y.push_back(a * v + 3.0 * a);
        affine = std::max(affine, std::abs(response::kurtosis(y) - kg));
    }
    const bool pass = std::abs(ks - 1.5) <= 0.01 && std::abs(kg - 3.0) <= 0.1 && affine <= 1e-9;
    return {pass, Detail()("sinusoid", ks)("gaussian", kg)("affine_dev", affine).str()};
}

// ---- 3: Strouhal anchor -----------------------------------------------------------

Outcome strouhal_anchor(const fs::path&) {
    const double f = viv::strouhal_frequency(0.1, 1.13, 0.28);
    char two_sig[32];
    std::snprintf(two_sig, sizeof two_sig, "%.2g", f);
    const bool pass = std::abs(f - 0.0248) < 5e-5 && std::string(two_sig) == "0.025";
    return {pass, Detail()("f_hz", f)("two_sig_figs", two_sig).str()};
}

// ---- 4: EM ----------------------------------------------------------------------

Outcome em_correctness(const fs::path&) {
    using namespace clustering;
    int monotone_fail = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Eigen::MatrixXd X = normal_matrix(60 + static_cast<int>(seed % 40), 2 + static_cast<int>(seed % 4), 1000 + seed);
        GmmOptions o;
        o.n_restarts = 1;
        o.n_iter = 80;
        o.seed = seed;
        const GmmModel m = gmm_fit_serial(X, 1 + static_cast<int>(seed % 5), o);
        for (std::size_t i = 1; i < m.loglik_trace.size(); ++i)
            if (m.loglik_trace[i] - m.loglik_trace[i - 1] < -1e-8 * std::abs(m.loglik_trace[i - 1])) {
                ++monotone_fail;
                break;
            }
    }

    const Eigen::MatrixXd Y = normal_matrix(500, 3, 7) * 1.5;
    GmmOptions o1;
    o1.reg_eps = 0.0;
    const GmmModel one = gmm_fit(Y, 1, o1);
    const Eigen::VectorXd mu = Y.colwise().mean().transpose();
    const Eigen::MatrixXd c = Y.rowwise() - mu.transpose();
    const Eigen::MatrixXd S = c.transpose() * c / static_cast<double>(Y.rows());
    const double ll = oracles::gaussian_loglik(Y, mu, S);
    const double mle_err = std::max({(one.means[0] - mu).cwiseAbs().maxCoeff(),
                                     (one.covariances[0] - S).cwiseAbs().maxCoeff(),
                                     std::abs(gmm_loglik(one, Y) - ll) / std::abs(ll)});

    // three unit-sigma components 8 sigma apart
    std::vector<Eigen::Vector2d> centers{{0.0, 0.0}, {8.0, 0.0}, {4.0, 8.0}};
    const int per = 2000;
    Eigen::MatrixXd Z = normal_matrix(3 * per, 2, 99);
    std::vector<int> truth;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < per; ++i) {
            Z.row(k * per + i) += centers[k].transpose();
            truth.push_back(k);
        }
    GmmOptions o3;
    o3.n_restarts = 20;
    o3.seed = 3;
    const GmmModel three = gmm_fit(Z, 3, o3);
    double worst = 0.0;
    std::vector<int> perm{0, 1, 2};
    double best_perm = 1e300;
    do {
        double w = 0.0;
        for (int k = 0; k < 3; ++k) w = std::max(w, (three.means[perm[k]] - Eigen::VectorXd(centers[k])).norm());
        best_perm = std::min(best_perm, w);
    } while (std::next_permutation(perm.begin(), perm.end()));
    worst = best_perm;
    const double ari = adjusted_rand_index(predict_labels(three, Z), truth);
    const bool pass = monotone_fail == 0 && mle_err <= 1e-8 && worst < 0.1 && ari >= 0.95;
    return {pass, Detail()("monotone_failures", monotone_fail)("k1_max_err", mle_err)(
                      "mean_err_sigma", worst)("ari", ari)
                      .str()};
}

// ---- 5: silhouette oracle --------------------------------------------------------

Outcome silhouette_oracle(const fs::path&) {
    std::mt19937_64 rng(5);
    int mismatches = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 3 + static_cast<int>(rng() % 198);
        const int d = 1 + static_cast<int>(rng() % 7);
        const int C = 2 + static_cast<int>(rng() % std::min<std::uint64_t>(6, static_cast<std::uint64_t>(n - 1)));
        const Eigen::MatrixXd X = normal_matrix(n, d, rng());
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i < C ? i : static_cast<int>(rng() % C);
        const auto lib = clustering::silhouette(X, labels).per_point;
        const auto ref = oracles::brute_silhouette(X, labels);
        for (std::size_t i = 0; i < ref.size(); ++i)
            if (std::memcmp(&lib[i], &ref[i], sizeof(double)) != 0) {
                ++mismatches;
                break;
            }
    }
    Eigen::MatrixXd X(4, 1);
    X << 0.0, 1.0, 10.0, 11.0;
    const double s0 = clustering::silhouette(X, {0, 0, 1, 1}).per_point[0];
    const double hand = (10.5 - 1.0) / 10.5;
    const bool pass = mismatches == 0 && std::abs(s0 - hand) <= 1e-12;
    return {pass, Detail()("datasets_mismatched", mismatches)("s0", s0)("hand", hand).str()};
}

// ---- 6: feature identities -------------------------------------------------------

Outcome feature_identities(const fs::path&) {
    using namespace features;
    const std::vector<double> ux{0.4, -0.2, 0.7, 0.1}, zero(4, 0.0);
    std::vector<double> uy{0.3, 0.5, -0.1, 0.6};
    // rescale uy to the RMS of ux
    const double scale = dsp::rms(ux) / dsp::rms(uy);
    for (auto& v : uy) v *= scale;
    const std::vector<double> flat{0.35, -0.35, 0.35, 0.35};
    double dev = 0.0;
    dev = std::max(dev, std::abs(spread_coefficient(ux, zero)));
    dev = std::max(dev, std::abs(spread_coefficient(ux, uy) - 1.0));
    dev = std::max(dev, std::abs(shear_coefficient(flat)));
    const double sp = spread_coefficient(ux, uy), sh = shear_coefficient(ux);
    for (double c : {1e-3, 0.37, 12.0, 3e4}) {
        std::vector<double> cx, cy;
        for (double v : ux) cx.push_back(c * v);
        for (double v : uy) cy.push_back(c * v);
        dev = std::max(dev, std::abs(spread_coefficient(cx, cy) - sp));
        dev = std::max(dev, std::abs(shear_coefficient(cx) - sh));
    }
    return {dev <= 1e-12, Detail()("max_deviation", dev).str()};
}

// ---- 7: modal reconstruction ------------------------------------------------------

Outcome modal_roundtrip(const fs::path&) {
    const auto fx = helland_hansen_fixture();
    const viv::BeamModel model = viv::build_beam_model(fx.riser);
    const response::ModalBasis basis = response::make_modal_basis(model, 5);
    const double dt = 0.5;
    const std::size_t n = 4080;
    // modes 2 and 4 with equal antinode amplitude, at their natural frequencies rounded to
    // the nearest DFT bin so the record holds whole cycles
    const double df = 1.0 / (dt * static_cast<double>(n));
    auto on_bin = [&](double f) { return std::round(f / df) * df; };
    struct Term {
        int mode;
        double amp, freq;
    };
    std::vector<Term> terms{{1, 0.5, on_bin(basis.frequencies[1])}, {3, 0.5, on_bin(basis.frequencies[3])}};
    auto shape = [&](int j, double z) {
        return basis.values_at({z})(0, j) / basis.shapes.col(j).cwiseAbs().maxCoeff();
    };
    auto error_with_snr = [&](double snr_db, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        std::vector<response::AccRecord> recs;
        for (const auto& [id, z] : default_sensor_layout(fx.riser.length)) {
            response::AccRecord r;
            r.z = z;
            r.acc.dt = dt;
            r.acc.values.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                for (const auto& t : terms) {
                    const double w = 2.0 * kPi * t.freq;
                    r.acc.values[i] -= w * w * t.amp * shape(t.mode, z) * std::sin(w * dt * i);
                }
            if (snr_db < 1e3) {
                const double sigma = dsp::rms(r.acc.values) * std::pow(10.0, -snr_db / 20.0);
                for (auto& v : r.acc.values) v += sigma * nd(rng);
            }
            recs.push_back(r);
        }
        const auto rec = response::modal_reconstruct(recs, basis);
        double err = 0.0, ref = 0.0;
        for (int k = 1; k < 50; ++k) {
            const double z = basis.length * k / 50.0;
            const auto w = rec.at(z);
            for (std::size_t i = 0; i < w.size(); ++i) {
                double truth = 0.0;
                for (const auto& t : terms) truth += t.amp * shape(t.mode, z) * std::sin(2.0 * kPi * t.freq * (rec.t0 + rec.dt * i));
                err += (w[i] - truth) * (w[i] - truth);
                ref += truth * truth;
            }
        }
        return std::sqrt(err / ref);
    };
    const double clean = error_with_snr(1e9, 0);
    double noisy = 0.0;
    for (std::uint64_t s = 1; s <= 5; ++s) noisy = std::max(noisy, error_with_snr(20.0, s));
    // informational: the same response at the exact natural frequencies
    for (auto& t : terms) t.freq = basis.frequencies[t.mode];
    const double off_bin = error_with_snr(1e9, 0);
    return {clean <= 0.05 && noisy <= 0.15, Detail()("clean_rel_rms", clean)("noisy_rel_rms_worst_of_5", noisy)(
                                               "off_bin_clean_rel_rms", off_bin)
                                               .str()};
}

// ---- 8: structural solver --------------------------------------------------------

Outcome structural_solver(const fs::path&) {
    const auto fx = helland_hansen_fixture();
    double f_lo = 1e9, f_hi = 0.0;
    for (double T = 3.0e6; T <= 4.0e6 + 1.0; T += 2.5e5) {
        auto props = fx.riser;
        props.top_tension = T;
        const double f1 = viv::build_beam_model(props).frequencies[0];
        f_lo = std::min(f_lo, f1);
        f_hi = std::max(f_hi, f1);
    }
    const bool band = f_lo >= fx.eigen.at(1).f_low && f_hi <= fx.eigen.at(1).f_high;

    RiserProperties s;
    s.length = 500.0;
    s.water_depth = 500.0;
    s.top_tension = 2e6;
    s.segments = {{0.0, 500.0, 0.5, 400.0, 1e10, 1e-3}};
    viv::BeamOptions so;
    so.c_m = 1.0;
    so.include_weight = false;
    const viv::BeamModel sm = viv::build_beam_model(s, so);
    double string_err = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const double exact = k / (2.0 * s.length) * std::sqrt(s.top_tension / 400.0);
        string_err = std::max(string_err, std::abs(sm.frequencies[k - 1] - exact) / exact);
    }

    const viv::BeamModel m = viv::build_beam_model(fx.riser);
    const Eigen::SparseMatrix<double> C(m.n_free(), m.n_free());
    const viv::NewmarkStepper stepper(m.mass, C, m.stiffness, 1.0 / (40.0 * m.frequencies[0]));
    Eigen::VectorXd u = m.modes.col(0) + 0.3 * m.modes.col(1) + 0.1 * m.modes.col(4);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m.n_free());
    const Eigen::VectorXd f = Eigen::VectorXd::Zero(m.n_free());
    Eigen::VectorXd a = stepper.initial_acceleration(u, v, f, &m.stiffness);
    const double e0 = viv::mechanical_energy(m.mass, m.stiffness, u, v);
    double drift = 0.0;
    for (int i = 0; i < 4000; ++i) {
        stepper.step(u, v, a, f);
        drift = std::max(drift, std::abs(viv::mechanical_energy(m.mass, m.stiffness, u, v) - e0) / e0);
    }
    const bool pass = band && string_err <= 0.01 && drift <= 0.005;
    return {pass, Detail()("f1_min_hz", f_lo)("f1_max_hz", f_hi)("string_rel_err", string_err)(
                      "energy_drift_100_periods", drift)
                      .str()};
}

// ---- 9: end-to-end pipeline -------------------------------------------------------

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
    return out;
}

Outcome end_to_end(const fs::path& out) {
    const fs::path root = out / "pipeline";
    fs::remove_all(root);
    pipeline::PipelineConfig cfg;  // 3 regimes x 20 events, K = 3
    cfg.corpus = root / "corpus";
    cfg.out = root / "run";
    const auto quiet = [](const std::string&) {};

    const auto t0 = std::chrono::steady_clock::now();
    {
        pipeline::RunContext ctx(cfg);
        ctx.log = quiet;
        pipeline::run_stage(ctx, "synth");
        pipeline::run_pipeline(ctx);
    }
    const double secs = seconds_since(t0);
    {
        auto again = cfg;
        again.out = root / "rerun";
        pipeline::RunContext ctx(again);
        ctx.log = quiet;
        pipeline::run_pipeline(ctx);
    }
    const bool identical = tree(root / "run") == tree(root / "rerun");

    const auto manifest = nlohmann::json::parse(read_file(cfg.corpus / pipeline::kCorpusManifest));
    const auto& regimes = manifest.at("labels");
    std::map<std::string, int> regime_index;
    std::vector<int> truth, found;
    for (const auto& row : pipeline::read_csv(cfg.out / "cluster/assignments.csv")) {
        const std::string r = regimes.at(row.at("event_id"));
        regime_index.emplace(r, static_cast<int>(regime_index.size()));
        truth.push_back(regime_index.at(r));
        found.push_back(std::stoi(row.at("cluster")));
    }
    const double ari = clustering::adjusted_rand_index(found, truth);
    int viv = 0, viv_ok = 0;
    for (const auto& row : pipeline::read_csv(cfg.out / "classify/response_stats.csv"))
        if (regimes.at(row.at("event_id")) == "viv_dominated") {
            ++viv;
            viv_ok += row.at("label") == "VivDominated";
        }
    const double viv_share = viv ? static_cast<double>(viv_ok) / viv : 0.0;
    const bool pass = truth.size() == 60 && regime_index.size() == 3 && ari >= 0.9 && viv_share >= 0.9 &&
                      secs < 600.0 && identical;
    return {pass, Detail()("events", truth.size())("ari", ari)("viv_dominated_share", viv_share)(
                      "synth_plus_run_s", secs)("rerun_identical", identical ? "yes" : "no")
                      .str()};
}

// ---- 10: simulator physics ---------------------------------------------------------

Outcome simulator_physics(const fs::path& out) {
    if (g_sweep.empty()) lock_in_curve(out);
    double force = 0.0, phase = 0.0;
    std::size_t peak = 0;
    for (std::size_t i = 0; i < g_sweep.size(); ++i) {
        const auto& r = g_sweep[i].result;
        force = std::max({force, r.max_force_ratio_x, r.max_force_ratio_y});
        phase = std::max(phase, r.max_phase_rate_ratio);
        if (r.a_over_d > g_sweep[peak].result.a_over_d) peak = i;
    }
    const auto& r = g_sweep[peak].result;
    const double ratio = r.f_osc_il / r.f_osc_cf;
    const double power = std::abs(r.mean_power_fluid - r.mean_power_damping) / r.mean_power_damping;

    viv::RigidCylinderConfig cfg;
    const viv::EmpiricalParameters params;
    const double u = g_sweep[peak].reduced_velocity * cfg.fn_cf * cfg.d;
    const double dt = viv::rigid_cylinder_time_step(cfg, params, u);
    viv::RigidRunOptions o;
    o.keep_every = 0;
    const double ad1 = viv::simulate_rigid_cylinder(cfg, params, u, 300.0 / cfg.fn_cf, dt, o).a_over_d;
    const double ad2 = viv::simulate_rigid_cylinder(cfg, params, u, 300.0 / cfg.fn_cf, dt / 2.0, o).a_over_d;
    const double halving = std::abs(ad2 - ad1) / ad1;

    const bool pass = force <= 1.0 + 1e-12 && phase <= 1.0 + 1e-12 && std::abs(ratio - 2.0) <= 0.2 &&
                      power <= 0.05 && halving < 0.02;
    return {pass, Detail()("max_force_ratio", force)("max_phase_rate_ratio", phase)(
                      "il_cf_freq_ratio", ratio)("power_imbalance", power)("dt_halving_change", halving)(
                      "at_u_rn", g_sweep[peak].reduced_velocity)
                      .str()};
}

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) out.insert(std::stoi(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string out_dir = "acceptance_out", only, known_red;
    app.add_option("--out", out_dir, "Directory for artifacts");
    app.add_option("--only", only, "Comma-separated criteria to run");
    app.add_option("--known-red", known_red, "Criteria allowed to fail");
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(out_dir);

    const std::vector<std::pair<std::string, std::function<Outcome(const fs::path&)>>> criteria{
        {"rigid-cylinder lock-in curve", lock_in_curve},
        {"kurtosis identities", kurtosis_identities},
        {"Strouhal anchor", strouhal_anchor},
        {"EM correctness", em_correctness},
        {"silhouette oracle", silhouette_oracle},
        {"feature formula identities", feature_identities},
        {"modal reconstruction roundtrip", modal_roundtrip},
        {"structural solver", structural_solver},
        {"end-to-end synthetic pipeline", end_to_end},
        {"simulator physics properties", simulator_physics}};
    const auto selected = parse_list(only);
    const auto red = parse_list(known_red);

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second(out_dir);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
                  << "): " << o.detail << (o.pass || !red.count(id) ? "" : " [known red]") << std::endl;
        if (!o.pass && !red.count(id)) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
