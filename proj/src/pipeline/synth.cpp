#include "vivclust/pipeline/synth.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"
#include "vivclust/core/event_io.hpp"
#include "vivclust/core/fixture.hpp"
#include "vivclust/core/parallel.hpp"
#include "vivclust/viv/beam.hpp"
#include "vivclust/viv/riser_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vivclust::pipeline {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
}

EnvironmentDraw draw_environment(const SyntheticRegimeSpec& spec, Rng& rng) {
    EnvironmentDraw e;
    e.speed = rng.uniform(spec.speed);
    e.shear = rng.uniform(spec.shear);
    e.spread = rng.uniform(spec.spread);
    e.heading = rng.uniform(0.0, 2.0 * kPi);
    e.power_law = rng.uniform() < 0.5;
    e.turn = rng.uniform() < spec.turn_probability;
    e.turn_depth = rng.uniform(200.0, 500.0);
    e.wave_acc = rng.uniform(spec.wave_acc);
    e.wave_heading = rng.uniform(0.0, 2.0 * kPi);
    e.sway = rng.uniform(spec.sway);
    e.riser_wave = rng.uniform(spec.riser_wave);
    return e;
}

namespace {

// Speed factor at relative depth zeta in [0, 1]; both shapes lose `shear` of the
// surface speed at the seabed.
double shear_shape(const EnvironmentDraw& e, double zeta) {
    if (!e.power_law) return 1.0 - e.shear * zeta;
    if (e.shear <= 0.0) return 1.0;
    constexpr double z0 = 10.0 / 680.0;
    const double alpha = std::log(1.0 - e.shear) / std::log(z0 / (1.0 + z0));
    return std::pow((1.0 - zeta + z0) / (1.0 + z0), alpha);
}

struct Harmonic {
    double amp = 0.0;    // displacement amplitude, m
    double omega = 0.0;  // rad/s
    double phase = 0.0;
    double dir = 0.0;    // rad from x
};

// Top displacement and acceleration of the vessel.
struct VesselMotion {
    std::vector<Harmonic> parts;

    double disp(double t, int axis) const {
        double s = 0.0;
        for (const auto& h : parts)
            s += h.amp * std::sin(h.omega * t + h.phase) * (axis == 0 ? std::cos(h.dir) : std::sin(h.dir));
        return s;
    }
    double acc(double t, int axis) const {
        double s = 0.0;
        for (const auto& h : parts)
            s -= h.amp * h.omega * h.omega * std::sin(h.omega * t + h.phase) *
                 (axis == 0 ? std::cos(h.dir) : std::sin(h.dir));
        return s;
    }
};

constexpr int kSwayParts = 3;
constexpr int kWaveParts = 4;

VesselMotion vessel_motion(const EnvironmentDraw& e, Rng& rng) {
    VesselMotion v;
    for (int i = 0; i < kSwayParts; ++i) {
        Harmonic h;
        h.omega = 2.0 * kPi * rng.uniform(0.01, 0.02);
        h.amp = e.sway / std::sqrt(static_cast<double>(kSwayParts));
        h.phase = rng.uniform(0.0, 2.0 * kPi);
        h.dir = rng.uniform(0.0, 2.0 * kPi);
        v.parts.push_back(h);
    }
    for (int i = 0; i < kWaveParts; ++i) {
        Harmonic h;
        h.omega = 2.0 * kPi * rng.uniform(0.08, 0.16);
        // wave_acc is the acceleration amplitude of the combined sea
        h.amp = e.wave_acc / std::sqrt(static_cast<double>(kWaveParts)) / (h.omega * h.omega);
        h.phase = rng.uniform(0.0, 2.0 * kPi);
        h.dir = e.wave_heading + 0.3 * rng.normal();
        v.parts.push_back(h);
    }
    return v;
}

// Riser acceleration from wave-frequency mode participation: every wave component
// drives the first modes with random weights.
struct WaveModal {
    std::vector<Harmonic> parts;
    std::vector<std::vector<double>> weight;  // [part][mode]
    std::vector<double> phase_shift;          // [part], y lags x
};

WaveModal wave_modal(const EnvironmentDraw& e, const VesselMotion& v, int n_modes, Rng& rng) {
    WaveModal w;
    for (std::size_t i = kSwayParts; i < v.parts.size(); ++i) {
        Harmonic h = v.parts[i];
        h.amp = e.riser_wave / std::sqrt(static_cast<double>(kWaveParts));
        std::vector<double> c(static_cast<std::size_t>(n_modes));
        double sum = 0.0;
        for (auto& x : c) sum += (x = rng.uniform());
        for (auto& x : c) x /= sum;
        w.parts.push_back(h);
        w.weight.push_back(std::move(c));
        w.phase_shift.push_back(rng.uniform(0.0, 2.0 * kPi));
    }
    return w;
}

void add_noise(std::vector<double>& x, double snr_db, Rng& rng) {
    const double sigma = dsp::rms(x) * std::pow(10.0, -snr_db / 20.0);
    for (double& v : x) v += sigma * rng.normal();
}

std::string timestamp_for(int regime_index, int index) {
    // one event per hour from 2015-01-01, regimes on separate days blocks
    const int hours = regime_index * 24 * 30 + index;
    char buf[32];
    std::snprintf(buf, sizeof buf, "2015-%02d-%02dT%02d:00:00Z", 1 + regime_index * 2,
                  1 + (hours / 24) % 28, hours % 24);
    return buf;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

CurrentProfile synthetic_current(const EnvironmentDraw& e, double water_depth, double duration,
                                 Rng& rng) {
    CurrentProfile p;
    for (double d = 10.0; d <= water_depth - 10.0; d += 20.0) p.depths.push_back(d);
    for (int i = 0; i <= 6; ++i) p.times.push_back(duration * i / 6.0);
    const auto nt = static_cast<Eigen::Index>(p.times.size());
    const auto nd = static_cast<Eigen::Index>(p.depths.size());
    p.u_east.resize(nt, nd);
    p.u_north.resize(nt, nd);
    const double slow_phase = rng.uniform(0.0, 2.0 * kPi);
    for (Eigen::Index it = 0; it < nt; ++it) {
        const double mod = 1.0 + 0.05 * std::sin(2.0 * kPi * p.times[static_cast<std::size_t>(it)] / duration + slow_phase);
        for (Eigen::Index id = 0; id < nd; ++id) {
            const double depth = p.depths[static_cast<std::size_t>(id)];
            const double zeta = depth / water_depth;
            double dir = e.heading + e.spread * zeta;
            if (e.turn && depth > e.turn_depth) dir += kPi;
            const double s = e.speed * shear_shape(e, zeta) * mod;
            const bool gap = depth < 100.0 && rng.uniform() < 0.3;
            p.u_east(it, id) = gap ? std::nan("") : s * std::cos(dir);
            p.u_north(it, id) = gap ? std::nan("") : s * std::sin(dir);
        }
    }
    return p;
}

MeasurementEvent synth_event(const SyntheticRegimeSpec& spec, int index, std::uint64_t seed,
                             const RiserProperties& riser, const viv::BeamModel& model,
                             const SynthOptions& o) {
    Rng rng(seed);
    const EnvironmentDraw env = draw_environment(spec, rng);
    const VesselMotion vessel = vessel_motion(env, rng);

    MeasurementEvent ev;
    char id[64];
    std::snprintf(id, sizeof id, "%s_%03d", spec.regime.c_str(), index);
    ev.id = id;
    const auto regime_pos = std::find(kRegimeNames.begin(), kRegimeNames.end(), spec.regime) - kRegimeNames.begin();
    ev.timestamp = timestamp_for(static_cast<int>(regime_pos), index);
    ev.duration = o.duration;
    ev.top_tension = riser.top_tension;
    ev.current = synthetic_current(env, riser.water_depth, o.duration, rng);

    const double dt = 1.0 / o.sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(o.duration * o.sample_rate));
    ev.vessel_acc_x.dt = ev.vessel_acc_y.dt = dt;
    ev.vessel_acc_x.values.resize(n);
    ev.vessel_acc_y.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ev.vessel_acc_x.values[i] = vessel.acc(dt * static_cast<double>(i), 0);
        ev.vessel_acc_y.values[i] = vessel.acc(dt * static_cast<double>(i), 1);
    }

    const auto layout = default_sensor_layout(riser.length);
    const int n_wave_modes = std::min(5, static_cast<int>(model.frequencies.size()));
    const WaveModal waves = wave_modal(env, vessel, n_wave_modes, rng);

    // mode shapes scaled to unit peak
    std::vector<double> peak(static_cast<std::size_t>(n_wave_modes), 0.0);
    for (int j = 0; j < n_wave_modes; ++j)
        for (double z : model.node_z) peak[static_cast<std::size_t>(j)] = std::max(peak[static_cast<std::size_t>(j)], std::abs(model.mode_value(j, z)));

    for (const auto& [sid, z] : layout) {
        SensorRecord rec;
        rec.z = z;
        rec.acc_x.dt = rec.acc_y.dt = dt;
        rec.acc_x.values.assign(n, 0.0);
        rec.acc_y.values.assign(n, 0.0);
        if (!spec.simulate) {
            const double s = z / riser.length;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = dt * static_cast<double>(i);
                rec.acc_x.values[i] = s * vessel.acc(t, 0);
                rec.acc_y.values[i] = s * vessel.acc(t, 1);
            }
        }
        for (std::size_t p = 0; p < waves.parts.size(); ++p) {
            const Harmonic& h = waves.parts[p];
            double shape = 0.0;
            for (int j = 0; j < n_wave_modes; ++j)
                shape += waves.weight[p][static_cast<std::size_t>(j)] * model.mode_value(j, z) / peak[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < n; ++i) {
                const double t = dt * static_cast<double>(i);
                rec.acc_x.values[i] += h.amp * shape * std::cos(h.dir) * std::sin(h.omega * t + h.phase);
                rec.acc_y.values[i] += h.amp * shape * std::sin(h.dir) * std::sin(h.omega * t + h.phase + waves.phase_shift[p]);
            }
        }
        ev.riser_acc[sid] = std::move(rec);
    }

    if (spec.simulate) {
        viv::RiserLoadCase load;
        load.current = ev.current;
        for (double& t : load.current.times) t += o.warmup;
        const double total = o.warmup + o.duration;
        constexpr double top_dt = 0.1;
        const auto nt = static_cast<std::size_t>(std::llround(total / top_dt)) + 1;
        load.top_x.dt = load.top_y.dt = top_dt;
        for (std::size_t i = 0; i < nt; ++i) {
            const double t = top_dt * static_cast<double>(i) - o.warmup;
            load.top_x.values.push_back(vessel.disp(t, 0));
            load.top_y.values.push_back(vessel.disp(t, 1));
        }
        viv::RiserSimOptions so;
        so.duration = total;
        so.output_dt = dt;
        so.probes = layout;
        const viv::SimResult r = viv::simulate_riser(model, load, {}, so);
        const auto skip = static_cast<std::size_t>(std::llround(o.warmup / dt));
        for (auto& [sid, rec] : ev.riser_acc) {
            const auto& pr = r.probes.at(sid);
            for (std::size_t i = 0; i < n && skip + i < pr.acc_x.size(); ++i) {
                rec.acc_x.values[i] += pr.acc_x.values[skip + i];
                rec.acc_y.values[i] += pr.acc_y.values[skip + i];
            }
        }
    }

    add_noise(ev.vessel_acc_x.values, o.snr_db, rng);
    add_noise(ev.vessel_acc_y.values, o.snr_db, rng);
    for (auto& [sid, rec] : ev.riser_acc) {
        add_noise(rec.acc_x.values, o.snr_db, rng);
        add_noise(rec.acc_y.values, o.snr_db, rng);
    }

    ev.metadata["regime"] = spec.regime;
    ev.metadata["synthetic"] = "true";
    ev.metadata["speed"] = fmt(env.speed);
    ev.metadata["shear"] = fmt(env.shear);
    ev.metadata["spread"] = fmt(env.spread);
    ev.metadata["heading"] = fmt(env.heading);
    ev.metadata["profile"] = env.power_law ? "power_law" : "linear";
    ev.metadata["turn_layer"] = env.turn ? fmt(env.turn_depth) : "none";
    ev.metadata["wave_acc"] = fmt(env.wave_acc);
    ev.metadata["wave_heading"] = fmt(env.wave_heading);
    ev.metadata["sway"] = fmt(env.sway);
    ev.metadata["riser_wave"] = fmt(env.riser_wave);
    return ev;
}

std::vector<MeasurementEvent> synth_generate(const std::vector<SyntheticRegimeSpec>& specs,
                                             const RiserProperties& riser, const SynthOptions& options,
                                             std::uint64_t root_seed) {
    struct Job {
        const SyntheticRegimeSpec* spec;
        int index;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& s : specs) {
        s.validate();
        const std::uint64_t base = s.seed != 0 ? s.seed : derive_seed(root_seed, s.regime);
        for (int i = 0; i < s.count; ++i)
            jobs.push_back({&s, i, derive_seed(base, static_cast<std::uint64_t>(i))});
    }
    viv::BeamOptions bo;
    bo.n_elements = options.sim_elements;
    const viv::BeamModel model = viv::build_beam_model(riser, bo);
    std::vector<MeasurementEvent> events(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
        events[k] = synth_event(*jobs[k].spec, jobs[k].index, jobs[k].seed, riser, model, options);
    });
    return events;
}

nlohmann::json corpus_manifest(const std::vector<SyntheticRegimeSpec>& specs, const SynthOptions& o,
                               std::uint64_t root_seed, const std::vector<MeasurementEvent>& events) {
    using nlohmann::json;
    auto range = [](Range r) { return json::array({r.min, r.max}); };
    json regimes = json::array();
    for (const auto& s : specs) {
        regimes.push_back({{"regime", s.regime},
                           {"count", s.count},
                           {"speed_m_s", range(s.speed)},
                           {"shear_fraction", range(s.shear)},
                           {"spread_rad", range(s.spread)},
                           {"vessel_wave_acc_m_s2", range(s.wave_acc)},
                           {"vessel_sway_m", range(s.sway)},
                           {"riser_wave_acc_m_s2", range(s.riser_wave)},
                           {"turn_probability", s.turn_probability},
                           {"riser_response", s.simulate ? "simulator (current + vessel motion) + wave modes"
                                                         : "rigid top sway + wave modes"},
                           {"seed", s.seed}});
    }
    json ids = json::object();
    for (const auto& e : events) ids[e.id] = e.metadata.at("regime");
    return {{"generator", "synthetic"},
            {"note", "ranges chosen for separability, not realism"},
            {"root_seed", root_seed},
            {"duration_s", o.duration},
            {"sample_rate_hz", o.sample_rate},
            {"snr_db", o.snr_db},
            {"warmup_s", o.warmup},
            {"sim_elements", o.sim_elements},
            {"current_grid", "20 m bins from 10 m depth, 7 profiles per event, 30% gaps above 100 m"},
            {"vessel_sway_hz", json::array({0.01, 0.02})},
            {"vessel_wave_hz", json::array({0.08, 0.16})},
            {"regimes", regimes},
            {"labels", ids}};
}

void write_corpus(const std::filesystem::path& dir, const std::vector<MeasurementEvent>& events,
                  const nlohmann::json& manifest) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create corpus directory " + dir.string() + ": " + ec.message());
    for (const auto& e : events) write_event(e, dir / (e.id + ".json"));
    write_file_atomic(dir / kCorpusManifest, manifest.dump(2) + "\n");
}

}  // namespace vivclust::pipeline
