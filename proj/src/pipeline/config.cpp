#include "vivclust/pipeline/config.hpp"

#include "vivclust/core/error.hpp"
#include "vivclust/core/event_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>

namespace vivclust::pipeline {

void SyntheticRegimeSpec::validate() const {
    if (std::find(kRegimeNames.begin(), kRegimeNames.end(), regime) == kRegimeNames.end())
        throw validation_error("unknown regime '" + regime + "'");
    if (count < 1) throw validation_error(regime + ": count must be at least 1");
    auto check = [&](const char* name, Range r, double lo, double hi) {
        if (!(r.min <= r.max) || r.min < lo || r.max > hi)
            throw validation_error(regime + ": " + name + " range must be ordered within [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
    };
    check("speed", speed, 0.0, 2.0);
    check("shear", shear, 0.0, 0.95);
    check("spread", spread, 0.0, 3.2);
    check("wave_acc", wave_acc, 0.0, 2.0);
    check("sway", sway, 0.0, 30.0);
    check("riser_wave", riser_wave, 0.0, 2.0);
    if (turn_probability < 0.0 || turn_probability > 1.0)
        throw validation_error(regime + ": turn_probability must lie in [0, 1]");
}

SyntheticRegimeSpec default_regime(const std::string& regime) {
    SyntheticRegimeSpec s;
    s.regime = regime;
    if (regime == "viv_dominated") {
        s.speed = {0.35, 0.6};
        s.shear = {0.0, 0.25};
        s.spread = {0.0, 0.3};
        s.wave_acc = {0.005, 0.02};
        s.sway = {0.3, 1.0};
        s.riser_wave = {0.0, 0.0};
        s.simulate = true;
    } else if (regime == "wave_dominated") {
        s.speed = {0.05, 0.15};
        s.shear = {0.0, 0.5};
        s.spread = {0.0, 0.6};
        s.wave_acc = {0.08, 0.15};
        s.sway = {1.0, 2.5};
        s.riser_wave = {0.02, 0.05};
        s.turn_probability = 0.1;
        s.simulate = true;
    } else if (regime == "quiescent") {
        s.speed = {0.02, 0.05};
        s.shear = {0.0, 0.5};
        s.spread = {0.0, 0.6};
        s.wave_acc = {0.0005, 0.0015};
        s.sway = {0.05, 0.15};
        s.riser_wave = {0.0, 0.0005};
        s.turn_probability = 0.1;
        s.simulate = true;
    } else if (regime == "combined") {
        s.speed = {0.35, 0.6};
        s.shear = {0.0, 0.25};
        s.spread = {0.0, 0.3};
        s.wave_acc = {0.08, 0.15};
        s.sway = {1.0, 2.5};
        s.riser_wave = {0.02, 0.05};
        s.simulate = true;
    } else {
        throw validation_error("unknown regime '" + regime + "'");
    }
    return s;
}

std::vector<SyntheticRegimeSpec> all_default_regimes() {
    std::vector<SyntheticRegimeSpec> out;
    for (const auto& name : kRegimeNames) out.push_back(default_regime(name));
    return out;
}

std::vector<int> ClusterOptions::k_range() const {
    std::vector<int> ks;
    if (k_min > 0)
        for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
    return ks;
}

void PipelineConfig::validate() const {
    if (cluster.k < 2) throw validation_error("cluster.k must be at least 2");
    if (cluster.k_min != 0 && (cluster.k_min < 2 || cluster.k_max < cluster.k_min))
        throw validation_error("cluster.k_range must satisfy 2 <= min <= max");
    if (cluster.restarts < 1 || cluster.iterations < 1 || cluster.silhouette_repetitions < 1)
        throw validation_error("cluster restarts, iterations and repetitions must be positive");
    if (n_modes < 1) throw validation_error("riser.n_modes must be positive");
    if (n_elements < 20 || simulate.n_elements < 20 || synth.sim_elements < 20)
        throw validation_error("element counts must be at least 20");
    if (grid_points < 2) throw validation_error("riser.grid_points must be at least 2");
    if (!(top_tension > 0.0)) throw validation_error("riser.top_tension must be positive");
    if (jobs < 0) throw validation_error("jobs must be non-negative");
    if (!(synth.duration > 0.0) || !(synth.sample_rate > 0.0) || synth.warmup < 0.0)
        throw validation_error("synth duration, sample_rate and warmup must be positive");
    if (synth.regimes.empty()) throw validation_error("synth.regimes is empty");
    for (const auto& s : synth.specs) s.validate();
    for (const auto& r : synth.regimes)
        if (std::find(kRegimeNames.begin(), kRegimeNames.end(), r) == kRegimeNames.end())
            throw validation_error("unknown regime '" + r + "' in synth.regimes");
    simulate.params.validate();
    if (report_bands < 1) throw validation_error("report.bands must be positive");
    if (!(evaluate.disp_factor > 1.0) || !(evaluate.freq_tolerance > 0.0))
        throw validation_error("evaluate.disp_factor must exceed 1 and freq_tolerance be positive");
}

std::vector<SyntheticRegimeSpec> PipelineConfig::regime_specs() const {
    std::vector<SyntheticRegimeSpec> out;
    for (const auto& name : synth.regimes)
        for (const auto& s : synth.specs)
            if (s.regime == name) out.push_back(s);
    return out;
}

clustering::GmmOptions PipelineConfig::gmm_options() const {
    clustering::GmmOptions o;
    o.n_restarts = cluster.restarts;
    o.n_iter = cluster.iterations;
    o.reg_eps = cluster.reg_eps;
    o.tol = cluster.tol;
    o.seed = derive_seed(seed, "cluster");
    return o;
}

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw validation_error("not a number: '" + v + "'");
    return x;
}

template <class Int>
Int to_int(const std::string& v) {
    Int x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw validation_error("not an integer: '" + v + "'");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw validation_error("not a boolean: '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string fmt(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, r.ptr};
}

struct Key {
    std::string section;
    std::string name;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

Key num(std::string sec, std::string name, double& x) {
    return {std::move(sec), std::move(name), [&x](const std::string& v) { x = to_double(v); },
            [&x] { return fmt(x); }};
}

template <class Int>
Key integer(std::string sec, std::string name, Int& x) {
    return {std::move(sec), std::move(name), [&x](const std::string& v) { x = to_int<Int>(v); },
            [&x] { return std::to_string(x); }};
}

Key flag(std::string sec, std::string name, bool& x) {
    return {std::move(sec), std::move(name), [&x](const std::string& v) { x = to_bool(v); },
            [&x] { return std::string(x ? "true" : "false"); }};
}

Key text(std::string sec, std::string name, std::string& x) {
    return {std::move(sec), std::move(name), [&x](const std::string& v) { x = v; }, [&x] { return x; }};
}

Key path(std::string sec, std::string name, std::filesystem::path& x) {
    return {std::move(sec), std::move(name), [&x](const std::string& v) { x = v; },
            [&x] { return x.string(); }};
}

template <class R>
Key pair(std::string sec, std::string name, R& r) {
    return {std::move(sec), std::move(name),
            [&r](const std::string& v) {
                const auto parts = split_list(v);
                if (parts.size() != 2) throw validation_error("expected 'min, max': '" + v + "'");
                r = R{to_double(parts[0]), to_double(parts[1])};
            },
            [&r] { return fmt(r.min) + ", " + fmt(r.max); }};
}

Key band(std::string sec, std::string name, dsp::Band& b) {
    return {std::move(sec), std::move(name),
            [&b](const std::string& v) {
                const auto parts = split_list(v);
                if (parts.size() != 2) throw validation_error("expected 'low, high': '" + v + "'");
                b = dsp::Band{to_double(parts[0]), to_double(parts[1])};
            },
            [&b] { return fmt(b.f_low) + ", " + fmt(b.f_high); }};
}

std::vector<Key> schema(PipelineConfig& c) {
    std::vector<Key> k;
    k.push_back(path("paths", "corpus", c.corpus));
    k.push_back(path("paths", "out", c.out));
    k.push_back(integer("run", "seed", c.seed));
    k.push_back(integer("run", "jobs", c.jobs));

    k.push_back(num("riser", "top_tension", c.top_tension));
    k.push_back(integer("riser", "n_elements", c.n_elements));
    k.push_back(integer("riser", "n_modes", c.n_modes));
    k.push_back(integer("riser", "grid_points", c.grid_points));

    k.push_back({"synth", "regimes",
                 [&c](const std::string& v) { c.synth.regimes = split_list(v); },
                 [&c] {
                     std::string s;
                     for (const auto& r : c.synth.regimes) s += (s.empty() ? "" : ", ") + r;
                     return s;
                 }});
    k.push_back(num("synth", "duration", c.synth.duration));
    k.push_back(num("synth", "sample_rate", c.synth.sample_rate));
    k.push_back(num("synth", "snr_db", c.synth.snr_db));
    k.push_back(num("synth", "warmup", c.synth.warmup));
    k.push_back(integer("synth", "sim_elements", c.synth.sim_elements));
    for (auto& s : c.synth.specs) {
        const std::string sec = s.regime;
        k.push_back(integer(sec, "count", s.count));
        k.push_back(pair(sec, "speed", s.speed));
        k.push_back(pair(sec, "shear", s.shear));
        k.push_back(pair(sec, "spread", s.spread));
        k.push_back(pair(sec, "wave_acc", s.wave_acc));
        k.push_back(pair(sec, "sway", s.sway));
        k.push_back(pair(sec, "riser_wave", s.riser_wave));
        k.push_back(num(sec, "turn_probability", s.turn_probability));
        k.push_back(flag(sec, "simulate", s.simulate));
        k.push_back(integer(sec, "seed", s.seed));
    }

    k.push_back(band("features", "wave_band", c.features.bands.wave));
    k.push_back(band("features", "low_band", c.features.bands.low));
    k.push_back(num("features", "taper", c.features.bands.taper));
    k.push_back(num("features", "min_duration", c.features.bands.min_duration));
    k.push_back(num("features", "reconstruct_f_min", c.features.reconstruct.f_min));
    k.push_back(num("features", "max_condition", c.features.reconstruct.max_condition));

    k.push_back(integer("cluster", "k", c.cluster.k));
    k.push_back({"cluster", "k_range",
                 [&c](const std::string& v) {
                     const auto parts = split_list(v);
                     if (parts.empty()) {
                         c.cluster.k_min = c.cluster.k_max = 0;
                         return;
                     }
                     if (parts.size() != 2) throw validation_error("expected 'min, max': '" + v + "'");
                     c.cluster.k_min = to_int<int>(parts[0]);
                     c.cluster.k_max = to_int<int>(parts[1]);
                 },
                 [&c] {
                     return c.cluster.k_min == 0 ? std::string()
                                                 : std::to_string(c.cluster.k_min) + ", " +
                                                       std::to_string(c.cluster.k_max);
                 }});
    k.push_back(integer("cluster", "restarts", c.cluster.restarts));
    k.push_back(integer("cluster", "iterations", c.cluster.iterations));
    k.push_back(num("cluster", "reg_eps", c.cluster.reg_eps));
    k.push_back(num("cluster", "tol", c.cluster.tol));
    k.push_back(integer("cluster", "silhouette_repetitions", c.cluster.silhouette_repetitions));

    auto& th = c.classify.thresholds;
    k.push_back(num("classify", "viv_peak", th.viv_peak));
    k.push_back(num("classify", "small_peak", th.small_peak));
    k.push_back(num("classify", "strouhal_distance", th.strouhal_distance));
    k.push_back(num("classify", "wave_low", th.wave_low));
    k.push_back(num("classify", "wave_high", th.wave_high));
    k.push_back(text("classify", "ref_a", th.ref_a));
    k.push_back(text("classify", "ref_b", th.ref_b));
    k.push_back(num("classify", "strouhal_number", c.classify.strouhal_number));
    k.push_back(num("classify", "diameter", c.classify.diameter));
    k.push_back(flag("classify", "recalibrate", c.classify.recalibrate));
    k.push_back(integer("classify", "seg_len", c.classify.seg_len));

    auto& p = c.simulate.params;
    auto& so = c.simulate.sim;
    k.push_back(flag("simulate", "enabled", c.simulate.enabled));
    k.push_back(integer("simulate", "n_elements", c.simulate.n_elements));
    k.push_back(num("simulate", "duration", so.duration));
    k.push_back(num("simulate", "dt", so.dt));
    k.push_back(num("simulate", "max_dt", so.max_dt));
    k.push_back(num("simulate", "output_dt", so.output_dt));
    k.push_back(num("simulate", "ramp_fraction", so.ramp_fraction));
    k.push_back(num("simulate", "discard_fraction", so.discard_fraction));
    k.push_back(num("simulate", "damping_ratio", so.damping_ratio));
    k.push_back(num("simulate", "c_d", p.c_d));
    k.push_back(num("simulate", "c_m", p.c_m));
    k.push_back(num("simulate", "c_vy", p.c_vy));
    k.push_back(num("simulate", "c_vx", p.c_vx));
    k.push_back(num("simulate", "f0_y", p.f0_y));
    k.push_back(pair("simulate", "fy_range", p.fy_range));
    k.push_back(num("simulate", "f0_x", p.f0_x));
    k.push_back(pair("simulate", "fx_range", p.fx_range));

    k.push_back(num("evaluate", "disp_factor", c.evaluate.disp_factor));
    k.push_back(num("evaluate", "freq_tolerance", c.evaluate.freq_tolerance));
    k.push_back(integer("report", "bands", c.report_bands));
    return k;
}

}  // namespace

PipelineConfig parse_config(const std::string& content) {
    // the INI reader only knows ';' comments
    std::string cleaned;
    std::istringstream lines(content);
    std::string line;
    while (std::getline(lines, line)) {
        const std::string t = trim(line);
        cleaned += (!t.empty() && t[0] == '#') ? std::string() : t;
        cleaned += '\n';
    }
    boost::property_tree::ptree tree;
    try {
        std::istringstream in(cleaned);
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw validation_error("config: " + std::string(e.what()));
    }

    PipelineConfig c;
    auto keys = schema(c);
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw validation_error("config: key '" + section + "' outside a section");
        if (std::none_of(keys.begin(), keys.end(), [&](const Key& k) { return k.section == section; }))
            throw validation_error("config: unknown section [" + section + "]");
        for (const auto& [name, value] : body) {
            auto it = std::find_if(keys.begin(), keys.end(),
                                   [&](const Key& k) { return k.section == section && k.name == name; });
            if (it == keys.end()) throw validation_error("config: unknown key [" + section + "] " + name);
            try {
                it->set(trim(value.data()));
            } catch (const Error& e) {
                throw validation_error("config: [" + section + "] " + name + ": " + e.what());
            }
        }
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw io_error("config file not found: " + path.string());
    return parse_config(read_file(path));
}

std::string config_text(const PipelineConfig& config, bool with_locations) {
    PipelineConfig copy = config;
    std::string out, section;
    for (const auto& k : schema(copy)) {
        if (!with_locations && (k.section == "paths" || (k.section == "run" && k.name == "jobs"))) continue;
        if (k.section != section) {
            out += (out.empty() ? "[" : "\n[") + k.section + "]\n";
            section = k.section;
        }
        out += k.name + " = " + k.get() + "\n";
    }
    return out;
}

}  // namespace vivclust::pipeline
