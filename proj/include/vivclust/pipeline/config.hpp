#pragma once

#include "vivclust/clustering/gmm.hpp"
#include "vivclust/features/features.hpp"
#include "vivclust/response/classify.hpp"
#include "vivclust/viv/evaluate.hpp"
#include "vivclust/viv/hydro.hpp"
#include "vivclust/viv/riser_sim.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vivclust::pipeline {

struct Range {
    double min = 0.0;
    double max = 0.0;
};

// Environment ranges of one synthetic regime. Ranges are chosen for separability,
// not to mimic any particular site.
struct SyntheticRegimeSpec {
    std::string regime;           // viv_dominated | wave_dominated | quiescent | combined
    int count = 20;
    Range speed;                  // surface current speed, m/s
    Range shear;                  // fractional speed loss from surface to seabed
    Range spread;                 // direction turn from surface to seabed, rad
    Range wave_acc;               // vessel wave-band acceleration amplitude, m/s^2
    Range sway;                   // vessel low-frequency sway amplitude, m
    Range riser_wave;             // riser wave-band modal acceleration amplitude, m/s^2
    double turn_probability = 0;  // chance of a 180 degree direction-turning layer
    bool simulate = true;         // riser response from the simulator, else rigid sway
    std::uint64_t seed = 0;       // 0: derived from the root seed

    void validate() const;
};

inline const std::vector<std::string> kRegimeNames{"viv_dominated", "wave_dominated", "quiescent",
                                                   "combined"};

// Defaults for the four regime names; throws a validation Error for anything else.
SyntheticRegimeSpec default_regime(const std::string& regime);

std::vector<SyntheticRegimeSpec> all_default_regimes();

struct SynthOptions {
    std::vector<std::string> regimes{"viv_dominated", "wave_dominated", "quiescent"};
    std::vector<SyntheticRegimeSpec> specs = all_default_regimes();  // one per name, fixed order
    double duration = 2040.0;
    double sample_rate = 2.0;  // Hz
    double snr_db = 20.0;
    double warmup = 400.0;     // simulated before the recorded window, s
    int sim_elements = 100;
};

struct ClusterOptions {
    int k = 3;
    int k_min = 0;  // silhouette-vs-K sweep over [k_min, k_max]; 0 skips it
    int k_max = 0;
    int restarts = 100;
    int iterations = 100;
    double reg_eps = -1.0;
    double tol = 0.0;
    int silhouette_repetitions = 10;

    std::vector<int> k_range() const;
};

struct ClassifyOptions {
    response::ClassifyThresholds thresholds;
    double strouhal_number = 0.28;
    double diameter = 1.13;    // m, buoyancy-section diameter used for f_St
    bool recalibrate = false;  // peak thresholds from the corpus CDF (0.7 / 0.3)
    std::size_t seg_len = 1024;
};

struct SimulateOptions {
    bool enabled = true;
    int n_elements = 100;
    viv::EmpiricalParameters params;
    viv::RiserSimOptions sim = [] {
        viv::RiserSimOptions o;
        o.duration = 0.0;  // 0: the event duration
        return o;
    }();
};

struct PipelineConfig {
    std::filesystem::path corpus = "corpus";
    std::filesystem::path out = "run";
    std::uint64_t seed = 1;
    int jobs = 0;  // 0: OpenMP default

    double top_tension = 3.5e6;
    int n_elements = 100;  // beam used for the modal basis
    int n_modes = 5;
    int grid_points = 1001;

    SynthOptions synth;
    features::FeatureOptions features;
    ClusterOptions cluster;
    ClassifyOptions classify;
    SimulateOptions simulate;
    viv::EvaluationOptions evaluate;
    int report_bands = 3;

    // Throws a validation Error naming the first inconsistent value.
    void validate() const;
    std::vector<SyntheticRegimeSpec> regime_specs() const;
    clustering::GmmOptions gmm_options() const;
};

// INI text: [section] headers, key = value lines, '#' or ';' comments. Unknown
// sections and keys are validation Errors. Keys absent from the file keep defaults.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

// Every key with its effective value, in schema order; parse_config(config_text(c))
// reproduces c. Without locations, paths and the thread count are left out: that
// text is what the run hash covers.
std::string config_text(const PipelineConfig& config, bool with_locations = true);

}  // namespace vivclust::pipeline
