#pragma once

#include "vivclust/core/types.hpp"
#include "vivclust/pipeline/config.hpp"
#include "vivclust/viv/beam.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace vivclust::pipeline {

// Uniform and normal draws built directly on the 64-bit engine so a seed gives the
// same corpus with every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();  // [0, 1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double uniform(Range r) { return uniform(r.min, r.max); }
    double normal();   // Box-Muller

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Environment drawn for one event; stored in the event metadata.
struct EnvironmentDraw {
    double speed = 0.0;
    double shear = 0.0;
    double spread = 0.0;
    double heading = 0.0;       // surface current direction, rad from x
    bool power_law = false;     // else linear shear
    bool turn = false;
    double turn_depth = 0.0;
    double wave_acc = 0.0;
    double wave_heading = 0.0;
    double sway = 0.0;
    double riser_wave = 0.0;
};

EnvironmentDraw draw_environment(const SyntheticRegimeSpec& spec, Rng& rng);

// Current on a 20 m depth grid every duration / 6 s, with random gaps above 100 m depth.
CurrentProfile synthetic_current(const EnvironmentDraw& env, double water_depth, double duration,
                                 Rng& rng);

// One event. model (built from riser) drives the simulator when spec.simulate is set
// and supplies the wave-band mode shapes; otherwise the riser follows the top sway
// rigidly. seed fixes every random draw.
MeasurementEvent synth_event(const SyntheticRegimeSpec& spec, int index, std::uint64_t seed,
                             const RiserProperties& riser, const viv::BeamModel& model,
                             const SynthOptions& options);

// All events of all specs, generated in parallel. Event i of spec s uses
// derive_seed(spec.seed or derive_seed(root, regime), i).
std::vector<MeasurementEvent> synth_generate(const std::vector<SyntheticRegimeSpec>& specs,
                                             const RiserProperties& riser,
                                             const SynthOptions& options, std::uint64_t root_seed);

// Regime parameterisations and generation settings, written next to the events.
nlohmann::json corpus_manifest(const std::vector<SyntheticRegimeSpec>& specs,
                               const SynthOptions& options, std::uint64_t root_seed,
                               const std::vector<MeasurementEvent>& events);

inline constexpr const char* kCorpusManifest = "corpus.manifest";

// Events as <id>.json plus corpus.manifest, each written atomically.
void write_corpus(const std::filesystem::path& dir, const std::vector<MeasurementEvent>& events,
                  const nlohmann::json& manifest);

}  // namespace vivclust::pipeline
