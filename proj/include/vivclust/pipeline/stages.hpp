#pragma once

#include "vivclust/core/types.hpp"
#include "vivclust/features/features.hpp"
#include "vivclust/pipeline/config.hpp"
#include "vivclust/response/modal.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vivclust::pipeline {

inline constexpr const char* kVersion = "0.1.0";

// Shared state of one invocation. Stages read their inputs from the run directory,
// so any stage can be rerun alone; loaded events are cached between stages.
class RunContext {
public:
    explicit RunContext(PipelineConfig config);

    const PipelineConfig& config() const { return config_; }
    const RiserProperties& riser() const { return riser_; }
    std::filesystem::path out(const std::string& rel = {}) const;

    // Usable events listed by the ingest stage, loaded on first use.
    const std::vector<MeasurementEvent>& events();
    void set_events(std::vector<MeasurementEvent> events);
    const response::ModalBasis& basis();

    // Progress lines go here (stderr by default).
    std::function<void(const std::string&)> log;

private:
    PipelineConfig config_;
    RiserProperties riser_;
    std::optional<std::vector<MeasurementEvent>> events_;
    std::unique_ptr<response::ModalBasis> basis_;
};

void stage_synth(RunContext& ctx);
void stage_ingest(RunContext& ctx);
void stage_features(RunContext& ctx);
void stage_cluster(RunContext& ctx);
void stage_classify(RunContext& ctx);
void stage_simulate(RunContext& ctx);
void stage_evaluate(RunContext& ctx);
void stage_report(RunContext& ctx);

// Runs one named stage (synth, ingest, features, cluster, classify, simulate,
// evaluate, report), rethrowing failures as "<stage>: message" with the same kind,
// then refreshes the manifest.
void run_stage(RunContext& ctx, const std::string& name);

// ingest through report, halting at the first failure. Outputs of completed stages
// are kept.
void run_pipeline(RunContext& ctx);

// manifest.json: config hash, seed, version and a content hash of every file below
// the run directory.
nlohmann::json build_manifest(RunContext& ctx);
void write_manifest(RunContext& ctx);

// Per-cluster characterisation. Inputs are row-aligned by event.
struct ClusterReportRow {
    int cluster = 0;
    std::size_t size = 0;
    std::vector<double> mean;        // per feature
    std::vector<double> std;         // population
    std::vector<std::string> band;   // low / medium / high of the cluster means
    std::map<std::string, std::size_t> labels;  // response label counts
};

// Bands split the clusters ranked by mean into n_bands groups of near-equal size
// (terciles for 3).
std::vector<ClusterReportRow> cluster_report(const std::vector<int>& clusters,
                                             const Eigen::MatrixXd& features,
                                             const std::vector<std::string>& labels,
                                             int n_bands = 3);

std::string band_name(int band, int n_bands);

// Minimal CSV helpers for the run artifacts.
using CsvTable = std::vector<std::map<std::string, std::string>>;
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace vivclust::pipeline
