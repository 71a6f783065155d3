// vivclust command line: one subcommand per pipeline stage plus `run`.
#include "vivclust/core/error.hpp"
#include "vivclust/core/fixture.hpp"
#include "vivclust/core/parallel.hpp"
#include "vivclust/pipeline/config.hpp"
#include "vivclust/pipeline/stages.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>

using namespace vivclust;

int main(int argc, char** argv) {
    CLI::App app{"Environmental-load clustering and VIV response prediction for marine risers"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string corpus_dir;
    std::optional<int> jobs;
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--seed", seed, "Root seed (overrides [run] seed)");
    app.add_option("--out", out_dir, "Run directory (overrides [paths] out)");
    app.add_option("--corpus", corpus_dir, "Corpus directory (overrides [paths] corpus)");
    app.add_option("--jobs", jobs, "Worker threads, 0 for the OpenMP default")->check(CLI::NonNegativeNumber);

    const std::vector<std::pair<std::string, std::string>> commands{
        {"synth", "Generate the synthetic corpus"},
        {"ingest", "Read and validate the corpus"},
        {"features", "Extract and standardise the seven environmental parameters"},
        {"cluster", "Fit the Gaussian mixture and score silhouettes"},
        {"classify", "Compute response statistics and labels"},
        {"simulate", "Predict riser responses with the VIV simulator"},
        {"evaluate", "Per-cluster prediction error table"},
        {"report", "Per-cluster characterisation tables"},
        {"run", "ingest through report"},
        {"config", "Print the effective configuration"},
        {"fixture", "Print the bundled riser properties and eigenfrequency table"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        pipeline::PipelineConfig config = config_path.empty() ? pipeline::PipelineConfig{}
                                                              : pipeline::load_config(config_path);
        if (seed) config.seed = *seed;
        if (!out_dir.empty()) config.out = out_dir;
        if (!corpus_dir.empty()) config.corpus = corpus_dir;
        if (jobs) config.jobs = *jobs;
        config.validate();
        set_num_threads(config.jobs);

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "config") {
            std::cout << pipeline::config_text(config);
            return 0;
        }
        if (cmd == "fixture") {
            const auto fx = helland_hansen_fixture();
            nlohmann::json j{{"riser", to_json(fx.riser)}, {"eigenfrequencies", to_json(fx.eigen)}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        pipeline::RunContext ctx(config);
        const auto start = std::chrono::steady_clock::now();
        if (cmd == "run")
            pipeline::run_pipeline(ctx);
        else
            pipeline::run_stage(ctx, cmd);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cerr << cmd << " finished in " << secs << " s\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
