#include "vivclust/pipeline/stages.hpp"

#include "vivclust/clustering/gmm.hpp"
#include "vivclust/clustering/silhouette.hpp"
#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"
#include "vivclust/core/event_io.hpp"
#include "vivclust/core/fixture.hpp"
#include "vivclust/core/parallel.hpp"
#include "vivclust/core/validation.hpp"
#include "vivclust/pipeline/synth.hpp"
#include "vivclust/response/classify.hpp"
#include "vivclust/response/spectral.hpp"
#include "vivclust/viv/beam.hpp"
#include "vivclust/viv/evaluate.hpp"
#include "vivclust/viv/riser_sim.hpp"

#include <charconv>
#include <Eigen/Core>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace vivclust::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shortest text that parses back to the same double.
std::string num(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, r.ptr};
}

std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
}

void write_text(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw io_error("cannot create " + path.parent_path().string() + ": " + ec.message());
    write_file_atomic(path, content);
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw validation_error(path.string() + ": " + e.what());
    }
}

void require_file(const fs::path& path, const std::string& producer) {
    if (!fs::exists(path))
        throw io_error("missing " + path.string() + " (run the " + producer + " stage first)");
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw validation_error("not a number in CSV: '" + s + "'");
    }
}

// Columns of the response-stats CSV that carry per-sensor values.
const char* const kSensorColumns[] = {"acc_rms_main", "acc_rms_cross", "kurtosis_main",
                                      "kurtosis_cross", "peak_psd", "peak_freq"};

std::map<std::string, double> read_angles(RunContext& ctx) {
    const fs::path p = ctx.out("features/standardization.json");
    require_file(p, "features");
    std::map<std::string, double> out;
    const json j = read_json(p);
    for (const auto& [id, a] : j.at("angles").items()) out[id] = a.get<double>();
    return out;
}

std::map<std::string, int> read_assignments(RunContext& ctx) {
    const fs::path p = ctx.out("cluster/assignments.csv");
    require_file(p, "cluster");
    std::map<std::string, int> out;
    for (const auto& row : read_csv(p)) out[row.at("event_id")] = std::stoi(row.at("cluster"));
    return out;
}

// Ground-truth regime per event id, when the corpus came from the generator.
std::map<std::string, std::string> regime_labels(RunContext& ctx) {
    std::map<std::string, std::string> out;
    const fs::path p = ctx.config().corpus / kCorpusManifest;
    if (!fs::exists(p)) return out;
    const json m = read_json(p);
    if (!m.contains("labels")) return out;
    for (const auto& [id, r] : m.at("labels").items()) out[id] = r.get<std::string>();
    return out;
}

viv::BeamModel beam_for(const RiserProperties& riser, double tension, int n_elements) {
    RiserProperties r = riser;
    r.top_tension = tension;
    viv::BeamOptions bo;
    bo.n_elements = n_elements;
    return viv::build_beam_model(r, bo);
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
    std::istringstream is(read_file(path));
    std::string line;
    CsvTable rows;
    if (!std::getline(is, line)) return rows;
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::map<std::string, std::string> row;
        std::size_t i = 0;
        while (std::getline(ls, cell, ',')) {
            if (i >= header.size()) throw validation_error(path.string() + ": row wider than header");
            row[header[i++]] = cell;
        }
        if (i != header.size()) throw validation_error(path.string() + ": row narrower than header");
        rows.push_back(std::move(row));
    }
    return rows;
}

RunContext::RunContext(PipelineConfig config)
    : log([](const std::string& s) { std::cerr << s << "\n"; }), config_(std::move(config)) {
    riser_ = helland_hansen_fixture().riser;
    riser_.top_tension = config_.top_tension;
}

fs::path RunContext::out(const std::string& rel) const {
    return rel.empty() ? config_.out : config_.out / rel;
}

void RunContext::set_events(std::vector<MeasurementEvent> events) { events_ = std::move(events); }

const std::vector<MeasurementEvent>& RunContext::events() {
    if (events_) return *events_;
    const fs::path list = out("ingest/events.csv");
    require_file(list, "ingest");
    std::vector<fs::path> files;
    for (const auto& row : read_csv(list))
        if (row.at("usable") == "true") files.push_back(config_.corpus / row.at("file"));
    std::vector<MeasurementEvent> events(files.size());
    parallel_for(files.size(), [&](std::size_t i) { events[i] = read_event(files[i]); });
    events_ = std::move(events);
    return *events_;
}

const response::ModalBasis& RunContext::basis() {
    if (!basis_) {
        const auto model = beam_for(riser_, config_.top_tension, config_.n_elements);
        basis_ = std::make_unique<response::ModalBasis>(
            response::make_modal_basis(model, config_.n_modes, config_.grid_points));
    }
    return *basis_;
}

// ---- synth -------------------------------------------------------------------

void stage_synth(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto specs = c.regime_specs();
    auto events = synth_generate(specs, ctx.riser(), c.synth, derive_seed(c.seed, "synth"));
    write_corpus(c.corpus, events, corpus_manifest(specs, c.synth, c.seed, events));
    ctx.log("synth: " + std::to_string(events.size()) + " events in " + c.corpus.string());
}

// ---- ingest ------------------------------------------------------------------

void stage_ingest(RunContext& ctx) {
    const auto& c = ctx.config();
    if (!fs::is_directory(c.corpus)) throw io_error("corpus directory not found: " + c.corpus.string());
    const auto files = list_event_files(c.corpus);
    if (files.empty()) throw validation_error("no event files in " + c.corpus.string());

    std::vector<MeasurementEvent> events(files.size());
    std::vector<ValidationReport> reports(files.size());
    ValidationOptions vo;
    vo.riser_length = ctx.riser().length;
    vo.water_depth = ctx.riser().water_depth;
    parallel_for(files.size(), [&](std::size_t i) {
        events[i] = read_event(files[i]);
        reports[i] = validate_event(events[i], vo);
    });

    std::set<std::string> seen;
    std::string table = join({"event_id", "file", "usable", "violations"});
    json report = json::array();
    std::vector<MeasurementEvent> usable;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!seen.insert(events[i].id).second) throw validation_error("duplicate event id " + events[i].id);
        const bool ok = reports[i].usable();
        json v = json::array();
        for (const auto& x : reports[i].violations)
            v.push_back({{"field", x.field}, {"message", x.message}, {"hard", x.hard}});
        report.push_back({{"event_id", events[i].id}, {"usable", ok}, {"violations", v}});
        table += join({events[i].id, files[i].filename().string(), ok ? "true" : "false",
                       std::to_string(reports[i].violations.size())});
        if (ok) usable.push_back(std::move(events[i]));
    }
    if (usable.empty()) throw validation_error("no usable events in " + c.corpus.string());
    write_text(ctx.out("ingest/events.csv"), table);
    write_text(ctx.out("ingest/validation.json"), report.dump(2) + "\n");
    ctx.log("ingest: " + std::to_string(usable.size()) + " of " + std::to_string(files.size()) +
            " events usable");
    ctx.set_events(std::move(usable));
}

// ---- features ----------------------------------------------------------------

void stage_features(RunContext& ctx) {
    const auto fm = features::build_feature_matrix(ctx.events(), ctx.basis(), ctx.config().features);
    write_text(ctx.out("features/features.csv"), features::features_csv(fm));
    write_text(ctx.out("features/standardization.json"), features::standardization_json(fm));
    ctx.log("features: " + std::to_string(fm.ids.size()) + " rows, " + std::to_string(fm.excluded.size()) +
            " excluded");
}

// ---- cluster -----------------------------------------------------------------

void stage_cluster(RunContext& ctx) {
    const auto& c = ctx.config();
    const fs::path fp = ctx.out("features/features.csv");
    require_file(fp, "features");
    const auto fm = features::read_features_csv(read_file(fp));
    const Eigen::MatrixXd& X = fm.standardized;
    const auto opts = c.gmm_options();

    const auto model = clustering::gmm_fit(X, c.cluster.k, opts);
    const Eigen::MatrixXd resp = clustering::e_step(model, X);
    const auto labels = clustering::predict_labels(model, X);

    std::string assign = join({"event_id", "cluster", "max_responsibility"});
    for (std::size_t i = 0; i < fm.ids.size(); ++i)
        assign += join({fm.ids[i], std::to_string(labels[i]), num(resp.row(static_cast<Eigen::Index>(i)).maxCoeff())});
    write_text(ctx.out("cluster/assignments.csv"), assign);
    write_text(ctx.out("cluster/model.json"), clustering::to_json(model).dump(2) + "\n");

    json summary{{"k", c.cluster.k},
                 {"events", fm.ids.size()},
                 {"loglik", model.loglik_trace.empty() ? 0.0 : model.loglik_trace.back()},
                 {"best_restart", model.best_restart},
                 {"failed_restarts", model.failed_restarts},
                 {"reseeds", model.reseeds},
                 {"reg_eps", model.reg_eps}};

    const std::set<int> distinct(labels.begin(), labels.end());
    std::string sil = join({"cluster", "size", "silhouette"});
    if (distinct.size() >= 2) {
        const auto rep = clustering::silhouette(X, labels);
        for (const auto& [k, s] : rep.per_cluster)
            sil += join({std::to_string(k),
                         std::to_string(std::count(labels.begin(), labels.end(), k)), num(s)});
        sil += join({"global", std::to_string(labels.size()), num(rep.global)});
        summary["silhouette"] = rep.global;
    } else {
        summary["silhouette"] = nullptr;
        summary["warning"] = "all events fell in one cluster";
    }
    write_text(ctx.out("cluster/silhouette.csv"), sil);

    if (const auto ks = c.cluster.k_range(); !ks.empty()) {
        std::string t = join({"k", "score", "variability", "collapsed", "repetitions"});
        for (int k : ks) {
            if (k > X.rows() - 1) break;
            const auto r = clustering::silhouette_at_k(X, k, opts, c.cluster.silhouette_repetitions);
            t += join({std::to_string(k), num(r.score), num(r.variability), std::to_string(r.collapsed),
                       std::to_string(r.repetition_scores.size())});
        }
        write_text(ctx.out("cluster/silhouette_vs_k.csv"), t);
    }

    const auto truth = regime_labels(ctx);
    if (!truth.empty()) {
        std::map<std::string, int> code;
        std::vector<int> a, b;
        for (std::size_t i = 0; i < fm.ids.size(); ++i) {
            const auto it = truth.find(fm.ids[i]);
            if (it == truth.end()) continue;
            a.push_back(code.emplace(it->second, static_cast<int>(code.size())).first->second);
            b.push_back(labels[i]);
        }
        if (!a.empty()) summary["ari_vs_regime"] = clustering::adjusted_rand_index(a, b);
    }
    write_text(ctx.out("cluster/summary.json"), summary.dump(2) + "\n");
    ctx.log("cluster: K=" + std::to_string(c.cluster.k) + " on " + std::to_string(fm.ids.size()) + " events");
}

// ---- classify ----------------------------------------------------------------

void stage_classify(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto angles = read_angles(ctx);
    const auto feat = features::read_features_csv(read_file(ctx.out("features/features.csv")));
    std::map<std::string, double> umax;
    for (std::size_t i = 0; i < feat.ids.size(); ++i) umax[feat.ids[i]] = feat.rows[i].umax;

    std::vector<const MeasurementEvent*> todo;
    for (const auto& e : ctx.events())
        if (angles.count(e.id)) todo.push_back(&e);
    response::StatsOptions so;
    so.seg_len = c.classify.seg_len;
    so.reconstruct = c.features.reconstruct;
    const auto& basis = ctx.basis();
    std::vector<response::ResponseStats> stats(todo.size());
    parallel_for(todo.size(), [&](std::size_t i) {
        stats[i] = response::response_stats(*todo[i], basis, angles.at(todo[i]->id), so);
    });

    auto th = c.classify.thresholds;
    json calibration{{"recalibrated", false}};
    if (c.classify.recalibrate) {
        std::vector<double> peaks;
        for (const auto& s : stats) {
            const auto a = s.sensors.find(th.ref_a), b = s.sensors.find(th.ref_b);
            if (a == s.sensors.end() || b == s.sensors.end())
                throw validation_error("reference sensors missing from response stats");
            peaks.push_back(std::max(a->second.peak_psd, b->second.peak_psd));
        }
        const response::EmpiricalCdf cdf(peaks);
        th.viv_peak = cdf.quantile(0.7);
        th.small_peak = cdf.quantile(0.3);
        calibration = {{"recalibrated", true}, {"viv_quantile", 0.7}, {"small_quantile", 0.3}};
    }

    std::vector<std::string> sensor_ids;
    if (!stats.empty())
        for (const auto& [sid, s] : stats.front().sensors) sensor_ids.push_back(sid);
    std::vector<std::string> header{"event_id", "label", "f_strouhal", "freq_dom", "ydisp_max"};
    for (const auto& sid : sensor_ids)
        for (const char* col : kSensorColumns) header.push_back(sid + "_" + col);
    std::string table = join(header);

    const auto truth = regime_labels(ctx);
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::map<std::string, std::size_t>> by_regime;
    for (std::size_t i = 0; i < todo.size(); ++i) {
        const auto& id = todo[i]->id;
        const double fst = viv::strouhal_frequency(umax.at(id), c.classify.diameter, c.classify.strouhal_number);
        const auto label = response::to_string(response::classify_event(stats[i], fst, th));
        ++counts[label];
        if (const auto it = truth.find(id); it != truth.end()) ++by_regime[it->second][label];
        std::vector<std::string> row{id, label, num(fst), num(stats[i].freq_dom), num(stats[i].ydisp_max)};
        for (const auto& sid : sensor_ids) {
            const auto& s = stats[i].sensors.at(sid);
            for (double v : {s.acc_rms_main, s.acc_rms_cross, s.kurtosis_main, s.kurtosis_cross, s.peak_psd, s.peak_freq})
                row.push_back(num(v));
        }
        table += join(row);
    }
    write_text(ctx.out("classify/response_stats.csv"), table);
    json summary{{"thresholds",
                  {{"viv_peak", th.viv_peak},
                   {"small_peak", th.small_peak},
                   {"strouhal_distance", th.strouhal_distance},
                   {"wave_low", th.wave_low},
                   {"wave_high", th.wave_high},
                   {"ref_a", th.ref_a},
                   {"ref_b", th.ref_b}}},
                 {"calibration", calibration},
                 {"labels", counts}};
    if (!by_regime.empty()) summary["labels_by_regime"] = by_regime;
    write_text(ctx.out("classify/summary.json"), summary.dump(2) + "\n");
    ctx.log("classify: " + std::to_string(todo.size()) + " events");
}

// ---- simulate ----------------------------------------------------------------

void stage_simulate(RunContext& ctx) {
    const auto& c = ctx.config();
    if (!c.simulate.enabled) {
        ctx.log("simulate: disabled");
        return;
    }
    const auto angles = read_angles(ctx);
    std::vector<const MeasurementEvent*> todo;
    for (const auto& e : ctx.events())
        if (angles.count(e.id)) todo.push_back(&e);

    const auto& basis = ctx.basis();
    std::map<double, viv::BeamModel> models;
    for (const auto* e : todo) {
        const double t = e->top_tension.value_or(c.top_tension);
        if (!models.count(t)) models.emplace(t, beam_for(ctx.riser(), t, c.simulate.n_elements));
    }

    std::vector<viv::SimResult> results(todo.size());
    parallel_for(todo.size(), [&](std::size_t i) {
        const MeasurementEvent& e = *todo[i];
        viv::RiserLoadCase load;
        load.current = e.current;
        std::tie(load.top_x, load.top_y) = features::estimated_top_motion(e, basis, c.features);
        viv::RiserSimOptions so = c.simulate.sim;
        if (so.duration <= 0.0) so.duration = e.duration;
        so.main_angle = angles.at(e.id);
        results[i] = viv::simulate_riser(models.at(e.top_tension.value_or(c.top_tension)), load,
                                         c.simulate.params, so);
    });

    std::string table = join({"event_id", "max_disp_std", "max_disp_std_main", "dominant_freq",
                              "dominant_freq_cf", "a_over_d", "dt", "steps"});
    for (std::size_t i = 0; i < todo.size(); ++i) {
        const auto& r = results[i];
        const auto& id = todo[i]->id;
        json j{{"event_id", id},
               {"max_disp_std", r.max_disp_std_cross},
               {"max_disp_std_main", r.max_disp_std_main},
               {"dominant_freq", r.dominant_freq},
               {"dominant_freq_cf", r.dominant_freq_cf},
               {"a_over_d", r.a_over_d},
               {"dt", r.dt},
               {"steps", r.steps},
               {"discarded_fraction", c.simulate.sim.discard_fraction},
               {"node_z", r.node_z},
               {"std_main", r.std_main},
               {"std_cross", r.std_cross}};
        write_text(ctx.out("simulate/cases/" + id + ".json"), j.dump(2) + "\n");
        table += join({id, num(r.max_disp_std_cross), num(r.max_disp_std_main), num(r.dominant_freq),
                       num(r.dominant_freq_cf), num(r.a_over_d), num(r.dt), std::to_string(r.steps)});
    }
    write_text(ctx.out("simulate/summary.csv"), table);
    ctx.log("simulate: " + std::to_string(todo.size()) + " cases");
}

// ---- evaluate ----------------------------------------------------------------

void stage_evaluate(RunContext& ctx) {
    if (!ctx.config().simulate.enabled) {
        ctx.log("evaluate: skipped, simulation disabled");
        return;
    }
    const auto assign = read_assignments(ctx);
    const fs::path sp = ctx.out("simulate/summary.csv"), rp = ctx.out("classify/response_stats.csv");
    require_file(sp, "simulate");
    require_file(rp, "classify");
    std::map<std::string, std::map<std::string, std::string>> measured;
    for (auto& row : read_csv(rp)) measured[row.at("event_id")] = row;

    std::vector<viv::PredictionPair> pairs;
    for (const auto& row : read_csv(sp)) {
        const auto& id = row.at("event_id");
        const auto a = assign.find(id);
        const auto m = measured.find(id);
        if (a == assign.end() || m == measured.end()) continue;
        viv::PredictionPair p;
        p.event_id = id;
        p.cluster = a->second;
        p.predicted_disp = to_double(row.at("max_disp_std"));
        p.predicted_freq = to_double(row.at("dominant_freq"));
        p.measured_disp = to_double(m->second.at("ydisp_max"));
        p.measured_freq = to_double(m->second.at("freq_dom"));
        pairs.push_back(p);
    }
    const auto table = viv::evaluate_predictions(pairs, ctx.config().evaluate);

    std::string pt = join({"event_id", "cluster", "predicted_disp", "measured_disp", "predicted_freq", "measured_freq"});
    for (const auto& p : pairs)
        pt += join({p.event_id, std::to_string(p.cluster), num(p.predicted_disp), num(p.measured_disp),
                    num(p.predicted_freq), num(p.measured_freq)});
    write_text(ctx.out("evaluate/pairs.csv"), pt);

    std::string et = join({"cluster", "cases", "disp_errors", "freq_errors", "undefined_ratio",
                           "pct_disp_error", "pct_freq_error"});
    for (const auto& r : table)
        et += join({std::to_string(r.cluster), std::to_string(r.cases), std::to_string(r.disp_errors),
                    std::to_string(r.freq_errors), std::to_string(r.undefined_ratio), num(r.pct_disp_error),
                    num(r.pct_freq_error)});
    write_text(ctx.out("evaluate/error_table.csv"), et);
    ctx.log("evaluate: " + std::to_string(pairs.size()) + " pairs");
}

// ---- report ------------------------------------------------------------------

std::string band_name(int band, int n_bands) {
    if (n_bands == 3) {
        static const char* names[] = {"low", "medium", "high"};
        return names[band];
    }
    return "band" + std::to_string(band + 1);
}

std::vector<ClusterReportRow> cluster_report(const std::vector<int>& clusters, const Eigen::MatrixXd& X,
                                             const std::vector<std::string>& labels, int n_bands) {
    if (static_cast<Eigen::Index>(clusters.size()) != X.rows() || (!labels.empty() && labels.size() != clusters.size()))
        throw validation_error("cluster report inputs are not row-aligned");
    std::map<int, std::vector<Eigen::Index>> members;
    for (std::size_t i = 0; i < clusters.size(); ++i) members[clusters[i]].push_back(static_cast<Eigen::Index>(i));

    std::vector<ClusterReportRow> rows;
    for (const auto& [k, idx] : members) {
        ClusterReportRow r;
        r.cluster = k;
        r.size = idx.size();
        for (Eigen::Index col = 0; col < X.cols(); ++col) {
            double mean = 0.0;
            for (auto i : idx) mean += X(i, col);
            mean /= static_cast<double>(idx.size());
            double var = 0.0;
            for (auto i : idx) var += (X(i, col) - mean) * (X(i, col) - mean);
            r.mean.push_back(mean);
            r.std.push_back(std::sqrt(var / static_cast<double>(idx.size())));
        }
        if (!labels.empty())
            for (auto i : idx) ++r.labels[labels[static_cast<std::size_t>(i)]];
        rows.push_back(std::move(r));
    }

    // rank the cluster means per feature and cut the ranking into bands
    const std::size_t C = rows.size();
    for (auto& r : rows) r.band.assign(static_cast<std::size_t>(X.cols()), "");
    for (Eigen::Index col = 0; col < X.cols(); ++col) {
        std::vector<std::size_t> order(C);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return rows[a].mean[static_cast<std::size_t>(col)] < rows[b].mean[static_cast<std::size_t>(col)];
        });
        for (std::size_t rank = 0; rank < C; ++rank) {
            const int band = C == 1 ? n_bands / 2 : static_cast<int>(rank * static_cast<std::size_t>(n_bands) / C);
            rows[order[rank]].band[static_cast<std::size_t>(col)] = band_name(band, n_bands);
        }
    }
    return rows;
}

void stage_report(RunContext& ctx) {
    const auto assign = read_assignments(ctx);
    const fs::path fp = ctx.out("features/features.csv"), rp = ctx.out("classify/response_stats.csv");
    require_file(fp, "features");
    const auto fm = features::read_features_csv(read_file(fp));
    std::map<std::string, std::string> label_of;
    if (fs::exists(rp))
        for (const auto& row : read_csv(rp)) label_of[row.at("event_id")] = row.at("label");

    std::vector<int> clusters;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < fm.ids.size(); ++i) {
        const auto a = assign.find(fm.ids[i]);
        if (a == assign.end()) throw validation_error("event " + fm.ids[i] + " has no cluster assignment");
        clusters.push_back(a->second);
        const auto l = label_of.find(fm.ids[i]);
        labels.push_back(l == label_of.end() ? "unclassified" : l->second);
    }
    const int n_bands = ctx.config().report_bands;
    const auto rows = cluster_report(clusters, fm.raw, labels, n_bands);

    std::set<std::string> label_names;
    for (const auto& r : rows)
        for (const auto& [l, n] : r.labels) label_names.insert(l);
    std::vector<std::string> header{"cluster", "size"};
    for (const char* f : features::kFeatureNames) {
        header.push_back(std::string(f) + "_mean");
        header.push_back(std::string(f) + "_std");
        header.push_back(std::string(f) + "_band");
    }
    for (const auto& l : label_names) header.push_back("label_" + l);
    std::string table = join(header);
    json rj = json::array();
    for (const auto& r : rows) {
        std::vector<std::string> cells{std::to_string(r.cluster), std::to_string(r.size)};
        json params = json::object();
        for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
            cells.push_back(num(r.mean[f]));
            cells.push_back(num(r.std[f]));
            cells.push_back(r.band[f]);
            params[features::kFeatureNames[f]] = {{"mean", r.mean[f]}, {"std", r.std[f]}, {"band", r.band[f]}};
        }
        for (const auto& l : label_names) {
            const auto it = r.labels.find(l);
            cells.push_back(std::to_string(it == r.labels.end() ? 0 : it->second));
        }
        table += join(cells);
        rj.push_back({{"cluster", r.cluster}, {"size", r.size}, {"parameters", params}, {"labels", r.labels}});
    }
    write_text(ctx.out("report/cluster_report.csv"), table);
    write_text(ctx.out("report/cluster_report.json"), rj.dump(2) + "\n");
    ctx.log("report: " + std::to_string(rows.size()) + " clusters");
}

// ---- orchestration -----------------------------------------------------------

json build_manifest(RunContext& ctx) {
    const auto& c = ctx.config();
    json files = json::object();
    std::vector<fs::path> paths;
    if (fs::is_directory(ctx.out()))
        for (const auto& entry : fs::recursive_directory_iterator(ctx.out()))
            if (entry.is_regular_file()) paths.push_back(fs::relative(entry.path(), ctx.out()));
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        const std::string rel = p.generic_string();
        if (rel == "manifest.json" || rel.find(".tmp") != std::string::npos) continue;
        files[rel] = content_hash(read_file(ctx.out() / p));
    }
    const std::string cfg = config_text(c, false);
    json m{{"version", kVersion},
           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION)},
           {"compiler", __VERSION__},
           {"seed", c.seed},
           {"config_hash", content_hash(cfg)},
           {"files", files}};
    const fs::path corpus_manifest = c.corpus / kCorpusManifest;
    if (fs::exists(corpus_manifest)) m["corpus_manifest_hash"] = content_hash(read_file(corpus_manifest));
    return m;
}

void write_manifest(RunContext& ctx) {
    write_text(ctx.out("config.ini"), config_text(ctx.config(), false));
    write_text(ctx.out("manifest.json"), build_manifest(ctx).dump(2) + "\n");
}

void run_stage(RunContext& ctx, const std::string& name) {
    static const std::map<std::string, void (*)(RunContext&)> stages{
        {"synth", stage_synth},       {"ingest", stage_ingest},     {"features", stage_features},
        {"cluster", stage_cluster},   {"classify", stage_classify}, {"simulate", stage_simulate},
        {"evaluate", stage_evaluate}, {"report", stage_report}};
    const auto it = stages.find(name);
    if (it == stages.end()) throw validation_error("unknown stage '" + name + "'");
    try {
        it->second(ctx);
    } catch (const Error& e) {
        throw Error(e.kind(), name + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Numerical, name + ": " + e.what());
    }
    // synth writes the corpus only; the run directory may not exist yet
    if (name != "synth") write_manifest(ctx);
}

void run_pipeline(RunContext& ctx) {
    for (const char* s : {"ingest", "features", "cluster", "classify", "simulate", "evaluate", "report"})
        run_stage(ctx, s);
}

}  // namespace vivclust::pipeline
