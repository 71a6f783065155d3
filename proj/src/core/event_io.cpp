#include "vivclust/core/event_io.hpp"

#include "vivclust/core/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace vivclust {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const TimeSeries& ts) {
    return {{"t0", ts.t0}, {"dt", ts.dt}, {"values", ts.values}};
}

TimeSeries time_series_from_json(const json& j) {
    TimeSeries ts;
    ts.t0 = j.at("t0").get<double>();
    ts.dt = j.at("dt").get<double>();
    ts.values.reserve(j.at("values").size());
    for (const auto& v : j.at("values"))
        ts.values.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
    return ts;
}

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            row.push_back(std::isnan(v) ? json(nullptr) : json(v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_rows(const json& rows, std::size_t nt, std::size_t nd) {
    if (rows.size() != nt) throw validation_error("current matrix row count mismatch");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nd));
    for (std::size_t r = 0; r < nt; ++r) {
        const auto& row = rows[r];
        if (row.size() != nd) throw validation_error("current matrix column count mismatch");
        for (std::size_t c = 0; c < nd; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                row[c].is_null() ? std::numeric_limits<double>::quiet_NaN() : row[c].get<double>();
        }
    }
    return m;
}

}  // namespace

json to_json(const CurrentProfile& p) {
    return {{"depths", p.depths},
            {"times", p.times},
            {"u_east", matrix_rows(p.u_east)},
            {"u_north", matrix_rows(p.u_north)}};
}

CurrentProfile current_from_json(const json& j) {
    CurrentProfile p;
    p.depths = j.at("depths").get<std::vector<double>>();
    p.times = j.at("times").get<std::vector<double>>();
    p.u_east = matrix_from_rows(j.at("u_east"), p.times.size(), p.depths.size());
    p.u_north = matrix_from_rows(j.at("u_north"), p.times.size(), p.depths.size());
    return p;
}

json to_json(const MeasurementEvent& e) {
    json sensors = json::object();
    for (const auto& [sid, rec] : e.riser_acc)
        sensors[sid] = {{"z", rec.z}, {"x", to_json(rec.acc_x)}, {"y", to_json(rec.acc_y)}};
    json out = {{"id", e.id},
                {"timestamp", e.timestamp},
                {"duration", e.duration},
                {"current", to_json(e.current)},
                {"vessel_acc_x", to_json(e.vessel_acc_x)},
                {"vessel_acc_y", to_json(e.vessel_acc_y)},
                {"riser_acc", sensors},
                {"metadata", e.metadata}};
    if (e.top_tension) out["top_tension"] = *e.top_tension;
    return out;
}

MeasurementEvent event_from_json(const json& j) {
    try {
        MeasurementEvent e;
        e.id = j.at("id").get<std::string>();
        e.timestamp = j.value("timestamp", std::string{});
        e.duration = j.at("duration").get<double>();
        e.current = current_from_json(j.at("current"));
        e.vessel_acc_x = time_series_from_json(j.at("vessel_acc_x"));
        e.vessel_acc_y = time_series_from_json(j.at("vessel_acc_y"));
        for (const auto& [sid, rec] : j.at("riser_acc").items()) {
            e.riser_acc[sid] = SensorRecord{rec.at("z").get<double>(),
                                            time_series_from_json(rec.at("x")),
                                            time_series_from_json(rec.at("y"))};
        }
        if (j.contains("top_tension")) e.top_tension = j.at("top_tension").get<double>();
        if (j.contains("metadata"))
            e.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        return e;
    } catch (const json::exception& ex) {
        throw validation_error(std::string("malformed event json: ") + ex.what());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw io_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("cannot rename " + tmp.string() + ": " + ec.message());
}

MeasurementEvent read_event(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& ex) {
        throw validation_error(path.string() + ": " + ex.what());
    }
    return event_from_json(j);
}

void write_event(const MeasurementEvent& event, const fs::path& path) {
    write_file_atomic(path, to_json(event).dump());
}

std::vector<fs::path> list_event_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw io_error("corpus directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace vivclust
