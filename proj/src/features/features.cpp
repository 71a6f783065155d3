#include "vivclust/features/features.hpp"

#include "vivclust/core/error.hpp"
#include "vivclust/core/parallel.hpp"
#include "vivclust/core/validation.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace vivclust::features {

namespace {

template <class Fn>
void for_each_sample(const CurrentProfile& p, Fn&& fn) {
    for (Eigen::Index it = 0; it < p.u_east.rows(); ++it)
        for (Eigen::Index id = 0; id < p.u_east.cols(); ++id)
            if (p.has_sample(it, id)) fn(p.u_east(it, id), p.u_north(it, id));
}

std::vector<std::pair<double, double>> valid_pairs(const RotatedProfile& p) {
    std::vector<std::pair<double, double>> out;
    for (Eigen::Index i = 0; i < p.u_xc.size(); ++i) {
        const double x = p.u_xc.data()[i], y = p.u_yc.data()[i];
        if (!std::isnan(x) && !std::isnan(y)) out.emplace_back(x, y);
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

MainDirectionFrame main_current_direction(const CurrentProfile& profile) {
    double sxx = 0.0, syy = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
    std::size_t n = 0;
    for_each_sample(profile, [&](double ue, double un) {
        sxx += ue * ue;
        syy += un * un;
        sxy += ue * un;
        mx += ue;
        my += un;
        ++n;
    });
    if (n == 0) throw validation_error("current profile has no valid samples");
    if (sxx == 0.0 && syy == 0.0) throw validation_error("degenerate current");
    // major axis of [[sxx, sxy], [sxy, syy]]
    double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    if (std::cos(angle) * mx + std::sin(angle) * my < 0.0) angle += kPi;
    if (angle > kPi) angle -= 2.0 * kPi;
    if (angle <= -kPi) angle += 2.0 * kPi;
    return {angle};
}

RotatedProfile rotate_profile(const CurrentProfile& profile, MainDirectionFrame frame) {
    const double c = std::cos(frame.angle), s = std::sin(frame.angle);
    RotatedProfile r;
    r.u_xc = c * profile.u_east + s * profile.u_north;
    r.u_yc = -s * profile.u_east + c * profile.u_north;
    return r;
}

double spread_coefficient(std::span<const double> u_xc, std::span<const double> u_yc) {
    double sx = 0.0, sy = 0.0;
    for (double v : u_xc) sx += v * v;
    for (double v : u_yc) sy += v * v;
    if (!(sx > 0.0)) throw validation_error("degenerate current");
    return std::sqrt(sy / sx);
}

double spread_coefficient(const RotatedProfile& p) {
    std::vector<double> x, y;
    for (const auto& [a, b] : valid_pairs(p)) {
        x.push_back(a);
        y.push_back(b);
    }
    return spread_coefficient(x, y);
}

double shear_coefficient(std::span<const double> u_xc) {
    if (u_xc.empty()) throw validation_error("degenerate current");
    double m = 0.0;
    for (double v : u_xc) m += std::abs(v);
    m /= static_cast<double>(u_xc.size());
    if (!(m > 0.0)) throw validation_error("degenerate current");
    double s = 0.0;
    for (double v : u_xc) s += (std::abs(v) - m) * (std::abs(v) - m);
    return std::sqrt(s / static_cast<double>(u_xc.size())) / m;
}

double shear_coefficient(const RotatedProfile& p) {
    std::vector<double> x;
    for (const auto& [a, b] : valid_pairs(p)) x.push_back(a);
    return shear_coefficient(x);
}

double umax(const CurrentProfile& profile) {
    double m = 0.0;
    for_each_sample(profile, [&](double ue, double un) { m = std::max(m, std::hypot(ue, un)); });
    return m;
}

VesselStats vessel_rms_stats(const TimeSeries& acc_x, const TimeSeries& acc_y,
                             const TimeSeries& top_x, const TimeSeries& top_y, double angle,
                             const VesselBands& bands) {
    for (const TimeSeries* ts : {&acc_x, &acc_y, &top_x, &top_y})
        if (ts->duration() < bands.min_duration * (1.0 - 1e-12))
            throw validation_error("vessel series shorter than ten low-frequency periods");
    if (acc_x.size() != acc_y.size() || top_x.size() != top_y.size())
        throw validation_error("vessel components differ in length");
    const double c = std::cos(angle), s = std::sin(angle);
    auto rotate = [&](const TimeSeries& x, const TimeSeries& y, int axis) {
        std::vector<double> out(x.size());
        for (std::size_t k = 0; k < x.size(); ++k)
            out[k] = axis == 0 ? c * x.values[k] + s * y.values[k] : -s * x.values[k] + c * y.values[k];
        return out;
    };
    VesselStats v;
    v.top_acc_x = dsp::rms(dsp::band_pass(rotate(acc_x, acc_y, 0), acc_x.dt, bands.wave, bands.taper));
    v.top_acc_y = dsp::rms(dsp::band_pass(rotate(acc_x, acc_y, 1), acc_x.dt, bands.wave, bands.taper));
    v.top_velo_x =
        dsp::rms(dsp::band_pass(rotate(top_x, top_y, 0), top_x.dt, bands.low, bands.taper, true));
    v.top_velo_y =
        dsp::rms(dsp::band_pass(rotate(top_x, top_y, 1), top_x.dt, bands.low, bands.taper, true));
    return v;
}

Eigen::VectorXd FeatureVector::values() const {
    Eigen::VectorXd v(kFeatureCount);
    v << umax, shcoeff, sprcoeff, top_velo_x, top_velo_y, top_acc_x, top_acc_y;
    return v;
}

std::pair<TimeSeries, TimeSeries> estimated_top_motion(const MeasurementEvent& event,
                                                       const response::ModalBasis& basis,
                                                       const FeatureOptions& options) {
    auto top = response::vessel_top_motion(event, basis, options.reconstruct);
    const TimeSeries* acc[] = {&event.vessel_acc_x, &event.vessel_acc_y};
    TimeSeries* out[] = {&top.first, &top.second};
    for (int axis = 0; axis < 2; ++axis) {
        TimeSeries& t = *out[axis];
        if (acc[axis]->size() != t.size() || std::abs(acc[axis]->dt - t.dt) > 1e-9 * t.dt)
            throw validation_error("vessel and riser records are sampled differently");
        const auto low = dsp::band_pass(t.values, t.dt, options.bands.low, options.bands.taper);
        const auto wave = dsp::band_pass_displacement(acc[axis]->values, t.dt, options.bands.wave,
                                                      options.bands.taper);
        for (std::size_t i = 0; i < t.size(); ++i) t.values[i] = low[i] + wave[i];
    }
    return top;
}

FeatureVector extract_features(const MeasurementEvent& event, const response::ModalBasis& basis,
                               const FeatureOptions& options) {
    FeatureVector f;
    const MainDirectionFrame frame = main_current_direction(event.current);
    const RotatedProfile rp = rotate_profile(event.current, frame);
    f.angle = frame.angle;
    f.umax = umax(event.current);
    f.shcoeff = shear_coefficient(rp);
    f.sprcoeff = spread_coefficient(rp);
    const auto [top_x, top_y] = response::vessel_top_motion(event, basis, options.reconstruct);
    const VesselStats vs =
        vessel_rms_stats(event.vessel_acc_x, event.vessel_acc_y, top_x, top_y, frame.angle, options.bands);
    f.top_velo_x = vs.top_velo_x;
    f.top_velo_y = vs.top_velo_y;
    f.top_acc_x = vs.top_acc_x;
    f.top_acc_y = vs.top_acc_y;
    return f;
}

FeatureMatrix standardize(std::vector<std::string> ids, std::vector<FeatureVector> rows) {
    if (rows.size() < 2) throw validation_error("feature matrix needs at least two events");
    FeatureMatrix m;
    const auto n = static_cast<Eigen::Index>(rows.size());
    m.raw.resize(n, static_cast<Eigen::Index>(kFeatureCount));
    for (Eigen::Index i = 0; i < n; ++i) m.raw.row(i) = rows[i].values().transpose();
    m.mean = m.raw.colwise().mean().transpose();
    m.std.resize(kFeatureCount);
    m.standardized.resize(n, static_cast<Eigen::Index>(kFeatureCount));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kFeatureCount); ++j) {
        const Eigen::VectorXd centered = m.raw.col(j).array() - m.mean[j];
        double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
        if (!(sd > 1e-12 * std::max(1.0, std::abs(m.mean[j])))) {
            sd = 0.0;
            m.warnings.push_back(std::string("constant column ") + kFeatureNames[j]);
            m.standardized.col(j).setZero();
        } else {
            m.standardized.col(j) = centered / sd;
        }
        m.std[j] = sd;
    }
    m.ids = std::move(ids);
    m.rows = std::move(rows);
    return m;
}

FeatureMatrix build_feature_matrix(const std::vector<MeasurementEvent>& events,
                                   const response::ModalBasis& basis, const FeatureOptions& options) {
    std::vector<FeatureVector> rows(events.size());
    std::vector<std::string> failure(events.size());
    parallel_for(events.size(), [&](std::size_t i) {
        const ValidationReport report = validate_event(events[i]);
        if (!report.usable()) {
            failure[i] = report.summary();
            return;
        }
        try {
            rows[i] = extract_features(events[i], basis, options);
        } catch (const Error& e) {
            failure[i] = e.what();
        }
    });
    std::vector<std::string> ids, excluded;
    std::vector<FeatureVector> kept;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!failure[i].empty()) {
            excluded.push_back(events[i].id + ": " + failure[i]);
            continue;
        }
        ids.push_back(events[i].id);
        kept.push_back(rows[i]);
    }
    if (kept.size() < 2)
        throw validation_error("fewer than two usable events for the feature matrix");
    FeatureMatrix m = standardize(std::move(ids), std::move(kept));
    m.excluded = std::move(excluded);
    return m;
}

std::string features_csv(const FeatureMatrix& m) {
    std::ostringstream os;
    os << "event_id";
    for (const char* name : kFeatureNames) os << ',' << name;
    os << '\n';
    for (std::size_t i = 0; i < m.ids.size(); ++i) {
        os << m.ids[i];
        for (Eigen::Index j = 0; j < m.raw.cols(); ++j)
            os << ',' << format_double(m.raw(static_cast<Eigen::Index>(i), j));
        os << '\n';
    }
    return os.str();
}

std::string standardization_json(const FeatureMatrix& m) {
    nlohmann::json j;
    j["columns"] = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
    j["mean"] = std::vector<double>(m.mean.data(), m.mean.data() + m.mean.size());
    j["std"] = std::vector<double>(m.std.data(), m.std.data() + m.std.size());
    j["warnings"] = m.warnings;
    j["excluded"] = m.excluded;
    j["angles"] = nlohmann::json::object();
    for (std::size_t i = 0; i < m.ids.size(); ++i) j["angles"][m.ids[i]] = m.rows[i].angle;
    return j.dump(2) + "\n";
}

FeatureMatrix read_features_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw validation_error("empty feature CSV");
    std::vector<std::string> ids;
    std::vector<FeatureVector> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != kFeatureCount + 1) throw validation_error("malformed feature CSV row");
        FeatureVector f;
        double* dst[] = {&f.umax,       &f.shcoeff,   &f.sprcoeff, &f.top_velo_x,
                         &f.top_velo_y, &f.top_acc_x, &f.top_acc_y};
        for (std::size_t j = 0; j < kFeatureCount; ++j) *dst[j] = std::stod(cells[j + 1]);
        ids.push_back(cells[0]);
        rows.push_back(f);
    }
    return standardize(std::move(ids), std::move(rows));
}

}  // namespace vivclust::features
