#include "vivclust/core/validation.hpp"

#include "vivclust/core/error.hpp"

#include <cmath>
#include <sstream>

namespace vivclust {

bool ValidationReport::usable() const {
    for (const auto& v : violations)
        if (v.hard) return false;
    return true;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << event_id << ":";
    if (violations.empty()) os << " ok";
    for (const auto& v : violations)
        os << " [" << (v.hard ? "hard" : "soft") << "] " << v.field << ": " << v.message << ";";
    return os.str();
}

namespace {

void check_series(const TimeSeries& ts, const std::string& field, std::vector<Violation>& out) {
    if (!(ts.dt > 0.0) || !std::isfinite(ts.dt)) out.push_back({field, "dt must be positive"});
    if (!std::isfinite(ts.t0)) out.push_back({field, "non-finite t0"});
    if (ts.values.empty()) {
        out.push_back({field, "empty series"});
        return;
    }
    for (double v : ts.values) {
        if (!std::isfinite(v)) {
            out.push_back({field, "non-finite sample"});
            return;
        }
    }
}

void check_current(const CurrentProfile& c, double water_depth, std::vector<Violation>& out) {
    const auto nt = static_cast<Eigen::Index>(c.times.size());
    const auto nd = static_cast<Eigen::Index>(c.depths.size());
    if (nt == 0 || nd == 0) {
        out.push_back({"current", "empty profile"});
        return;
    }
    if (c.u_east.rows() != nt || c.u_east.cols() != nd || c.u_north.rows() != nt ||
        c.u_north.cols() != nd) {
        out.push_back({"current", "matrix dimensions inconsistent with depths x times"});
        return;
    }
    for (std::size_t i = 0; i < c.depths.size(); ++i) {
        if (!std::isfinite(c.depths[i]) || c.depths[i] < 0.0 || c.depths[i] > water_depth) {
            out.push_back({"current.depths", "depth outside [0, water_depth]"});
            break;
        }
        if (i > 0 && !(c.depths[i] > c.depths[i - 1])) {
            out.push_back({"current.depths", "depths not strictly increasing"});
            break;
        }
    }
    for (std::size_t i = 1; i < c.times.size(); ++i) {
        if (!(c.times[i] > c.times[i - 1])) {
            out.push_back({"current.times", "times not strictly increasing"});
            break;
        }
    }
    // NaN marks a gap; only infinities are invalid.
    bool any_sample = false;
    for (Eigen::Index it = 0; it < nt; ++it) {
        for (Eigen::Index id = 0; id < nd; ++id) {
            if (std::isinf(c.u_east(it, id)) || std::isinf(c.u_north(it, id))) {
                out.push_back({"current", "non-finite sample"});
                return;
            }
            any_sample = any_sample || c.has_sample(it, id);
        }
    }
    if (!any_sample) out.push_back({"current", "no valid current samples"});
}

}  // namespace

ValidationReport validate_event(const MeasurementEvent& event, const ValidationOptions& options) {
    ValidationReport report;
    report.event_id = event.id;
    auto& out = report.violations;

    if (event.id.empty()) out.push_back({"id", "empty event id"});
    check_current(event.current, options.water_depth, out);
    check_series(event.vessel_acc_x, "vessel_acc_x", out);
    check_series(event.vessel_acc_y, "vessel_acc_y", out);
    if (event.riser_acc.empty()) out.push_back({"riser_acc", "no riser sensors"});
    for (const auto& [sid, rec] : event.riser_acc) {
        if (!std::isfinite(rec.z) || rec.z < 0.0 || rec.z > options.riser_length)
            out.push_back({"riser_acc." + sid, "sensor outside riser span"});
        check_series(rec.acc_x, "riser_acc." + sid + ".x", out);
        check_series(rec.acc_y, "riser_acc." + sid + ".y", out);
        if (rec.acc_x.size() != rec.acc_y.size())
            out.push_back({"riser_acc." + sid, "axis length mismatch"});
    }
    if (event.top_tension && !(*event.top_tension > 0.0))
        out.push_back({"top_tension", "tension must be positive"});

    const double lo = options.nominal_duration * (1.0 - options.duration_tolerance);
    const double hi = options.nominal_duration * (1.0 + options.duration_tolerance);
    if (!(event.duration > 0.0))
        out.push_back({"duration", "duration must be positive"});
    else if (event.duration < lo || event.duration > hi)
        out.push_back({"duration", "duration far from the nominal 34 min record", false});
    return report;
}

void require_valid_riser(const RiserProperties& props) {
    std::ostringstream problems;
    if (!(props.length > 0.0)) problems << "length must be positive; ";
    if (!(props.top_tension > 0.0)) problems << "top tension must be positive; ";
    if (props.segments.empty()) problems << "no segments; ";
    double z = 0.0;
    for (const auto& s : props.segments) {
        if (std::abs(s.z_start - z) > 1e-9) problems << "segments not contiguous at z=" << z << "; ";
        if (!(s.z_end > s.z_start)) problems << "empty segment at z=" << s.z_start << "; ";
        if (!(s.outer_diameter > 0.0) || !(s.mass_per_length > 0.0))
            problems << "segment at z=" << s.z_start << " needs positive diameter and mass; ";
        if (!(s.axial_stiffness > 0.0) || !(s.bending_stiffness > 0.0))
            problems << "segment at z=" << s.z_start << " needs positive stiffnesses; ";
        z = s.z_end;
    }
    if (!props.segments.empty() && std::abs(z - props.length) > 1e-9)
        problems << "segments do not cover [0, length]; ";
    const auto msg = problems.str();
    if (!msg.empty()) throw validation_error("invalid riser properties: " + msg);
}

const RiserSegment& RiserProperties::segment_at(double z) const {
    for (auto it = segments.rbegin(); it != segments.rend(); ++it)
        if (z >= it->z_start) return *it;
    return segments.front();
}

}  // namespace vivclust
