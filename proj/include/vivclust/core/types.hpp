#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vivclust {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;

// Uniformly sampled signal. Units are carried by context.
struct TimeSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double duration() const { return dt * static_cast<double>(values.size()); }
    double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

// Horizontal current measured on a (time, depth) grid. Missing bins are NaN.
struct CurrentProfile {
    std::vector<double> depths;  // m below surface, strictly increasing
    std::vector<double> times;   // s
    Eigen::MatrixXd u_east;      // rows = times, cols = depths
    Eigen::MatrixXd u_north;

    static bool is_gap(double v) { return std::isnan(v); }
    bool has_sample(Eigen::Index it, Eigen::Index id) const {
        return !is_gap(u_east(it, id)) && !is_gap(u_north(it, id));
    }
};

struct SensorRecord {
    double z = 0.0;  // m above the lower end of the riser
    TimeSeries acc_x;
    TimeSeries acc_y;
};

struct MeasurementEvent {
    std::string id;
    std::string timestamp;  // ISO-8601 UTC
    CurrentProfile current;
    TimeSeries vessel_acc_x;
    TimeSeries vessel_acc_y;
    std::map<std::string, SensorRecord> riser_acc;
    double duration = 0.0;
    std::optional<double> top_tension;  // N, overrides the riser default
    std::map<std::string, std::string> metadata;
};

struct RiserSegment {
    double z_start = 0.0;
    double z_end = 0.0;
    double outer_diameter = 0.0;
    double mass_per_length = 0.0;
    double axial_stiffness = 0.0;
    double bending_stiffness = 0.0;

    double length() const { return z_end - z_start; }
};

struct RiserProperties {
    double length = 0.0;
    std::vector<RiserSegment> segments;
    double top_tension = 0.0;
    double mud_density = 0.0;
    double water_depth = 0.0;

    // Segment containing z; the upper segment wins on a shared boundary.
    const RiserSegment& segment_at(double z) const;
    // Riser z of a depth below the surface, assuming the lower end sits at the seabed.
    double z_of_depth(double depth) const { return water_depth - depth; }
    double depth_of_z(double z) const { return water_depth - z; }
};

struct EnvironmentProperties {
    double rho = 1025.0;
    double strouhal_number = 0.28;
};

struct EigenBand {
    double f_low = 0.0;
    double f_high = 0.0;
};

// Mode index (1-based) to eigenfrequency band in Hz.
using EigenfrequencyTable = std::map<int, EigenBand>;

}  // namespace vivclust
