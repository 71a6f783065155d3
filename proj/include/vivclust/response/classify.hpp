#pragma once

#include "vivclust/core/types.hpp"
#include "vivclust/response/modal.hpp"

#include <map>
#include <string>

namespace vivclust::response {

enum class ResponseLabel { VivDominated, WaveDominated, SmallResponse, Combined };

std::string to_string(ResponseLabel label);
ResponseLabel label_from_string(const std::string& s);

struct SensorStats {
    double acc_rms_main = 0.0;   // m/s^2
    double acc_rms_cross = 0.0;
    double kurtosis_main = 0.0;  // 0 when the signal is constant
    double kurtosis_cross = 0.0;
    double peak_psd = 0.0;       // cross axis, m^2/s^3
    double peak_freq = 0.0;      // Hz
};

struct ResponseStats {
    double freq_dom = 0.0;   // dominant frequency of main-direction displacement, Hz
    double ydisp_max = 0.0;  // max over z of cross-direction displacement RMS, m
    std::map<std::string, SensorStats> sensors;
};

struct ClassifyThresholds {
    double viv_peak = 0.06;           // m^2/s^3
    double small_peak = 0.02;
    double strouhal_distance = 0.04;  // Hz
    double wave_low = 0.08;           // Hz
    double wave_high = 0.2;
    std::string ref_a = "S3";
    std::string ref_b = "S4";
};

// Ordered rules on the two reference sensors' cross-axis spectral peaks.
// Throws a validation Error when a reference sensor is missing.
ResponseLabel classify_event(const ResponseStats& stats, double f_strouhal,
                             const ClassifyThresholds& thresholds = {});

struct StatsOptions {
    std::size_t seg_len = 1024;
    double overlap = 0.5;
    double peak_f_min = 0.01;  // Hz, lower limit of the spectral peak search
    int grid_points = 101;     // z stations for freq_dom and ydisp_max
    ReconstructOptions reconstruct;
};

// Response parameters in the frame rotated by angle (main current direction). The
// displacement fit appends the top-sway column to basis, so it needs one sensor more
// than basis has modes; the reported displacement excludes that sway.
ResponseStats response_stats(const MeasurementEvent& event, const ModalBasis& basis, double angle,
                             const StatsOptions& options = {});

}  // namespace vivclust::response
