#pragma once

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/types.hpp"
#include "vivclust/response/modal.hpp"
#include "vivclust/viv/hydro.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace vivclust::features {

using viv::strouhal_frequency;

// Counter-clockwise rotation from the measurement x axis to the main current axis.
struct MainDirectionFrame {
    double angle = 0.0;  // (-pi, pi]
};

// Principal axis of the pooled (u_east, u_north) samples, signed so the mean
// projection is non-negative. Throws "degenerate current" for an all-zero profile.
MainDirectionFrame main_current_direction(const CurrentProfile& profile);

// Along-axis (u_xc) and off-axis (u_yc) components; gaps stay NaN.
struct RotatedProfile {
    Eigen::MatrixXd u_xc;
    Eigen::MatrixXd u_yc;
};
RotatedProfile rotate_profile(const CurrentProfile& profile, MainDirectionFrame frame);

// sqrt(sum u_yc^2 / sum u_xc^2) over valid samples.
double spread_coefficient(const RotatedProfile& p);
double spread_coefficient(std::span<const double> u_xc, std::span<const double> u_yc);

// std(|u_xc|) / mean(|u_xc|), population normalisation.
double shear_coefficient(const RotatedProfile& p);
double shear_coefficient(std::span<const double> u_xc);

// Largest horizontal speed over all valid samples; 0 for an empty profile.
double umax(const CurrentProfile& profile);

struct VesselBands {
    dsp::Band wave{0.05, 0.30};
    dsp::Band low{0.005, 0.05};
    double taper = 0.1;
    double min_duration = 500.0;  // s, ten low-frequency periods
};

struct VesselStats {
    double top_velo_x = 0.0;
    double top_velo_y = 0.0;
    double top_acc_x = 0.0;
    double top_acc_y = 0.0;
};

// RMS of wave-band vessel acceleration and of the low-band derivative of the
// reconstructed top displacement, both rotated by angle. Throws a validation
// Error for records shorter than bands.min_duration.
VesselStats vessel_rms_stats(const TimeSeries& acc_x, const TimeSeries& acc_y,
                             const TimeSeries& top_x, const TimeSeries& top_y, double angle,
                             const VesselBands& bands = {});

inline constexpr std::size_t kFeatureCount = 7;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "umax", "shcoeff", "sprcoeff", "top_velo_x", "top_velo_y", "top_acc_x", "top_acc_y"};

struct FeatureVector {
    double umax = 0.0;
    double shcoeff = 0.0;
    double sprcoeff = 0.0;
    double top_velo_x = 0.0;
    double top_velo_y = 0.0;
    double top_acc_x = 0.0;
    double top_acc_y = 0.0;
    double angle = 0.0;  // main direction used for the rotated quantities

    Eigen::VectorXd values() const;
};

struct FeatureOptions {
    VesselBands bands;
    response::ReconstructOptions reconstruct;
};

// Top displacement for driving a simulation: the low band of the modal top
// reconstruction plus the wave band of the double-integrated vessel acceleration,
// in global axes on the riser sensors' time grid. Throws a validation Error when the
// vessel record is sampled differently from the riser sensors.
std::pair<TimeSeries, TimeSeries> estimated_top_motion(const MeasurementEvent& event,
                                                       const response::ModalBasis& basis,
                                                       const FeatureOptions& options = {});

FeatureVector extract_features(const MeasurementEvent& event, const response::ModalBasis& basis,
                               const FeatureOptions& options = {});

struct FeatureMatrix {
    std::vector<std::string> ids;
    std::vector<FeatureVector> rows;
    Eigen::MatrixXd raw;           // n x 7
    Eigen::MatrixXd standardized;  // z-scores; constant columns are 0
    Eigen::VectorXd mean;
    Eigen::VectorXd std;           // population std; 0 marks a constant column
    std::vector<std::string> warnings;
    std::vector<std::string> excluded;  // "id: reason"
};

// Z-scores the rows in input order. Throws a validation Error for fewer than two rows.
FeatureMatrix standardize(std::vector<std::string> ids, std::vector<FeatureVector> rows);

// Validates and extracts every event (in parallel); events that fail are listed in
// `excluded`. Throws a validation Error when fewer than two remain.
FeatureMatrix build_feature_matrix(const std::vector<MeasurementEvent>& events,
                                   const response::ModalBasis& basis,
                                   const FeatureOptions& options = {});

// CSV with header event_id,umax,...,top_acc_y and the standardisation sidecar.
std::string features_csv(const FeatureMatrix& m);
std::string standardization_json(const FeatureMatrix& m);
// Reads the CSV back (raw values) and re-standardises.
FeatureMatrix read_features_csv(const std::string& text);

}  // namespace vivclust::features
