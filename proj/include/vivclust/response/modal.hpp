#pragma once

#include "vivclust/core/types.hpp"
#include "vivclust/viv/beam.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace vivclust::response {

// Mode shapes sampled on a fine z-grid; values between grid points are linear.
// Shapes come from the pinned beam model and are mass-orthonormal there.
struct ModalBasis {
    double length = 0.0;
    std::vector<double> z_grid;
    Eigen::MatrixXd shapes;       // grid x n_modes
    Eigen::VectorXd frequencies;  // Hz; the sway column, if any, reports 0

    int n_modes() const { return static_cast<int>(shapes.cols()); }
    Eigen::MatrixXd values_at(const std::vector<double>& z) const;  // n_z x n_modes
};

// First n_modes beam eigenmodes on grid_points equally spaced stations.
ModalBasis make_modal_basis(const viv::BeamModel& model, int n_modes, int grid_points = 1001);

// Basis plus the linear top-sway shape z / L as the last column.
ModalBasis with_top_sway(const ModalBasis& basis);

struct AccRecord {
    double z = 0.0;
    TimeSeries acc;  // one axis, m/s^2
};

// Modal displacement coordinates q_j(t) on the sensors' time grid.
struct ModalDisplacement {
    ModalBasis basis;
    double t0 = 0.0;
    double dt = 1.0;
    Eigen::MatrixXd q;  // n_modes x n_samples

    std::size_t samples() const { return static_cast<std::size_t>(q.cols()); }
    std::vector<double> at(double z) const;  // w(z, t)
    // Sum over the first n_columns basis columns only (drops an appended sway column).
    std::vector<double> at(double z, int n_columns) const;
};

struct ReconstructOptions {
    double f_min = 0.01;        // Hz; content below is zeroed
    double max_condition = 1e8;
};

// Least-squares modal accelerations at every sample, then q = -qdd / (2 pi f)^2 in
// the frequency domain. Throws a validation Error when sensors are fewer than modes,
// share a z or differ in sampling, and a numerical Error "unobservable modes" when
// the sensor/mode matrix is ill-conditioned.
ModalDisplacement modal_reconstruct(const std::vector<AccRecord>& records, const ModalBasis& basis,
                                    const ReconstructOptions& options = {});

// Top displacement (x, y) from all riser sensors with the sway-augmented basis.
std::pair<TimeSeries, TimeSeries> vessel_top_motion(const MeasurementEvent& event,
                                                    const ModalBasis& basis,
                                                    const ReconstructOptions& options = {});

// Sensor records of one event for one axis after rotating by angle (0: x, 1: y of
// the rotated frame), in sensor-id order.
std::vector<AccRecord> rotated_records(const MeasurementEvent& event, double angle, int axis);

}  // namespace vivclust::response
