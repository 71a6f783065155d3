#include "vivclust/response/modal.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace vivclust::response {

Eigen::MatrixXd ModalBasis::values_at(const std::vector<double>& zs) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(zs.size()), shapes.cols());
    const auto n = static_cast<Eigen::Index>(z_grid.size());
    for (std::size_t r = 0; r < zs.size(); ++r) {
        const double z = std::clamp(zs[r], z_grid.front(), z_grid.back());
        auto hi = static_cast<Eigen::Index>(std::upper_bound(z_grid.begin(), z_grid.end(), z) -
                                            z_grid.begin());
        hi = std::clamp<Eigen::Index>(hi, 1, n - 1);
        const Eigen::Index lo = hi - 1;
        const double w = (z - z_grid[lo]) / (z_grid[hi] - z_grid[lo]);
        out.row(static_cast<Eigen::Index>(r)) = (1.0 - w) * shapes.row(lo) + w * shapes.row(hi);
    }
    return out;
}

ModalBasis make_modal_basis(const viv::BeamModel& model, int n_modes, int grid_points) {
    if (n_modes < 1 || n_modes > model.modes.cols())
        throw validation_error("requested more modes than the beam model provides");
    if (grid_points < 2) throw validation_error("modal grid needs at least two points");
    ModalBasis b;
    b.length = model.length;
    b.shapes.resize(grid_points, n_modes);
    for (int i = 0; i < grid_points; ++i) {
        const double z = model.length * i / (grid_points - 1);
        b.z_grid.push_back(z);
        const viv::Probe p = viv::make_probe(model, z);
        for (int j = 0; j < n_modes; ++j) b.shapes(i, j) = p.eval(model.modes.col(j));
    }
    b.frequencies = model.frequencies.head(n_modes);
    return b;
}

ModalBasis with_top_sway(const ModalBasis& basis) {
    ModalBasis b = basis;
    const auto n = basis.shapes.cols();
    b.shapes.conservativeResize(Eigen::NoChange, n + 1);
    for (std::size_t i = 0; i < b.z_grid.size(); ++i)
        b.shapes(static_cast<Eigen::Index>(i), n) = b.z_grid[i] / b.length;
    b.frequencies.conservativeResize(n + 1);
    b.frequencies[n] = 0.0;
    return b;
}

std::vector<double> ModalDisplacement::at(double z) const { return at(z, basis.n_modes()); }

std::vector<double> ModalDisplacement::at(double z, int n_columns) const {
    if (n_columns < 0 || n_columns > basis.n_modes()) throw validation_error("column count out of range");
    const Eigen::RowVectorXd phi = basis.values_at({z}).row(0).head(n_columns);
    const Eigen::RowVectorXd w = phi * q.topRows(n_columns);
    return {w.data(), w.data() + w.size()};
}

ModalDisplacement modal_reconstruct(const std::vector<AccRecord>& records, const ModalBasis& basis,
                                    const ReconstructOptions& options) {
    const int nm = basis.n_modes();
    const auto ns = static_cast<Eigen::Index>(records.size());
    if (ns < nm) throw validation_error("fewer sensors than modes");
    std::vector<double> zs;
    for (const auto& r : records) {
        if (std::find(zs.begin(), zs.end(), r.z) != zs.end())
            throw validation_error("sensor positions must be distinct");
        zs.push_back(r.z);
    }
    const std::size_t nt = records.front().acc.size();
    const double dt = records.front().acc.dt;
    for (const auto& r : records)
        if (r.acc.size() != nt || r.acc.dt != dt)
            throw validation_error("sensor records differ in length or sampling");

    const Eigen::MatrixXd phi = basis.values_at(zs);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv[0], smin = sv[sv.size() - 1];
    if (!(smin > 0.0) || smax / smin > options.max_condition)
        throw numerical_error("unobservable modes");

    Eigen::MatrixXd acc(ns, static_cast<Eigen::Index>(nt));
    for (Eigen::Index s = 0; s < ns; ++s)
        for (std::size_t k = 0; k < nt; ++k) acc(s, static_cast<Eigen::Index>(k)) = records[s].acc.values[k];
    const Eigen::MatrixXd qdd = svd.solve(acc);

    ModalDisplacement out;
    out.basis = basis;
    out.t0 = records.front().acc.t0;
    out.dt = dt;
    out.q.resize(nm, static_cast<Eigen::Index>(nt));
    std::vector<double> row(nt);
    for (int j = 0; j < nm; ++j) {
        for (std::size_t k = 0; k < nt; ++k) row[k] = qdd(j, static_cast<Eigen::Index>(k));
        auto spec = dsp::fft(row);
        for (std::size_t k = 0; k < nt; ++k) {
            const double f = dsp::bin_frequency(k, nt, dt);
            if (std::abs(f) < options.f_min || k == 0) {
                spec[k] = 0.0;
            } else {
                const double w = 2.0 * kPi * f;
                spec[k] *= -1.0 / (w * w);
            }
        }
        const auto q = dsp::ifft_real(spec);
        for (std::size_t k = 0; k < nt; ++k) out.q(j, static_cast<Eigen::Index>(k)) = q[k];
    }
    return out;
}

std::vector<AccRecord> rotated_records(const MeasurementEvent& event, double angle, int axis) {
    const double c = std::cos(angle), s = std::sin(angle);
    std::vector<AccRecord> out;
    for (const auto& [id, rec] : event.riser_acc) {
        AccRecord r;
        r.z = rec.z;
        r.acc.t0 = rec.acc_x.t0;
        r.acc.dt = rec.acc_x.dt;
        const std::size_t n = std::min(rec.acc_x.size(), rec.acc_y.size());
        r.acc.values.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double x = rec.acc_x.values[k], y = rec.acc_y.values[k];
            r.acc.values[k] = axis == 0 ? c * x + s * y : -s * x + c * y;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::pair<TimeSeries, TimeSeries> vessel_top_motion(const MeasurementEvent& event,
                                                    const ModalBasis& basis,
                                                    const ReconstructOptions& options) {
    if (event.riser_acc.empty()) throw validation_error("event has no riser sensors");
    const ModalBasis aug = with_top_sway(basis);
    std::pair<TimeSeries, TimeSeries> out;
    for (int axis = 0; axis < 2; ++axis) {
        const auto disp = modal_reconstruct(rotated_records(event, 0.0, axis), aug, options);
        TimeSeries ts;
        ts.t0 = disp.t0;
        ts.dt = disp.dt;
        ts.values = disp.at(aug.length);
        (axis == 0 ? out.first : out.second) = std::move(ts);
    }
    return out;
}

}  // namespace vivclust::response
