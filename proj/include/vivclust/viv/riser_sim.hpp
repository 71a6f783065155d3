#pragma once

#include "vivclust/core/types.hpp"
#include "vivclust/viv/beam.hpp"
#include "vivclust/viv/hydro.hpp"

#include <Eigen/SparseCholesky>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace vivclust::viv {

// Environment of one simulation: current in global (east = x, north = y) axes and
// the prescribed top displacement. Empty top series mean a fixed top.
struct RiserLoadCase {
    CurrentProfile current;
    TimeSeries top_x;
    TimeSeries top_y;
};

struct RiserSimOptions {
    double duration = 2040.0;
    double dt = 0.0;               // 0: 200 steps per shortest local shedding period
    double max_dt = 0.05;
    double output_dt = 0.5;        // sampling of stored series and statistics
    double ramp_fraction = 0.1;    // linear current ramp
    double discard_fraction = 0.25;
    double damping_ratio = 0.003;  // Rayleigh, matched at two modes
    int damping_mode_low = 1;
    int damping_mode_high = 5;
    double rho = 1025.0;
    double main_angle = 0.0;       // frame for the reported statistics
    std::vector<std::pair<std::string, double>> probes;  // (id, z) acceleration outputs
    bool keep_displacement = false;
    double f_min = 0.01;           // lower bound of the dominant-frequency search
    bool hydro = true;             // false: structural response to top motion only
};

struct ProbeSeries {
    double z = 0.0;
    TimeSeries acc_x;  // global axes, total acceleration
    TimeSeries acc_y;
};

struct SimResult {
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> node_z;
    // Dynamic displacement (top sway removed) in the main/cross frame, [sample][node],
    // after the discarded window; only with keep_displacement.
    std::vector<double> t;
    std::vector<std::vector<double>> disp_main;
    std::vector<std::vector<double>> disp_cross;
    std::vector<double> std_main;   // per node, m
    std::vector<double> std_cross;
    double max_disp_std_main = 0.0;
    double max_disp_std_cross = 0.0;
    double dominant_freq = 0.0;     // main-direction displacement, Hz
    double dominant_freq_cf = 0.0;  // cross-direction displacement, Hz
    double a_over_d = 0.0;          // sqrt(2) * max cross std / local diameter
    std::map<std::string, ProbeSeries> probes;  // full record, output_dt sampling
};

// Newmark (gamma = 1/2, beta = 1/4) stepper for M a + C v + K u = f with the
// effective stiffness factorised once.
class NewmarkStepper {
public:
    NewmarkStepper(const Eigen::SparseMatrix<double>& M, const Eigen::SparseMatrix<double>& C,
                   const Eigen::SparseMatrix<double>& K, double dt);

    // a from M a = f - C v - K u; the K u term is skipped when K is null (u = 0).
    Eigen::VectorXd initial_acceleration(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                         const Eigen::VectorXd& f,
                                         const Eigen::SparseMatrix<double>* K = nullptr) const;
    // Advances (u, v, a) by dt to the load f_next at the end of the step.
    void step(Eigen::VectorXd& u, Eigen::VectorXd& v, Eigen::VectorXd& a,
              const Eigen::VectorXd& f_next) const;
    double dt() const { return dt_; }

private:
    static constexpr double kGamma = 0.5;
    static constexpr double kBeta = 0.25;
    Eigen::SparseMatrix<double> M_, C_;
    double dt_;
    double a0_ = 0, a1_ = 0, a2_ = 0, a3_ = 0, a4_ = 0, a5_ = 0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_, mass_solver_;
};

// Kinetic plus strain energy, v'Mv / 2 + u'Ku / 2.
double mechanical_energy(const Eigen::SparseMatrix<double>& M, const Eigen::SparseMatrix<double>& K,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Largest stable step: 1 / (200 f) for the highest f0_y |u| / d along the riser,
// capped at max_dt and rounded so output_dt is a whole number of steps.
double riser_time_step(const BeamModel& model, const RiserLoadCase& load,
                       const EmpiricalParameters& params, const RiserSimOptions& options);

// Newmark (gamma = 1/2, beta = 1/4) time integration with strip forces evaluated
// explicitly from the previous step. Throws a validation Error for an unstable dt
// and a numerical Error ("divergent integration") on blow-up.
SimResult simulate_riser(const BeamModel& model, const RiserLoadCase& load,
                         const EmpiricalParameters& params, const RiserSimOptions& options);

// Current at one depth and time by linear interpolation over valid bins; constant
// beyond the shallowest and deepest valid bins, and clamped in time.
Vec2 current_at(const CurrentProfile& profile, double depth, double t);

// Dominant frequency of a set of equally sampled series by summed Welch spectra,
// searched at or above f_min (the double-integration cutoff of the reconstruction).
double dominant_frequency(const std::vector<std::vector<double>>& series, double dt,
                          double f_min = 0.01);

}  // namespace vivclust::viv
