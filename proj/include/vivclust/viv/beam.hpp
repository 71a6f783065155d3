#pragma once

#include "vivclust/core/types.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <vector>

namespace vivclust::viv {

struct BeamOptions {
    int n_elements = 100;
    double rho = 1025.0;
    double c_m = 2.0;             // added mass (c_m - 1) rho A on submerged elements
    bool include_weight = true;   // effective tension reduced by submerged weight
    int n_modes = 10;             // eigenpairs kept
};

// Tensioned Euler-Bernoulli beam with cubic Hermite elements, pinned at both ends.
// One transverse axis is assembled; x and y share the same matrices.
// Full DOF layout: [w_0, theta_0, w_1, theta_1, ...]; w_0 and w_N are constrained.
struct BeamModel {
    double length = 0.0;
    double water_depth = 0.0;
    std::vector<double> node_z;
    std::vector<double> elem_length;
    std::vector<double> elem_mid_z;
    std::vector<double> elem_diameter;
    std::vector<double> elem_mass;     // structural + added, kg/m
    std::vector<double> elem_tension;  // effective tension at the midpoint, N
    std::vector<bool> elem_submerged;

    // Matrices on the free DOFs, and on all DOFs.
    Eigen::SparseMatrix<double> mass;
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass_full;
    Eigen::SparseMatrix<double> stiffness_full;
    std::vector<int> free_to_full;
    std::vector<int> full_to_free;  // -1 for constrained

    Eigen::VectorXd frequencies;  // Hz, ascending
    Eigen::MatrixXd modes;        // free DOFs x n_modes, mass-orthonormal

    int n_elements() const { return static_cast<int>(elem_length.size()); }
    int n_full() const { return 2 * (n_elements() + 1); }
    int n_free() const { return static_cast<int>(free_to_full.size()); }
    int element_at(double z) const;
    // Displacement of mode j (0-based) at z, from its nodal DOFs.
    double mode_value(int j, double z) const;
};

// Throws a validation Error for fewer than 20 elements or non-positive tension,
// and a numerical Error when M or K is not positive definite.
BeamModel build_beam_model(const RiserProperties& props, const BeamOptions& options = {});

// Effective tension at z: top tension minus the submerged weight of the riser above z.
double effective_tension(const RiserProperties& props, double z, double rho);

// Hermite shape functions of an element of length le at local coordinate xi in [0, 1].
std::array<double, 4> hermite_shape(double xi, double le);
std::array<double, 4> hermite_shape_dd(double xi, double le);  // second derivative in z

// Interpolation of a free-DOF vector at z: displacement = sum weight * u[index],
// index -1 marks a constrained DOF (zero).
struct Probe {
    std::array<int, 4> index{};
    std::array<double, 4> weight{};
    double eval(const Eigen::VectorXd& u_free) const;
};
Probe make_probe(const BeamModel& model, double z);

// Top motion enters through r = r_dyn + s * d_top with the linear sway shape
// s (w = z / L, theta = 1 / L). r_dyn vanishes at both ends and is loaded by
// -(M s) d_top'' - (K s) d_top; damping acts on r_dyn only.
struct SwayLoads {
    Eigen::VectorXd mass_coupling;       // (M s) on the free rows
    Eigen::VectorXd stiffness_coupling;  // (K s) on the free rows
    Eigen::VectorXd shape_free;          // free-DOF part of s
};
SwayLoads sway_loads(const BeamModel& model);

}  // namespace vivclust::viv
