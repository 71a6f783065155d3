#include "vivclust/viv/beam.hpp"

#include "vivclust/core/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace vivclust::viv {

namespace {

using Mat4 = Eigen::Matrix4d;

Mat4 bending_matrix(double ei, double l) {
    Mat4 k;
    k << 12, 6 * l, -12, 6 * l,
         6 * l, 4 * l * l, -6 * l, 2 * l * l,
         -12, -6 * l, 12, -6 * l,
         6 * l, 2 * l * l, -6 * l, 4 * l * l;
    return ei / (l * l * l) * k;
}

Mat4 geometric_matrix(double t, double l) {
    Mat4 k;
    k << 36, 3 * l, -36, 3 * l,
         3 * l, 4 * l * l, -3 * l, -l * l,
         -36, -3 * l, 36, -3 * l,
         3 * l, -l * l, -3 * l, 4 * l * l;
    return t / (30.0 * l) * k;
}

Mat4 consistent_mass(double m, double l) {
    Mat4 k;
    k << 156, 22 * l, 54, -13 * l,
         22 * l, 4 * l * l, 13 * l, -3 * l * l,
         54, 13 * l, 156, -22 * l,
         -13 * l, -3 * l * l, -22 * l, 4 * l * l;
    return m * l / 420.0 * k;
}

double submerged_weight_per_length(const RiserSegment& s, bool submerged, double rho) {
    const double buoyancy = submerged ? rho * kPi * s.outer_diameter * s.outer_diameter / 4.0 : 0.0;
    return (s.mass_per_length - buoyancy) * kGravity;
}

}  // namespace

double effective_tension(const RiserProperties& props, double z, double rho) {
    double weight = 0.0;
    for (const auto& seg : props.segments) {
        const double a = std::max(seg.z_start, z);
        const double b = seg.z_end;
        if (b <= a) continue;
        // split at the waterline
        const double wet = std::max(0.0, std::min(b, props.water_depth) - a);
        const double dry = (b - a) - wet;
        weight += wet * submerged_weight_per_length(seg, true, rho) +
                  dry * submerged_weight_per_length(seg, false, rho);
    }
    return props.top_tension - weight;
}

std::array<double, 4> hermite_shape(double xi, double le) {
    const double x2 = xi * xi, x3 = x2 * xi;
    return {1 - 3 * x2 + 2 * x3, le * (xi - 2 * x2 + x3), 3 * x2 - 2 * x3, le * (x3 - x2)};
}

std::array<double, 4> hermite_shape_dd(double xi, double le) {
    const double l2 = le * le;
    return {(-6 + 12 * xi) / l2, (-4 + 6 * xi) / le, (6 - 12 * xi) / l2, (6 * xi - 2) / le};
}

int BeamModel::element_at(double z) const {
    if (z <= node_z.front()) return 0;
    if (z >= node_z.back()) return n_elements() - 1;
    const auto it = std::upper_bound(node_z.begin(), node_z.end(), z);
    return std::clamp(static_cast<int>(it - node_z.begin()) - 1, 0, n_elements() - 1);
}

double Probe::eval(const Eigen::VectorXd& u_free) const {
    double v = 0.0;
    for (int i = 0; i < 4; ++i)
        if (index[i] >= 0) v += weight[i] * u_free[index[i]];
    return v;
}

Probe make_probe(const BeamModel& model, double z) {
    if (z < 0.0 || z > model.length) throw validation_error("probe outside the beam span");
    const int e = model.element_at(z);
    const double le = model.elem_length[e];
    const double xi = std::clamp((z - model.node_z[e]) / le, 0.0, 1.0);
    const auto n = hermite_shape(xi, le);
    Probe p;
    for (int i = 0; i < 4; ++i) {
        p.index[i] = model.full_to_free[2 * e + i];
        p.weight[i] = n[i];
    }
    return p;
}

double BeamModel::mode_value(int j, double z) const {
    return make_probe(*this, z).eval(modes.col(j));
}

BeamModel build_beam_model(const RiserProperties& props, const BeamOptions& options) {
    if (options.n_elements < 20) throw validation_error("beam model needs at least 20 elements");
    if (!(props.length > 0.0) || props.segments.empty())
        throw validation_error("riser length and segments required");
    if (!(props.top_tension > 0.0)) throw validation_error("top tension must be positive");

    BeamModel m;
    const int ne = options.n_elements;
    m.length = props.length;
    m.water_depth = props.water_depth;
    const double le = props.length / ne;
    for (int i = 0; i <= ne; ++i) m.node_z.push_back(i == ne ? props.length : i * le);

    const int n_full = 2 * (ne + 1);
    std::vector<Eigen::Triplet<double>> mt, kt;
    for (int e = 0; e < ne; ++e) {
        const double l = m.node_z[e + 1] - m.node_z[e];
        const double zm = 0.5 * (m.node_z[e] + m.node_z[e + 1]);
        const RiserSegment& seg = props.segment_at(zm);
        const bool wet = zm <= props.water_depth;
        const double area = kPi * seg.outer_diameter * seg.outer_diameter / 4.0;
        const double added = wet ? (options.c_m - 1.0) * options.rho * area : 0.0;
        const double tension = options.include_weight ? effective_tension(props, zm, options.rho)
                                                      : props.top_tension;
        if (!(tension > 0.0))
            throw validation_error("effective tension is not positive along the riser");
        m.elem_length.push_back(l);
        m.elem_mid_z.push_back(zm);
        m.elem_diameter.push_back(seg.outer_diameter);
        m.elem_mass.push_back(seg.mass_per_length + added);
        m.elem_tension.push_back(tension);
        m.elem_submerged.push_back(wet);

        const Mat4 me = consistent_mass(seg.mass_per_length + added, l);
        const Mat4 ke = bending_matrix(seg.bending_stiffness, l) + geometric_matrix(tension, l);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                mt.emplace_back(2 * e + a, 2 * e + b, me(a, b));
                kt.emplace_back(2 * e + a, 2 * e + b, ke(a, b));
            }
    }
    m.mass_full.resize(n_full, n_full);
    m.stiffness_full.resize(n_full, n_full);
    m.mass_full.setFromTriplets(mt.begin(), mt.end());
    m.stiffness_full.setFromTriplets(kt.begin(), kt.end());

    // pinned: displacement DOFs of the end nodes are removed
    m.full_to_free.assign(n_full, -1);
    for (int i = 0; i < n_full; ++i) {
        if (i == 0 || i == 2 * ne) continue;
        m.full_to_free[i] = static_cast<int>(m.free_to_full.size());
        m.free_to_full.push_back(i);
    }
    const int nf = m.n_free();
    std::vector<Eigen::Triplet<double>> mf, kf;
    for (int pass = 0; pass < 2; ++pass) {
        const auto& full = pass == 0 ? m.mass_full : m.stiffness_full;
        auto& out = pass == 0 ? mf : kf;
        for (int col = 0; col < full.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
                const int r = m.full_to_free[it.row()], c = m.full_to_free[it.col()];
                if (r >= 0 && c >= 0) out.emplace_back(r, c, it.value());
            }
    }
    m.mass.resize(nf, nf);
    m.stiffness.resize(nf, nf);
    m.mass.setFromTriplets(mf.begin(), mf.end());
    m.stiffness.setFromTriplets(kf.begin(), kf.end());

    const Eigen::MatrixXd md(m.mass), kd(m.stiffness);
    if (Eigen::LLT<Eigen::MatrixXd>(md).info() != Eigen::Success)
        throw numerical_error("mass matrix is not positive definite");
    if (Eigen::LLT<Eigen::MatrixXd>(kd).info() != Eigen::Success)
        throw numerical_error("stiffness matrix is not positive definite");

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kd, md);
    if (es.info() != Eigen::Success) throw numerical_error("beam eigenproblem failed");
    const int nm = std::min(options.n_modes, nf);
    m.frequencies.resize(nm);
    m.modes = es.eigenvectors().leftCols(nm);  // M-orthonormal from the solver
    for (int j = 0; j < nm; ++j) {
        m.frequencies[j] = std::sqrt(std::max(es.eigenvalues()[j], 0.0)) / (2.0 * kPi);
        // sign convention: positive near the lower quarter point
        const Probe p = make_probe(m, 0.25 * m.length / (j + 1));
        if (p.eval(m.modes.col(j)) < 0.0) m.modes.col(j) *= -1.0;
    }
    return m;
}

SwayLoads sway_loads(const BeamModel& m) {
    Eigen::VectorXd s(m.n_full());
    for (int i = 0; i <= m.n_elements(); ++i) {
        s[2 * i] = m.node_z[i] / m.length;
        s[2 * i + 1] = 1.0 / m.length;
    }
    const Eigen::VectorXd ms = m.mass_full * s;
    const Eigen::VectorXd ks = m.stiffness_full * s;
    SwayLoads out;
    out.mass_coupling.resize(m.n_free());
    out.stiffness_coupling.resize(m.n_free());
    out.shape_free.resize(m.n_free());
    for (int f = 0; f < m.n_free(); ++f) {
        const int i = m.free_to_full[f];
        out.mass_coupling[f] = ms[i];
        out.stiffness_coupling[f] = ks[i];
        out.shape_free[f] = s[i];
    }
    return out;
}

}  // namespace vivclust::viv
