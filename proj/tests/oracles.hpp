#pragma once

// Independent reference implementations shared by the unit and acceptance tests.

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace vivclust::oracles {

// Straight O(n^2) silhouette: for each point and each cluster, the mean distance
// to that cluster's members taken in index order.
inline std::vector<double> brute_silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    const auto n = static_cast<std::size_t>(X.rows());
    std::map<int, int> count;
    for (int l : labels) ++count[l];
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (count[labels[i]] == 1) continue;
        double a = 0.0, b = std::numeric_limits<double>::infinity();
        for (const auto& [label, size] : count) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || labels[j] != label) continue;
                double sq = 0.0;
                for (Eigen::Index k = 0; k < X.cols(); ++k) {
                    const double diff = X(i, k) - X(j, k);
                    sq += diff * diff;
                }
                sum += std::sqrt(sq);
            }
            if (label == labels[i])
                a = sum / (size - 1);
            else
                b = std::min(b, sum / size);
        }
        const double m = std::max(a, b);
        s[i] = m > 0.0 ? (b - a) / m : 0.0;
    }
    return s;
}

inline double gaussian_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& mu,
                              const Eigen::MatrixXd& S) {
    const double d = static_cast<double>(X.cols());
    const Eigen::MatrixXd Si = S.inverse();
    const double logdet = std::log(S.determinant());
    double ll = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Eigen::VectorXd r = X.row(i).transpose() - mu;
        ll += -0.5 * (d * std::log(2.0 * 3.14159265358979323846) + logdet + r.dot(Si * r));
    }
    return ll;
}

}  // namespace vivclust::oracles
