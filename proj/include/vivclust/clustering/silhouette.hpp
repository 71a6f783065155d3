#pragma once

#include "vivclust/clustering/gmm.hpp"

#include <Eigen/Core>

#include <map>
#include <vector>

namespace vivclust::clustering {

struct SilhouetteReport {
    std::vector<double> per_point;
    std::map<int, double> per_cluster;  // label -> mean s(i)
    double global = 0.0;
};

// Euclidean silhouette. Labels may be any integers. Per point, distance sums run
// over j in increasing order so the parallel and serial versions agree bitwise.
// Throws a validation Error when fewer than two clusters are present.
SilhouetteReport silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels);
SilhouetteReport silhouette_serial(const Eigen::MatrixXd& X, const std::vector<int>& labels);

// Adjusted Rand index between two labelings of the same points.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

struct SilhouetteAtK {
    int K = 0;
    double score = 0.0;        // mean over repetitions
    double variability = 0.0;  // std over repetitions
    std::vector<double> repetition_scores;
    std::map<int, double> per_cluster;  // first repetition
    int collapsed = 0;  // repetitions whose labels formed a single cluster
};

// For each K: fit, label and score with `repetitions` independently seeded fits.
SilhouetteAtK silhouette_at_k(const Eigen::MatrixXd& X, int K, const GmmOptions& fit,
                              int repetitions = 10);
std::vector<SilhouetteAtK> silhouette_vs_k(const Eigen::MatrixXd& X, const std::vector<int>& ks,
                                           const GmmOptions& fit, int repetitions = 10);

}  // namespace vivclust::clustering
