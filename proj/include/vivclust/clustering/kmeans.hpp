#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace vivclust::clustering {

struct KmeansResult {
    Eigen::MatrixXd centroids;  // K x d
    std::vector<int> labels;
    double inertia = 0.0;
    int iterations = 0;
    int restart = 0;  // index of the kept restart
};

struct KmeansOptions {
    int n_init = 10;
    int max_iter = 300;
    std::uint64_t seed = 0;
};

// Lloyd iterations from n_init seeded draws of K distinct data points. The lowest
// inertia wins, ties to the lowest restart. Restarts run in parallel; the result
// does not depend on the thread count. An emptied cluster keeps its centroid.
KmeansResult kmeans(const Eigen::MatrixXd& X, int K, const KmeansOptions& options = {});
KmeansResult kmeans_serial(const Eigen::MatrixXd& X, int K, const KmeansOptions& options = {});

// One Lloyd run from the given restart seed.
KmeansResult kmeans_single(const Eigen::MatrixXd& X, int K, std::uint64_t seed, int max_iter = 300);

// K distinct indices of [0, n) by a partial Fisher-Yates shuffle.
std::vector<int> draw_without_replacement(int n, int K, std::mt19937_64& rng);

// Squared distance with a fixed summation order.
double squared_distance(const Eigen::MatrixXd& A, Eigen::Index i, const Eigen::MatrixXd& B,
                        Eigen::Index j);

}  // namespace vivclust::clustering
