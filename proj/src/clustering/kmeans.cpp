#include "vivclust/clustering/kmeans.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"
#include "vivclust/core/parallel.hpp"

#include <numeric>

namespace vivclust::clustering {

double squared_distance(const Eigen::MatrixXd& A, Eigen::Index i, const Eigen::MatrixXd& B,
                        Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
        const double d = A(i, c) - B(j, c);
        s += d * d;
    }
    return s;
}

std::vector<int> draw_without_replacement(int n, int K, std::mt19937_64& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < K; ++i) {
        // modulo draw keeps the sequence identical across standard libraries
        const auto span = static_cast<std::uint64_t>(n - i);
        const int j = i + static_cast<int>(rng() % span);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(K));
    return idx;
}

KmeansResult kmeans_single(const Eigen::MatrixXd& X, int K, std::uint64_t seed, int max_iter) {
    const auto n = X.rows();
    const auto d = X.cols();
    std::mt19937_64 rng(seed);
    const auto init = draw_without_replacement(static_cast<int>(n), K, rng);
    KmeansResult r;
    r.centroids.resize(K, d);
    for (int k = 0; k < K; ++k) r.centroids.row(k) = X.row(init[static_cast<std::size_t>(k)]);
    r.labels.assign(static_cast<std::size_t>(n), -1);

    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(X, i, r.centroids, 0);
            for (int k = 1; k < K; ++k) {
                const double dk = squared_distance(X, i, r.centroids, k);
                if (dk < best_d) {
                    best_d = dk;
                    best = k;
                }
            }
            if (r.labels[static_cast<std::size_t>(i)] != best) {
                r.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        r.iterations = it + 1;
        if (!changed) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, d);
        std::vector<int> counts(static_cast<std::size_t>(K), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int k = r.labels[static_cast<std::size_t>(i)];
            for (Eigen::Index c = 0; c < d; ++c) sums(k, c) += X(i, c);
            ++counts[static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < K; ++k)
            if (counts[static_cast<std::size_t>(k)] > 0)
                for (Eigen::Index c = 0; c < d; ++c)
                    r.centroids(k, c) = sums(k, c) / counts[static_cast<std::size_t>(k)];
    }
    r.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        r.inertia += squared_distance(X, i, r.centroids, r.labels[static_cast<std::size_t>(i)]);
    return r;
}

namespace {

void check(const Eigen::MatrixXd& X, int K, const KmeansOptions& o) {
    if (K < 1) throw validation_error("K must be at least 1");
    if (K > X.rows()) throw validation_error("K exceeds the number of points");
    if (o.n_init < 1 || o.max_iter < 1) throw validation_error("n_init and max_iter must be positive");
    if (!X.allFinite()) throw validation_error("data contain non-finite values");
}

KmeansResult pick_best(std::vector<KmeansResult>& runs) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].inertia < runs[best].inertia) best = r;
    KmeansResult out = std::move(runs[best]);
    out.restart = static_cast<int>(best);
    return out;
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& X, int K, const KmeansOptions& o) {
    check(X, K, o);
    std::vector<KmeansResult> runs(static_cast<std::size_t>(o.n_init));
    parallel_for(runs.size(), [&](std::size_t r) {
        runs[r] = kmeans_single(X, K, derive_seed(o.seed, static_cast<std::uint64_t>(r)), o.max_iter);
    });
    return pick_best(runs);
}

KmeansResult kmeans_serial(const Eigen::MatrixXd& X, int K, const KmeansOptions& o) {
    check(X, K, o);
    std::vector<KmeansResult> runs;
    for (int r = 0; r < o.n_init; ++r)
        runs.push_back(kmeans_single(X, K, derive_seed(o.seed, static_cast<std::uint64_t>(r)), o.max_iter));
    return pick_best(runs);
}

}  // namespace vivclust::clustering
