#include "vivclust/clustering/silhouette.hpp"

#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"
#include "vivclust/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vivclust::clustering {

namespace {

struct Compact {
    std::vector<int> index;     // per point, 0..C-1
    std::vector<int> label_of;  // per compact index
    std::vector<int> size;
};

Compact compact_labels(const std::vector<int>& labels) {
    Compact c;
    std::map<int, int> map;
    for (int l : labels) map.emplace(l, 0);
    for (auto& [l, i] : map) {
        i = static_cast<int>(c.label_of.size());
        c.label_of.push_back(l);
    }
    c.size.assign(c.label_of.size(), 0);
    for (int l : labels) {
        c.index.push_back(map[l]);
        ++c.size[static_cast<std::size_t>(map[l])];
    }
    return c;
}

double point_score(const Eigen::MatrixXd& X, const Compact& c, Eigen::Index i, std::vector<double>& sums) {
    const int own = c.index[static_cast<std::size_t>(i)];
    if (c.size[static_cast<std::size_t>(own)] == 1) return 0.0;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
        if (j == i) continue;
        double s = 0.0;
        for (Eigen::Index col = 0; col < X.cols(); ++col) {
            const double d = X(i, col) - X(j, col);
            s += d * d;
        }
        sums[static_cast<std::size_t>(c.index[static_cast<std::size_t>(j)])] += std::sqrt(s);
    }
    const double a = sums[static_cast<std::size_t>(own)] / (c.size[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sums.size(); ++k)
        if (static_cast<int>(k) != own) b = std::min(b, sums[k] / c.size[k]);
    const double m = std::max(a, b);
    return m > 0.0 ? (b - a) / m : 0.0;
}

SilhouetteReport summarise(const Compact& c, std::vector<double> s) {
    SilhouetteReport r;
    std::vector<double> sum(c.size.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sum[static_cast<std::size_t>(c.index[i])] += s[i];
        total += s[i];
    }
    for (std::size_t k = 0; k < sum.size(); ++k) r.per_cluster[c.label_of[k]] = sum[k] / c.size[k];
    r.global = total / static_cast<double>(s.size());
    r.per_point = std::move(s);
    return r;
}

Compact prepare(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != X.rows())
        throw validation_error("labels do not match the data");
    Compact c = compact_labels(labels);
    if (c.size.size() < 2) throw validation_error("silhouette needs at least two clusters");
    return c;
}

}  // namespace

SilhouetteReport silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    const Compact c = prepare(X, labels);
    std::vector<double> s(labels.size());
    parallel_for(labels.size(), [&](std::size_t i) {
        std::vector<double> sums(c.size.size());
        s[i] = point_score(X, c, static_cast<Eigen::Index>(i), sums);
    });
    return summarise(c, std::move(s));
}

SilhouetteReport silhouette_serial(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    const Compact c = prepare(X, labels);
    std::vector<double> s(labels.size());
    std::vector<double> sums(c.size.size());
    for (std::size_t i = 0; i < labels.size(); ++i) s[i] = point_score(X, c, static_cast<Eigen::Index>(i), sums);
    return summarise(c, std::move(s));
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw validation_error("labelings differ in length");
    const Compact ca = compact_labels(a), cb = compact_labels(b);
    std::vector<std::vector<double>> table(ca.size.size(), std::vector<double>(cb.size.size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        table[static_cast<std::size_t>(ca.index[i])][static_cast<std::size_t>(cb.index[i])] += 1.0;
    auto pairs = [](double n) { return n * (n - 1.0) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& row : table)
        for (double v : row) sum_ij += pairs(v);
    for (int s : ca.size) sum_a += pairs(s);
    for (int s : cb.size) sum_b += pairs(s);
    const double total = pairs(static_cast<double>(a.size()));
    if (total == 0.0) return 1.0;
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both trivial partitions
    return (sum_ij - expected) / (max_index - expected);
}

SilhouetteAtK silhouette_at_k(const Eigen::MatrixXd& X, int K, const GmmOptions& fit, int repetitions) {
    if (K < 2 || K > X.rows() - 1) throw validation_error("K must lie in [2, n - 1]");
    if (repetitions < 1) throw validation_error("repetitions must be positive");
    SilhouetteAtK out;
    out.K = K;
    for (int r = 0; r < repetitions; ++r) {
        GmmOptions o = fit;
        o.seed = derive_seed(derive_seed(fit.seed, static_cast<std::uint64_t>(K)), static_cast<std::uint64_t>(r));
        const GmmModel m = gmm_fit(X, K, o);
        const auto labels = predict_labels(m, X);
        if (std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); })) {
            ++out.collapsed;
            out.repetition_scores.push_back(0.0);
            continue;
        }
        const SilhouetteReport rep = silhouette(X, labels);
        if (out.per_cluster.empty()) out.per_cluster = rep.per_cluster;
        out.repetition_scores.push_back(rep.global);
    }
    const double mean = dsp::mean(out.repetition_scores);
    double var = 0.0;
    for (double s : out.repetition_scores) var += (s - mean) * (s - mean);
    out.score = mean;
    out.variability = std::sqrt(var / static_cast<double>(out.repetition_scores.size()));
    return out;
}

std::vector<SilhouetteAtK> silhouette_vs_k(const Eigen::MatrixXd& X, const std::vector<int>& ks,
                                           const GmmOptions& fit, int repetitions) {
    std::vector<SilhouetteAtK> out;
    for (int K : ks) out.push_back(silhouette_at_k(X, K, fit, repetitions));
    return out;
}

}  // namespace vivclust::clustering
