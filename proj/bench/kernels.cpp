// Serial reference vs OpenMP kernels.
#include "vivclust/clustering/gmm.hpp"
#include "vivclust/clustering/silhouette.hpp"
#include "vivclust/viv/rigid_cylinder.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace vivclust;

namespace {

Eigen::MatrixXd blobs(int n, int d, int k) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = nd(rng) + 6.0 * ((i % k) == j % k);
    return X;
}

std::vector<int> round_robin(int n, int k) {
    std::vector<int> l(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) l[static_cast<std::size_t>(i)] = i % k;
    return l;
}

template <bool Parallel>
void BM_Silhouette(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd X = blobs(n, 7, 4);
    const auto labels = round_robin(n, 4);
    for (auto _ : state) {
        auto r = Parallel ? clustering::silhouette(X, labels) : clustering::silhouette_serial(X, labels);
        benchmark::DoNotOptimize(r.global);
    }
}

template <bool Parallel>
void BM_GmmFit(benchmark::State& state) {
    const Eigen::MatrixXd X = blobs(600, 7, 4);
    clustering::GmmOptions o;
    o.n_restarts = static_cast<int>(state.range(0));
    o.n_iter = 50;
    for (auto _ : state) {
        auto m = Parallel ? clustering::gmm_fit(X, 4, o) : clustering::gmm_fit_serial(X, 4, o);
        benchmark::DoNotOptimize(m.loglik_trace.back());
    }
}

template <bool Parallel>
void BM_LockInSweep(benchmark::State& state) {
    std::vector<double> urn;
    for (int i = 0; i < state.range(0); ++i) urn.push_back(4.0 + 0.5 * i);
    const viv::RigidCylinderConfig cfg;
    const viv::EmpiricalParameters params;
    for (auto _ : state) {
        auto pts = Parallel ? viv::lock_in_sweep(cfg, params, urn, 100.0)
                            : viv::lock_in_sweep_serial(cfg, params, urn, 100.0);
        benchmark::DoNotOptimize(pts.data());
    }
}

}  // namespace

BENCHMARK(BM_Silhouette<false>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Silhouette<true>)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GmmFit<false>)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GmmFit<true>)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LockInSweep<false>)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LockInSweep<true>)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
