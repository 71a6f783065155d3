#include "vivclust/clustering/gmm.hpp"

#include "vivclust/clustering/kmeans.hpp"
#include "vivclust/core/dsp.hpp"
#include "vivclust/core/error.hpp"
#include "vivclust/core/parallel.hpp"
#include "vivclust/core/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <optional>

namespace vivclust::clustering {

namespace {

Eigen::MatrixXd pooled_covariance(const Eigen::MatrixXd& X) {
    const Eigen::RowVectorXd mu = X.colwise().mean();
    const Eigen::MatrixXd c = X.rowwise() - mu;
    return c.transpose() * c / static_cast<double>(X.rows());
}

void check_input(const Eigen::MatrixXd& X, int K) {
    if (K < 1) throw validation_error("K must be at least 1");
    if (X.cols() < 1) throw validation_error("data need at least one column");
    if (X.rows() < K) throw validation_error("fewer points than components");
    if (!X.allFinite()) throw validation_error("data contain non-finite values");
}

}  // namespace

double default_reg_eps(const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd c = pooled_covariance(X);
    const double v = c.diagonal().mean();
    return 1e-6 * (v > 0.0 ? v : 1.0);
}

Eigen::MatrixXd component_log_density(const GmmModel& m, const Eigen::MatrixXd& X) {
    if (X.cols() != m.d) throw validation_error("data dimension does not match the model");
    const auto n = X.rows();
    Eigen::MatrixXd out(n, m.K);
    const double log2pi = std::log(2.0 * kPi);
    for (int k = 0; k < m.K; ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(m.covariances[static_cast<std::size_t>(k)]);
        if (llt.info() != Eigen::Success) throw numerical_error("covariance not positive definite");
        const Eigen::MatrixXd L = llt.matrixL();
        double logdet = 0.0;
        for (int i = 0; i < m.d; ++i) {
            if (!(L(i, i) > 0.0)) throw numerical_error("covariance not positive definite");
            logdet += 2.0 * std::log(L(i, i));
        }
        const double lw = std::log(m.weights[k]);
        const Eigen::MatrixXd centered =
            (X.rowwise() - m.means[static_cast<std::size_t>(k)].transpose()).transpose();
        const Eigen::MatrixXd z = llt.matrixL().solve(centered);  // d x n
        for (Eigen::Index i = 0; i < n; ++i)
            out(i, k) = lw - 0.5 * (m.d * log2pi + logdet + z.col(i).squaredNorm());
    }
    return out;
}

namespace {

double row_logsumexp(const Eigen::MatrixXd& L, Eigen::Index i) {
    const double mx = L.row(i).maxCoeff();
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (Eigen::Index k = 0; k < L.cols(); ++k) s += std::exp(L(i, k) - mx);
    return mx + std::log(s);
}

}  // namespace

double gmm_loglik(const GmmModel& model, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd L = component_log_density(model, X);
    double total = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) total += row_logsumexp(L, i);
    return total;
}

Eigen::MatrixXd e_step(const GmmModel& model, const Eigen::MatrixXd& X) {
    Eigen::MatrixXd L = component_log_density(model, X);
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        const double lse = row_logsumexp(L, i);
        double s = 0.0;
        for (Eigen::Index k = 0; k < L.cols(); ++k) {
            L(i, k) = std::exp(L(i, k) - lse);
            s += L(i, k);
        }
        L.row(i) /= s;
    }
    return L;
}

GmmModel m_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& t, double reg_eps, int* reseeds) {
    const auto n = X.rows();
    const auto d = X.cols();
    const auto K = t.cols();
    if (t.rows() != n) throw validation_error("responsibilities do not match the data");
    GmmModel m;
    m.K = static_cast<int>(K);
    m.d = static_cast<int>(d);
    m.reg_eps = reg_eps;
    m.weights.resize(K);
    m.means.assign(static_cast<std::size_t>(K), Eigen::VectorXd::Zero(d));
    m.covariances.assign(static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(d, d));
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    std::optional<Eigen::MatrixXd> pooled;
    std::vector<bool> taken(static_cast<std::size_t>(n), false);

    for (Eigen::Index k = 0; k < K; ++k) {
        const double nk = t.col(k).sum();
        auto& mu = m.means[static_cast<std::size_t>(k)];
        auto& cov = m.covariances[static_cast<std::size_t>(k)];
        if (nk < 1e-12) {
            // reseed at the least well explained point not used yet
            Eigen::Index pick = -1;
            double lowest = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r = t.row(i).maxCoeff();
                if (!taken[static_cast<std::size_t>(i)] && r < lowest) {
                    lowest = r;
                    pick = i;
                }
            }
            if (pick < 0) pick = 0;
            taken[static_cast<std::size_t>(pick)] = true;
            if (!pooled) pooled = pooled_covariance(X);
            mu = X.row(pick).transpose();
            cov = *pooled + reg_eps * I;
            m.weights[k] = 1.0 / static_cast<double>(n);
            if (reseeds) ++*reseeds;
            continue;
        }
        m.weights[k] = nk / static_cast<double>(n);
        mu = (X.transpose() * t.col(k)) / nk;
        const Eigen::MatrixXd c = X.rowwise() - mu.transpose();
        cov = (c.transpose() * t.col(k).asDiagonal() * c) / nk;
        cov = 0.5 * (cov + cov.transpose()) + reg_eps * I;
    }
    m.weights /= m.weights.sum();
    return m;
}

std::vector<int> predict_labels(const GmmModel& model, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd t = e_step(model, X);
    std::vector<int> labels(static_cast<std::size_t>(X.rows()), 0);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        int best = 0;
        for (int k = 1; k < model.K; ++k)
            if (t(i, k) > t(i, best)) best = k;
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

GmmModel gmm_init_from_kmeans(const Eigen::MatrixXd& X, int K, std::uint64_t seed, double reg_eps) {
    const KmeansResult km = kmeans_single(X, K, seed);
    const auto n = X.rows();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, K);
    for (Eigen::Index i = 0; i < n; ++i) t(i, km.labels[static_cast<std::size_t>(i)]) = 1.0;
    GmmModel m = m_step(X, t, reg_eps);
    for (int k = 0; k < K; ++k)
        if (t.col(k).sum() > 0.0) m.means[static_cast<std::size_t>(k)] = km.centroids.row(k).transpose();
    return m;
}

namespace {

struct RestartOutcome {
    bool ok = false;
    GmmModel model;
    double loglik = -std::numeric_limits<double>::infinity();
};

RestartOutcome run_restart(const Eigen::MatrixXd& X, int K, const GmmOptions& o, double reg,
                           std::size_t r) {
    RestartOutcome out;
    try {
        GmmModel m = gmm_init_from_kmeans(X, K, derive_seed(o.seed, static_cast<std::uint64_t>(r)), reg);
        std::vector<double> trace;
        int reseeds = 0;
        double prev = gmm_loglik(m, X);
        for (int it = 0; it < o.n_iter; ++it) {
            const Eigen::MatrixXd t = e_step(m, X);
            m = m_step(X, t, reg, &reseeds);
            const double ll = gmm_loglik(m, X);
            if (!std::isfinite(ll)) return out;
            trace.push_back(ll);
            if (o.tol > 0.0 && std::abs(ll - prev) <= o.tol * std::abs(prev)) break;
            prev = ll;
        }
        if (trace.empty()) trace.push_back(prev);
        m.loglik_trace = std::move(trace);
        m.reseeds = reseeds;
        out.loglik = m.loglik_trace.back();
        out.model = std::move(m);
        out.ok = true;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Numerical) throw;
    }
    return out;
}

GmmModel select_best(std::vector<RestartOutcome>& runs, const GmmOptions& o, double reg) {
    int best = -1, failed = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (!runs[r].ok) {
            ++failed;
            continue;
        }
        if (best < 0 || runs[r].loglik > runs[static_cast<std::size_t>(best)].loglik)
            best = static_cast<int>(r);
    }
    if (best < 0) throw numerical_error("all GMM restarts failed");
    GmmModel m = std::move(runs[static_cast<std::size_t>(best)].model);
    m.best_restart = best;
    m.failed_restarts = failed;
    m.seed = o.seed;
    m.reg_eps = reg;
    m.n_restarts = o.n_restarts;
    m.n_iter = o.n_iter;
    return m;
}

double resolve_reg(const Eigen::MatrixXd& X, const GmmOptions& o) {
    if (o.n_restarts < 1 || o.n_iter < 1) throw validation_error("restarts and iterations must be positive");
    return o.reg_eps < 0.0 ? default_reg_eps(X) : o.reg_eps;
}

}  // namespace

GmmModel gmm_fit(const Eigen::MatrixXd& X, int K, const GmmOptions& o) {
    check_input(X, K);
    const double reg = resolve_reg(X, o);
    std::vector<RestartOutcome> runs(static_cast<std::size_t>(o.n_restarts));
    parallel_for(runs.size(), [&](std::size_t r) { runs[r] = run_restart(X, K, o, reg, r); });
    return select_best(runs, o, reg);
}

GmmModel gmm_fit_serial(const Eigen::MatrixXd& X, int K, const GmmOptions& o) {
    check_input(X, K);
    const double reg = resolve_reg(X, o);
    std::vector<RestartOutcome> runs;
    for (int r = 0; r < o.n_restarts; ++r) runs.push_back(run_restart(X, K, o, reg, static_cast<std::size_t>(r)));
    return select_best(runs, o, reg);
}

nlohmann::json to_json(const GmmModel& m) {
    nlohmann::json j;
    j["K"] = m.K;
    j["d"] = m.d;
    j["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
    j["means"] = nlohmann::json::array();
    j["covariances"] = nlohmann::json::array();
    for (int k = 0; k < m.K; ++k) {
        const auto& mu = m.means[static_cast<std::size_t>(k)];
        j["means"].push_back(std::vector<double>(mu.data(), mu.data() + mu.size()));
        nlohmann::json cov = nlohmann::json::array();
        const auto& c = m.covariances[static_cast<std::size_t>(k)];
        for (Eigen::Index r = 0; r < c.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(c.cols()));
            for (Eigen::Index col = 0; col < c.cols(); ++col) row[static_cast<std::size_t>(col)] = c(r, col);
            cov.push_back(row);
        }
        j["covariances"].push_back(cov);
    }
    j["loglik_trace"] = m.loglik_trace;
    j["seed"] = m.seed;
    j["config"] = {{"n_restarts", m.n_restarts},
                   {"n_iter", m.n_iter},
                   {"reg_eps", m.reg_eps},
                   {"best_restart", m.best_restart},
                   {"failed_restarts", m.failed_restarts},
                   {"reseeds", m.reseeds}};
    return j;
}

GmmModel gmm_from_json(const nlohmann::json& j) {
    try {
        GmmModel m;
        m.K = j.at("K").get<int>();
        const auto w = j.at("weights").get<std::vector<double>>();
        if (m.K < 1 || static_cast<int>(w.size()) != m.K) throw validation_error("model K mismatch");
        m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), m.K);
        for (const auto& mu : j.at("means")) {
            const auto v = mu.get<std::vector<double>>();
            m.means.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
        m.d = static_cast<int>(m.means.front().size());
        for (const auto& cov : j.at("covariances")) {
            Eigen::MatrixXd c(m.d, m.d);
            for (int r = 0; r < m.d; ++r)
                for (int col = 0; col < m.d; ++col) c(r, col) = cov.at(r).at(col).get<double>();
            m.covariances.push_back(c);
        }
        if (static_cast<int>(m.means.size()) != m.K || static_cast<int>(m.covariances.size()) != m.K)
            throw validation_error("model component count mismatch");
        m.loglik_trace = j.value("loglik_trace", std::vector<double>{});
        m.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("config")) {
            const auto& c = j["config"];
            m.n_restarts = c.value("n_restarts", 0);
            m.n_iter = c.value("n_iter", 0);
            m.reg_eps = c.value("reg_eps", 0.0);
            m.best_restart = c.value("best_restart", -1);
            m.failed_restarts = c.value("failed_restarts", 0);
            m.reseeds = c.value("reseeds", 0);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("malformed GMM model: ") + e.what());
    }
}

}  // namespace vivclust::clustering
