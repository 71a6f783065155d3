#pragma once

#include <Eigen/Core>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

namespace vivclust::clustering {

struct GmmModel {
    int K = 0;
    int d = 0;
    Eigen::VectorXd weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
    std::vector<double> loglik_trace;  // after each EM iteration
    std::uint64_t seed = 0;
    int best_restart = -1;
    int failed_restarts = 0;
    double reg_eps = 0.0;
    int n_restarts = 0;
    int n_iter = 0;
    int reseeds = 0;  // empty-component reseeds in the kept restart
};

struct GmmOptions {
    int n_restarts = 100;
    int n_iter = 100;
    std::uint64_t seed = 0;
    double reg_eps = -1.0;  // < 0: 1e-6 times the mean feature variance
    double tol = 0.0;       // relative log-likelihood stop; 0 runs all iterations
};

// Ridge used when options.reg_eps < 0.
double default_reg_eps(const Eigen::MatrixXd& X);

// EM from k-means initialisations; the restart with the highest final
// log-likelihood wins, ties to the lowest index. Restarts whose covariances cannot
// be factorised are discarded; a numerical Error is thrown when all fail.
// Restarts run in parallel; the serial variant is the reference.
GmmModel gmm_fit(const Eigen::MatrixXd& X, int K, const GmmOptions& options = {});
GmmModel gmm_fit_serial(const Eigen::MatrixXd& X, int K, const GmmOptions& options = {});

// Initial parameters from one k-means run (weights = fractions, means = centroids,
// covariances = within-cluster covariances + reg_eps I).
GmmModel gmm_init_from_kmeans(const Eigen::MatrixXd& X, int K, std::uint64_t seed, double reg_eps);

// n x K matrix of log p_k + log N(x_i | mu_k, Sigma_k). Throws a numerical Error
// when a covariance is not positive definite.
Eigen::MatrixXd component_log_density(const GmmModel& model, const Eigen::MatrixXd& X);

double gmm_loglik(const GmmModel& model, const Eigen::MatrixXd& X);

// Posterior responsibilities, rows summing to 1.
Eigen::MatrixXd e_step(const GmmModel& model, const Eigen::MatrixXd& X);

// Weighted maximum-likelihood update with reg_eps I added to every covariance.
// A component with total responsibility below 1e-12 is reseeded at the point whose
// largest responsibility is smallest (weight 1/n, pooled covariance).
GmmModel m_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& t, double reg_eps,
                int* reseeds = nullptr);

// Argmax of responsibilities, ties to the lowest component.
std::vector<int> predict_labels(const GmmModel& model, const Eigen::MatrixXd& X);

nlohmann::json to_json(const GmmModel& model);
GmmModel gmm_from_json(const nlohmann::json& j);

}  // namespace vivclust::clustering
