#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

namespace ca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// N x d batch of encoded points, one row per point.
struct FeatureBatch {
    Matrix data;
    int n() const { return static_cast<int>(data.rows()); }
    int dim() const { return static_cast<int>(data.cols()); }
};

// Multinoulli prior over cluster labels. log_probs is -inf where probs == 0;
// such clusters are never assignable.
struct Prior {
    Vector probs;
    Vector log_probs;
    int k() const { return static_cast<int>(probs.size()); }
    static Prior uniform(int k);
    static Prior from_probs(const Vector& p);
};

// Sigma_k = sigma * I for every cluster; sigma is the variance scale.
struct Isotropic {
    double sigma = 1.0;
};

// Per-cluster inverse covariances plus the 0.5*log|Sigma_k| terms.
struct FullCovariance {
    std::vector<Matrix> inv;
    std::vector<double> half_log_det;
};

using Covariance = std::variant<Isotropic, FullCovariance>;

struct ClusterModel {
    Matrix centroids;  // K x d
    Covariance covariance = Isotropic{};
    Prior prior;
    int k() const { return static_cast<int>(centroids.rows()); }
    int dim() const { return static_cast<int>(centroids.cols()); }
    bool isotropic() const { return std::holds_alternative<Isotropic>(covariance); }
    double sigma() const { return std::get<Isotropic>(covariance).sigma; }
};

// N x K matrix of Gaussian negative log-likelihood costs d(z_i, mu_j, Sigma_j).
// In isotropic mode every entry carries the same additive constant, recorded
// so penalty rules can recover the raw squared distances.
struct CostMatrix {
    Matrix values;
    bool isotropic = false;
    double sigma = 0.0;     // valid when isotropic
    double constant = 0.0;  // per-entry additive constant in isotropic mode
    int n() const { return static_cast<int>(values.rows()); }
    int k() const { return static_cast<int>(values.cols()); }
};

// Hard labels plus running cluster counts; loss is the mean raw assigned cost.
struct BatchAssignment {
    std::vector<int> labels;
    std::vector<long> counts;
    double loss = 0.0;
};

// 0.5*(z-mu_j)^T Sigma_j^-1 (z-mu_j) + 0.5*log((2pi)^d |Sigma_j|).
double point_cost(const Vector& z, int j, const ClusterModel& model);

// Builds the full N x K cost table. Rows computed in parallel (OpenMP).
CostMatrix cost_matrix(const FeatureBatch& batch, const ClusterModel& model);

// Serial reference; must produce bitwise-identical values to cost_matrix.
CostMatrix cost_matrix_serial(const FeatureBatch& batch, const ClusterModel& model);

// Exact log(n!) as a cumulative sum of logs.
double log_factorial(long n);

// sum_i [cost(i, k_i) - log p(k_i)] + sum_k log(n_k!).
// Returns +inf if any point is assigned to a zero-prior cluster.
double batch_objective(const BatchAssignment& a, const CostMatrix& costs, const Prior& prior);

// Fills counts and mean raw assigned cost from a label vector.
BatchAssignment assignment_from_labels(const std::vector<int>& labels, const CostMatrix& costs);

}  // namespace ca
