#include "ca/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ca {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}  // namespace

Prior Prior::uniform(int k) {
    Prior p;
    p.probs = Vector::Constant(k, 1.0 / k);
    p.log_probs = Vector::Constant(k, -std::log(static_cast<double>(k)));
    return p;
}

Prior Prior::from_probs(const Vector& probs) {
    const double total = probs.sum();
    if (!(total > 0) || (probs.array() < 0).any())
        throw std::invalid_argument("prior must be nonnegative with positive mass");
    Prior p;
    p.probs = probs / total;
    p.log_probs.resize(probs.size());
    for (Eigen::Index i = 0; i < probs.size(); ++i)
        p.log_probs[i] = p.probs[i] > 0 ? std::log(p.probs[i]) : -kInf;
    return p;
}

double point_cost(const Vector& z, int j, const ClusterModel& model) {
    if (z.size() != model.dim()) throw std::invalid_argument("point_cost: dimension mismatch");
    if (j < 0 || j >= model.k()) throw std::invalid_argument("point_cost: cluster index out of range");
    if (!z.allFinite()) throw std::invalid_argument("point_cost: non-finite input");
    const Vector delta = z - model.centroids.row(j).transpose();
    const int d = model.dim();
    if (model.isotropic()) {
        const double sigma = model.sigma();
        return delta.squaredNorm() / (2.0 * sigma) + 0.5 * d * (kLog2Pi + std::log(sigma));
    }
    const auto& cov = std::get<FullCovariance>(model.covariance);
    return 0.5 * delta.dot(cov.inv[j] * delta) + cov.half_log_det[j] + 0.5 * d * kLog2Pi;
}

namespace {

CostMatrix cost_matrix_impl(const FeatureBatch& batch, const ClusterModel& model, bool parallel) {
    if (batch.dim() != model.dim()) throw std::invalid_argument("cost_matrix: dimension mismatch");
    const int n = batch.n(), k = model.k();
    CostMatrix out;
    out.values.resize(n, k);
    if (model.isotropic()) {
        out.isotropic = true;
        out.sigma = model.sigma();
        out.constant = 0.5 * model.dim() * (kLog2Pi + std::log(out.sigma));
    }
#pragma omp parallel for if (parallel) schedule(static)
    for (int i = 0; i < n; ++i) {
        const Vector z = batch.data.row(i).transpose();
        for (int j = 0; j < k; ++j) out.values(i, j) = point_cost(z, j, model);
    }
    return out;
}

}  // namespace

CostMatrix cost_matrix(const FeatureBatch& batch, const ClusterModel& model) {
    return cost_matrix_impl(batch, model, true);
}

CostMatrix cost_matrix_serial(const FeatureBatch& batch, const ClusterModel& model) {
    return cost_matrix_impl(batch, model, false);
}

double log_factorial(long n) {
    if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
    double acc = 0.0;
    for (long i = 2; i <= n; ++i) acc += std::log(static_cast<double>(i));
    return acc;
}

double batch_objective(const BatchAssignment& a, const CostMatrix& costs, const Prior& prior) {
    const int n = costs.n(), k = costs.k();
    if (static_cast<int>(a.labels.size()) != n || static_cast<int>(a.counts.size()) != k ||
        prior.k() != k)
        throw std::invalid_argument("batch_objective: shape mismatch");
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const int ki = a.labels[i];
        if (prior.probs[ki] <= 0.0) return kInf;
        total += costs.values(i, ki) - prior.log_probs[ki];
    }
    for (int j = 0; j < k; ++j) total += log_factorial(a.counts[j]);
    return total;
}

BatchAssignment assignment_from_labels(const std::vector<int>& labels, const CostMatrix& costs) {
    BatchAssignment a;
    a.labels = labels;
    a.counts.assign(costs.k(), 0);
    double total = 0.0;
    for (int i = 0; i < costs.n(); ++i) {
        const int ki = labels[i];
        if (ki < 0 || ki >= costs.k()) throw std::invalid_argument("label out of range");
        ++a.counts[ki];
        total += costs.values(i, ki);
    }
    a.loss = costs.n() > 0 ? total / costs.n() : 0.0;
    return a;
}

}  // namespace ca
