#include "ca/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace ca {

namespace {

// Shannon entropy in nats of an (unnormalized-safe) probability vector.
double entropy_nats(const Vector& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > 0) h -= p[i] * std::log(p[i]);
    return h;
}

std::vector<int> row_argmins(const Matrix& costs) {
    std::vector<int> labels(costs.rows());
    for (Eigen::Index i = 0; i < costs.rows(); ++i) {
        Eigen::Index j;
        costs.row(i).minCoeff(&j);
        labels[i] = static_cast<int>(j);
    }
    return labels;
}

// Alternating rescaling on a K x N transport matrix toward row marginals 1/K
// and column marginals 1/N; returns the transpose with rows renormalized.
SoftAssignment sinkhorn_iterate(Matrix q, int niters) {
    const Eigen::Index k = q.rows(), n = q.cols();
    // Initial column normalization (one mass unit per data point).
    for (Eigen::Index b = 0; b < n; ++b) q.col(b) /= q.col(b).sum();
    const double r = 1.0 / k, c = 1.0 / n;
    for (int it = 0; it < niters; ++it) {
        for (Eigen::Index j = 0; j < k; ++j) q.row(j) *= r / q.row(j).sum();
        for (Eigen::Index b = 0; b < n; ++b) q.col(b) *= c / q.col(b).sum();
    }
    for (Eigen::Index b = 0; b < n; ++b) q.col(b) /= q.col(b).sum();
    if (!q.allFinite()) throw std::runtime_error("sinkhorn: non-finite values");
    return SoftAssignment{q.transpose()};
}

}  // namespace

Matrix softmax_rows(const Matrix& scores) {
    Matrix out(scores.rows(), scores.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const Eigen::RowVectorXd shifted =
            scores.row(i).array() - scores.row(i).maxCoeff();
        const Eigen::RowVectorXd e = shifted.array().exp();
        out.row(i) = e / e.sum();
    }
    return out;
}

SoftAssignment sinkhorn(const Matrix& scores, double eps, int niters) {
    if (niters < 1 || eps <= 0) throw std::invalid_argument("sinkhorn: bad eps/niters");
    Matrix q(scores.cols(), scores.rows());  // K x N
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double m = scores.row(i).maxCoeff();
        q.col(i) = ((scores.row(i).array() - m) / eps).exp().transpose();
    }
    return sinkhorn_iterate(std::move(q), niters);
}

SoftAssignment sinkhorn_direct(const Matrix& scores, double eps, int niters) {
    if (niters < 1 || eps <= 0) throw std::invalid_argument("sinkhorn: bad eps/niters");
    Matrix q = (scores.transpose().array() / eps).exp();
    return sinkhorn_iterate(std::move(q), niters);
}

SinkhornResult assign_sinkhorn(const CostMatrix& costs, double eps, int niters) {
    SinkhornResult out;
    out.soft = sinkhorn(-costs.values, eps, niters);
    std::vector<int> labels(costs.n());
    for (int i = 0; i < costs.n(); ++i) {
        Eigen::Index j;
        out.soft.probs.row(i).maxCoeff(&j);
        labels[i] = static_cast<int>(j);
    }
    out.assignment = assignment_from_labels(labels, costs);
    return out;
}

RegLossResult entropy_reg_loss(const CostMatrix& costs, double w_ent, double w_point) {
    if (w_ent < 0 || w_point < 0) throw std::invalid_argument("entropy_reg_loss: negative weight");
    const Matrix soft = softmax_rows(-costs.values);
    const Vector marginal = soft.colwise().mean().transpose();
    double row_entropy = 0.0;
    for (Eigen::Index i = 0; i < soft.rows(); ++i)
        row_entropy += entropy_nats(soft.row(i).transpose());
    row_entropy /= soft.rows();
    RegLossResult r;
    r.loss = -w_ent * entropy_nats(marginal) + w_point * row_entropy;
    r.labels = row_argmins(costs.values);
    return r;
}

RegLossResult variance_loss(const CostMatrix& costs, VarianceVariant variant, double w_reg,
                            double w_point) {
    if (w_reg < 0 || w_point < 0) throw std::invalid_argument("variance_loss: negative weight");
    const Matrix soft = softmax_rows(-costs.values);
    const Vector m = soft.colwise().mean().transpose();
    const double mean_m = m.mean();
    double reg;
    if (variant == VarianceVariant::SumSquares)
        reg = m.array().square().mean();
    else
        reg = (m.array() - mean_m).square().mean();
    RegLossResult r;
    r.labels = row_argmins(costs.values);
    double assigned = 0.0;
    for (int i = 0; i < costs.n(); ++i) assigned += costs.values(i, r.labels[i]);
    r.loss = w_reg * reg + w_point * assigned / costs.n();
    return r;
}

BatchAssignment assign_noreg(const CostMatrix& costs) {
    return assignment_from_labels(row_argmins(costs.values), costs);
}

}  // namespace ca
