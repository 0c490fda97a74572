#pragma once

#include "ca/core.hpp"

namespace ca {

// Co-occurrence counts between predicted (rows) and true (columns) labels.
struct ContingencyTable {
    Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> counts;
    std::vector<long> row_marginals;
    std::vector<long> col_marginals;
    long n = 0;
};

ContingencyTable contingency_table(const std::vector<int>& pred, const std::vector<int>& truth);

// Kuhn-Munkres minimum-cost perfect matching on a square cost matrix.
// Returns the matched column for each row.
std::vector<int> hungarian(const Matrix& cost);

// Optimal-matching accuracy in [0, 1].
double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

// Normalized mutual information, arithmetic-mean normalization by default.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth,
           bool geometric_mean = false);

// Adjusted Rand index via the standard pair-counting formula.
double ari(const std::vector<int>& pred, const std::vector<int>& truth);

// KL divergence of the empirical hard-label distribution from the prior:
// sum_k q_k * log(q_k / p_k + eps), natural log.
double kl_star(const std::vector<long>& counts, const Prior& prior, double eps = 1e-8);

// Variant skipping zero-mass clusters instead of the eps guard.
double kl_star_clean(const std::vector<long>& counts, const Prior& prior);

double kl_star(const Vector& soft_counts, const Prior& prior, double eps = 1e-8);

// Hard/soft marginal distributions and entropies of a soft assignment matrix.
// base is 2 or e; it is always explicit.
struct EntropyReport {
    double hard_entropy;
    double soft_entropy;
    Vector hard_dist;
    Vector soft_dist;
};
EntropyReport marginal_entropies(const Matrix& soft, double base);
EntropyReport marginal_entropies(const std::vector<int>& labels, int k, double base);

}  // namespace ca
