#include "ca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ca {

namespace {

double log_base(double x, double base) { return std::log(x) / std::log(base); }

double entropy_of(const Vector& p, double base) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > 0) h -= p[i] * log_base(p[i], base);
    return h;
}

long choose2(long n) { return n * (n - 1) / 2; }

}  // namespace

ContingencyTable contingency_table(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size() || pred.empty())
        throw std::invalid_argument("contingency_table: bad label vectors");
    const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
    const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
    ContingencyTable t;
    t.counts.setZero(kp, kt);
    for (size_t i = 0; i < pred.size(); ++i) ++t.counts(pred[i], truth[i]);
    t.n = static_cast<long>(pred.size());
    t.row_marginals.assign(kp, 0);
    t.col_marginals.assign(kt, 0);
    for (int i = 0; i < kp; ++i)
        for (int j = 0; j < kt; ++j) {
            t.row_marginals[i] += t.counts(i, j);
            t.col_marginals[j] += t.counts(i, j);
        }
    return t;
}

// Shortest-augmenting-path Kuhn-Munkres with row/column potentials.
std::vector<int> hungarian(const Matrix& cost) {
    if (cost.rows() != cost.cols()) throw std::invalid_argument("hungarian: non-square matrix");
    if (!cost.allFinite()) throw std::invalid_argument("hungarian: non-finite entries");
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) match[p[j] - 1] = j - 1;
    return match;
}

double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    const ContingencyTable t = contingency_table(pred, truth);
    const int dim = std::max<int>(static_cast<int>(t.counts.rows()),
                                  static_cast<int>(t.counts.cols()));
    Matrix cost = Matrix::Zero(dim, dim);
    for (int i = 0; i < t.counts.rows(); ++i)
        for (int j = 0; j < t.counts.cols(); ++j)
            cost(i, j) = -static_cast<double>(t.counts(i, j));
    const std::vector<int> match = hungarian(cost);
    long matched = 0;
    for (int i = 0; i < t.counts.rows(); ++i)
        if (match[i] < t.counts.cols()) matched += t.counts(i, match[i]);
    return static_cast<double>(matched) / t.n;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth, bool geometric_mean) {
    const ContingencyTable t = contingency_table(pred, truth);
    const double n = static_cast<double>(t.n);
    double h_pred = 0.0, h_true = 0.0, mi = 0.0;
    for (long c : t.row_marginals)
        if (c > 0) h_pred -= (c / n) * std::log(c / n);
    for (long c : t.col_marginals)
        if (c > 0) h_true -= (c / n) * std::log(c / n);
    for (int i = 0; i < t.counts.rows(); ++i)
        for (int j = 0; j < t.counts.cols(); ++j) {
            const long c = t.counts(i, j);
            if (c == 0) continue;
            mi += (c / n) *
                  std::log(c * n /
                           (static_cast<double>(t.row_marginals[i]) * t.col_marginals[j]));
        }
    const double denom =
        geometric_mean ? std::sqrt(h_pred * h_true) : 0.5 * (h_pred + h_true);
    if (denom <= 0) return 0.0;
    return mi / denom;
}

double ari(const std::vector<int>& pred, const std::vector<int>& truth) {
    const ContingencyTable t = contingency_table(pred, truth);
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < t.counts.rows(); ++i)
        for (int j = 0; j < t.counts.cols(); ++j) sum_ij += choose2(t.counts(i, j));
    for (long c : t.row_marginals) sum_a += choose2(c);
    for (long c : t.col_marginals) sum_b += choose2(c);
    const double total_pairs = static_cast<double>(choose2(t.n));
    const double expected = sum_a * sum_b / total_pairs;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected == 0.0) return 0.0;
    return (sum_ij - expected) / (max_index - expected);
}

double kl_star(const std::vector<long>& counts, const Prior& prior, double eps) {
    long total = 0;
    for (long c : counts) total += c;
    if (total <= 0) throw std::invalid_argument("kl_star: counts are all zero");
    double kl = 0.0;
    for (size_t j = 0; j < counts.size(); ++j) {
        const double q = static_cast<double>(counts[j]) / total;
        if (q > 0) kl += q * std::log(q / prior.probs[j] + eps);
    }
    return kl;
}

double kl_star_clean(const std::vector<long>& counts, const Prior& prior) {
    long total = 0;
    for (long c : counts) total += c;
    if (total <= 0) throw std::invalid_argument("kl_star_clean: counts are all zero");
    double kl = 0.0;
    for (size_t j = 0; j < counts.size(); ++j) {
        const double q = static_cast<double>(counts[j]) / total;
        if (q > 0) kl += q * std::log(q / prior.probs[j]);
    }
    return kl;
}

double kl_star(const Vector& soft_counts, const Prior& prior, double eps) {
    const double total = soft_counts.sum();
    if (total <= 0) throw std::invalid_argument("kl_star: soft counts are all zero");
    double kl = 0.0;
    for (Eigen::Index j = 0; j < soft_counts.size(); ++j) {
        const double q = soft_counts[j] / total;
        if (q > 0) kl += q * std::log(q / prior.probs[j] + eps);
    }
    return kl;
}

EntropyReport marginal_entropies(const Matrix& soft, double base) {
    EntropyReport r;
    r.soft_dist = soft.colwise().mean().transpose();
    r.soft_dist /= r.soft_dist.sum();
    r.hard_dist = Vector::Zero(soft.cols());
    for (Eigen::Index i = 0; i < soft.rows(); ++i) {
        Eigen::Index j;
        soft.row(i).maxCoeff(&j);
        r.hard_dist[j] += 1.0;
    }
    r.hard_dist /= soft.rows();
    r.hard_entropy = entropy_of(r.hard_dist, base);
    r.soft_entropy = entropy_of(r.soft_dist, base);
    return r;
}

EntropyReport marginal_entropies(const std::vector<int>& labels, int k, double base) {
    Matrix soft = Matrix::Zero(labels.size(), k);
    for (size_t i = 0; i < labels.size(); ++i) soft(i, labels[i]) = 1.0;
    return marginal_entropies(soft, base);
}

}  // namespace ca
