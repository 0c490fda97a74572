#include "ca/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace ca {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<long> resolve_init_counts(const std::vector<long>& init_counts, int k) {
    if (init_counts.empty()) return std::vector<long>(k, 0);
    if (static_cast<int>(init_counts.size()) != k)
        throw std::invalid_argument("init_counts size mismatch");
    for (long c : init_counts)
        if (c < 0) throw std::invalid_argument("init_counts must be nonnegative");
    return init_counts;
}

void check_greedy_inputs(const CostMatrix& costs, const Prior& prior) {
    if (prior.k() != costs.k()) throw std::invalid_argument("assign_greedy: prior size mismatch");
    if (!costs.values.allFinite()) throw std::invalid_argument("assign_greedy: non-finite costs");
    if ((prior.probs.array() <= 0).all())
        throw std::invalid_argument("assign_greedy: all clusters have zero prior");
}

// Row argmin of cost_row[j] - log p(j) + log(counts[j]+1), lowest index on ties.
std::pair<int, double> best_in_row(const CostMatrix& costs, int i, const Prior& prior,
                                   const std::vector<long>& counts) {
    int best_j = -1;
    double best = kInf;
    for (int j = 0; j < costs.k(); ++j) {
        if (prior.probs[j] <= 0.0) continue;
        const double v =
            costs.values(i, j) - prior.log_probs[j] + std::log(static_cast<double>(counts[j] + 1));
        if (v < best) {
            best = v;
            best_j = j;
        }
    }
    return {best_j, best};
}

void record_step(GreedyResult& out, const CostMatrix& costs, std::vector<long>& counts,
                 double& raw_total, int point, int cluster, double penalized) {
    out.assignment.labels[point] = cluster;
    ++counts[cluster];
    raw_total += costs.values(point, cluster);
    out.trace.order.push_back({point, cluster, penalized});
}

}  // namespace

Vector conditional_costs(const Vector& cost_row, const Prior& prior,
                         const std::vector<long>& counts) {
    const int k = static_cast<int>(cost_row.size());
    if (prior.k() != k || static_cast<int>(counts.size()) != k)
        throw std::invalid_argument("conditional_costs: shape mismatch");
    Vector out(k);
    for (int j = 0; j < k; ++j) {
        if (counts[j] < 0) throw std::invalid_argument("conditional_costs: negative count");
        out[j] = prior.probs[j] > 0
                     ? cost_row[j] - prior.log_probs[j] + std::log(static_cast<double>(counts[j] + 1))
                     : kInf;
    }
    return out;
}

GreedyResult assign_greedy(const CostMatrix& costs, const Prior& prior,
                           const std::vector<long>& init_counts) {
    check_greedy_inputs(costs, prior);
    const int n = costs.n(), k = costs.k();
    std::vector<long> counts = resolve_init_counts(init_counts, k);

    GreedyResult out;
    out.assignment.labels.assign(n, -1);
    out.trace.order.reserve(n);

    // Min-heap of (value, point, cluster). Counts only grow, so log(count+1)
    // penalties only grow and stale entries are lower bounds: when a popped
    // entry no longer matches the recomputed row best, push the update.
    using Entry = std::tuple<double, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (int i = 0; i < n; ++i) {
        auto [j, v] = best_in_row(costs, i, prior, counts);
        heap.emplace(v, i, j);
    }

    std::vector<char> assigned(n, 0);
    double raw_total = 0.0;
    int n_done = 0;
    while (n_done < n) {
        auto [v, i, j] = heap.top();
        heap.pop();
        if (assigned[i]) continue;
        auto [cur_j, cur_v] = best_in_row(costs, i, prior, counts);
        if (cur_v > v) {
            heap.emplace(cur_v, i, cur_j);
            continue;
        }
        // Global ties: the heap orders by (value, point, cluster), but a later
        // pop may recompute to the same value with a lower cluster index; use
        // the fresh row best so tie-breaking matches the rescan reference.
        if (cur_j != j && cur_v == v) out.trace.had_ties = true;
        assigned[i] = 1;
        record_step(out, costs, counts, raw_total, i, cur_j, cur_v);
        ++n_done;
    }
    out.assignment.counts = counts;
    out.assignment.loss = raw_total / n;
    return out;
}

GreedyResult assign_greedy_rescan(const CostMatrix& costs, const Prior& prior,
                                  const std::vector<long>& init_counts) {
    check_greedy_inputs(costs, prior);
    const int n = costs.n(), k = costs.k();
    std::vector<long> counts = resolve_init_counts(init_counts, k);

    GreedyResult out;
    out.assignment.labels.assign(n, -1);
    out.trace.order.reserve(n);
    std::vector<char> assigned(n, 0);
    double raw_total = 0.0;

    for (int step = 0; step < n; ++step) {
        int best_i = -1, best_j = -1;
        double best = kInf;
        int n_min = 0;
        for (int i = 0; i < n; ++i) {
            if (assigned[i]) continue;
            for (int j = 0; j < k; ++j) {
                if (prior.probs[j] <= 0.0) continue;
                const double v = costs.values(i, j) - prior.log_probs[j] +
                                 std::log(static_cast<double>(counts[j] + 1));
                if (v < best) {
                    best = v;
                    best_i = i;
                    best_j = j;
                    n_min = 1;
                } else if (v == best) {
                    ++n_min;
                }
            }
        }
        if (n_min > 1) out.trace.had_ties = true;
        assigned[best_i] = 1;
        record_step(out, costs, counts, raw_total, best_i, best_j, best);
    }
    out.assignment.counts = counts;
    out.assignment.loss = raw_total / n;
    return out;
}

BatchAssignment assign_exact(const CostMatrix& costs, const Prior& prior) {
    const int n = costs.n(), k = costs.k();
    double combos = std::pow(static_cast<double>(k), n);
    if (combos > 1e7)
        throw std::invalid_argument("assign_exact: K^N exceeds the 10^7 enumeration guard");

    std::vector<int> labels(n, 0), best_labels;
    double best = kInf;
    BatchAssignment cand;
    while (true) {
        cand = assignment_from_labels(labels, costs);
        const double obj = batch_objective(cand, costs, prior);
        if (obj < best) {
            best = obj;
            best_labels = labels;
        }
        // Lexicographic odometer, last point fastest.
        int pos = n - 1;
        while (pos >= 0 && labels[pos] == k - 1) labels[pos--] = 0;
        if (pos < 0) break;
        ++labels[pos];
    }
    return assignment_from_labels(best_labels, costs);
}

int infer_point(const Vector& z, const ClusterModel& model) {
    int best_j = 0;
    double best = kInf;
    for (int j = 0; j < model.k(); ++j) {
        const double d2 = (z - model.centroids.row(j).transpose()).squaredNorm();
        if (d2 < best) {
            best = d2;
            best_j = j;
        }
    }
    return best_j;
}

std::vector<int> infer_batch(const FeatureBatch& batch, const ClusterModel& model) {
    std::vector<int> labels(batch.n());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < batch.n(); ++i)
        labels[i] = infer_point(batch.data.row(i).transpose(), model);
    return labels;
}

EntropyDiffResult entropy_diff_check(const std::vector<long>& counts, int k, int k2, long n) {
    long total = 0;
    for (long c : counts) total += c;
    if (total != n) throw std::invalid_argument("entropy_diff_check: counts must sum to N");
    if (k == k2) throw std::invalid_argument("entropy_diff_check: k and k' must differ");

    // Marginal entropy (natural log) after one more assignment to cluster `to`.
    auto entropy_after = [&](int to) {
        double h = 0.0;
        for (size_t j = 0; j < counts.size(); ++j) {
            const double c = counts[j] + (static_cast<int>(j) == to ? 1.0 : 0.0);
            if (c > 0) {
                const double p = c / (n + 1.0);
                h -= p * std::log(p);
            }
        }
        return h;
    };

    EntropyDiffResult r;
    r.exact_diff = entropy_after(k) - entropy_after(k2);
    const double xk = static_cast<double>(counts[k]);
    const double xk2 = static_cast<double>(counts[k2]);
    r.approx_diff = (std::log(xk2 + 1.0) - std::log(xk + 1.0)) / (n + 1.0);
    r.dropped_term = (xk2 - xk) / ((n + 1.0) * (xk + 1.0) * (xk2 + 1.0));
    return r;
}

bool equivalence_check(const CostMatrix& costs, const std::vector<long>& counts) {
    if (!costs.isotropic)
        throw std::invalid_argument("equivalence_check: requires an isotropic cost matrix");
    if (static_cast<int>(counts.size()) != costs.k())
        throw std::invalid_argument("equivalence_check: counts size mismatch");
    const Prior uniform = Prior::uniform(costs.k());
    for (int i = 0; i < costs.n(); ++i) {
        const Vector cc = conditional_costs(costs.values.row(i).transpose(), uniform, counts);
        int arg_ca = 0, arg_alg = 0;
        double best_ca = kInf, best_alg = kInf;
        for (int j = 0; j < costs.k(); ++j) {
            if (cc[j] < best_ca) {
                best_ca = cc[j];
                arg_ca = j;
            }
            // Raw squared distance recovered from the stored cost convention.
            const double sq = (costs.values(i, j) - costs.constant) * 2.0 * costs.sigma;
            const double v = sq + 2.0 * costs.sigma * std::log(static_cast<double>(counts[j] + 1));
            if (v < best_alg) {
                best_alg = v;
                arg_alg = j;
            }
        }
        if (arg_ca != arg_alg) return false;
    }
    return true;
}

}  // namespace ca
