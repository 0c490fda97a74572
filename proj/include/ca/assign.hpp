#pragma once

#include "ca/core.hpp"

namespace ca {

// Diagnostic record of the greedy loop: which (point, cluster) was picked at
// each step and the penalized cost it was picked at.
struct GreedyTrace {
    struct Step {
        int point;
        int cluster;
        double marginal_cost;
    };
    std::vector<Step> order;
    bool had_ties = false;
};

struct GreedyResult {
    BatchAssignment assignment;
    GreedyTrace trace;
};

// Per-cluster penalized cost for one point: cost_row[k] - log p(k) + log(counts[k] + 1).
// Zero-prior clusters map to +inf.
Vector conditional_costs(const Vector& cost_row, const Prior& prior,
                         const std::vector<long>& counts);

// Greedy combination assignment: N steps, each taking the globally minimal
// penalized entry over unassigned points. Ties broken by lowest point index,
// then lowest cluster index. init_counts supports cross-batch carryover;
// empty means all zeros. Uses an indexed priority queue with lazy invalidation.
GreedyResult assign_greedy(const CostMatrix& costs, const Prior& prior,
                           const std::vector<long>& init_counts = {});

// Naive O(N^2 K) rescan variant; must produce identical output to assign_greedy.
GreedyResult assign_greedy_rescan(const CostMatrix& costs, const Prior& prior,
                                  const std::vector<long>& init_counts = {});

// Exact minimizer of the batch objective by exhaustive enumeration over all
// K^N label vectors (lexicographic order; ties keep the lexicographically
// smallest). Guarded at K^N <= 10^7.
BatchAssignment assign_exact(const CostMatrix& costs, const Prior& prior);

// Nearest-centroid inference, no prior, no counts. Ties -> lowest index.
int infer_point(const Vector& z, const ClusterModel& model);
std::vector<int> infer_batch(const FeatureBatch& batch, const ClusterModel& model);

// Entropy-difference diagnostics for the log(n+1) approximation: the exact
// marginal-entropy difference between assigning to k vs k2, its first-order
// approximation, and the dropped error term.
struct EntropyDiffResult {
    double exact_diff;
    double approx_diff;
    double dropped_term;
};
EntropyDiffResult entropy_diff_check(const std::vector<long>& counts, int k, int k2, long n);

// True iff, for every row of an isotropic cost matrix under a uniform prior,
// the argmin of the penalized conditional cost equals the argmin of
// ||z - mu_j||^2 + 2*sigma*log(counts[j] + 1), under identical tie-breaking.
bool equivalence_check(const CostMatrix& costs, const std::vector<long>& counts);

}  // namespace ca
