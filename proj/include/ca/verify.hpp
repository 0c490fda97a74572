#pragma once

#include <string>
#include <vector>

#include "ca/core.hpp"

namespace ca::verify {

struct SuiteResult {
    std::string name;
    bool passed = false;
    long checks = 0;
    long failures = 0;
    std::string detail;
};

// Independent exhaustive minimizer of the batch objective; enumerates label
// vectors with point 0 as the fastest-varying digit, recursively. Kept
// separate from assign_exact so the two can cross-check each other.
double exact_objective_second_enumerator(const CostMatrix& costs, const Prior& prior);

// Hard/soft entropies of the 4x3 probability fixtures D1 and D2 (base 2).
SuiteResult suite_d_matrices();

// |dropped_term| <= N/(N+1)^2 over all count vectors with K=3, N <= n_max.
SuiteResult suite_penalty_bound(int n_max = 30);

// Penalized-cost argmin vs squared-distance-plus-2*sigma*log-penalty argmin on
// random isotropic instances, sigma in {1, 100}.
SuiteResult suite_equivalence(int instances = 500, std::uint64_t seed = 1234);

// Greedy objective >= exact objective on random N=8, K=3 instances; exact
// solver agrees with the second enumerator; heap and rescan greedy agree.
SuiteResult suite_oracle(int instances = 200, std::uint64_t seed = 99);

// Soft-marginal KL* vs uniform <= 1e-3 after sinkhorn(eps=0.5, niters=15).
SuiteResult suite_sinkhorn(int instances = 50, std::uint64_t seed = 7);

// ARI vs pair-counting brute force, hungarian vs permutation enumeration,
// constant-prediction ACC on balanced classes.
SuiteResult suite_metric_oracles(std::uint64_t seed = 5);

// Finite-difference checks on encoder and centroid gradients, 20 seeds per
// encoder kind.
SuiteResult suite_grad_checks(int seeds_per_kind = 20);

// Identical cost rows: soft entropy near log K while hard entropy is 0.
SuiteResult suite_hard_soft_gap();

std::vector<SuiteResult> run_all();

}  // namespace ca::verify
