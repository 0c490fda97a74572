#pragma once

#include "ca/core.hpp"

namespace ca {

// Row-stochastic soft assignment probabilities.
struct SoftAssignment {
    Matrix probs;  // N x K, rows sum to 1
};

// Numerically stable row-wise softmax.
Matrix softmax_rows(const Matrix& scores);

// Sinkhorn-Knopp normalization toward uniform marginals r = 1/K, c = 1/N.
// Stabilized by per-point max subtraction before exponentiation.
SoftAssignment sinkhorn(const Matrix& scores, double eps, int niters);

// Direct exp path without stabilization; agrees with sinkhorn on benign inputs.
SoftAssignment sinkhorn_direct(const Matrix& scores, double eps, int niters);

struct SinkhornResult {
    BatchAssignment assignment;
    SoftAssignment soft;
};
SinkhornResult assign_sinkhorn(const CostMatrix& costs, double eps = 0.5, int niters = 15);

struct RegLossResult {
    double loss;
    std::vector<int> labels;
};

// -w_ent * H(column means of softmax(-costs)) + w_point * mean per-row entropy.
RegLossResult entropy_reg_loss(const CostMatrix& costs, double w_ent = 100.0,
                               double w_point = 0.1);

enum class VarianceVariant { SumSquares, VarM };

// SumSquares: mean of squared soft column means; VarM: their variance.
RegLossResult variance_loss(const CostMatrix& costs, VarianceVariant variant,
                            double w_reg = 10.0, double w_point = 0.1);

// Per-row argmin with no partition support.
BatchAssignment assign_noreg(const CostMatrix& costs);

}  // namespace ca
