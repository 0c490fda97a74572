#pragma once

#include <cstdint>
#include <string>

#include "ca/core.hpp"

namespace ca {

// Synthetic Gaussian-mixture specification; the desk-scale stand-in for the
// image datasets.
struct GmmSpec {
    int k = 10;
    int d = 16;
    Matrix means;    // k x d
    double stddev = 1.0;
    Vector weights;  // sums to 1
    std::uint64_t seed = 0;

    // K=10, d=16 mixture with means at 6 * (random unit directions), stddev 1:
    // separated enough that optimal Bayes accuracy exceeds 0.99.
    static GmmSpec desk_default(std::uint64_t seed);
};

struct LabeledDataset {
    Matrix features;          // N x d
    std::vector<int> labels;  // empty when unlabeled
    int k = 0;
    bool has_labels() const { return !labels.empty(); }
    int n() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }
    Vector class_frequencies() const;
};

LabeledDataset gmm_generate(const GmmSpec& spec, int n);

enum class ImbalanceSchedule { Imb1, Imb2, Imb3 };

// Per-class keep probabilities; the K=10 curves are stretched by linear
// interpolation when k != 10.
Vector imbalance_keep_probs(ImbalanceSchedule schedule, int k);

struct ImbalanceResult {
    LabeledDataset dataset;
    Prior prior;  // keep probabilities normalized to sum 1
};

// Each point kept by an independent seeded coin with its class probability;
// exact_quota keeps round(p * class size) points deterministically instead.
ImbalanceResult apply_imbalance(const LabeledDataset& dataset, const Vector& keep_probs,
                                std::uint64_t seed, bool exact_quota = false);

// CSV: numeric feature columns plus an optional final integer "label" column
// (identified by header). 17 significant digits, '.' separator.
LabeledDataset load_csv(const std::string& path);
void save_csv(const LabeledDataset& dataset, const std::string& path);

}  // namespace ca
