#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ca/core.hpp"

namespace ca {

enum class EncoderKind { Identity, Linear, Mlp };

// Identity, affine, or one-hidden-layer ReLU encoder. Unused parameter
// matrices are empty. Biases are stored as column vectors.
struct EncoderParams {
    EncoderKind kind = EncoderKind::Identity;
    int din = 0, hidden = 0, nz = 0;
    Matrix w1, b1;  // Linear: nz x din / nz x 1.  Mlp: hidden x din / hidden x 1.
    Matrix w2, b2;  // Mlp only: nz x hidden / nz x 1.

    static EncoderParams identity(int d);
    static EncoderParams linear(int din, int nz, std::mt19937_64& rng);
    static EncoderParams mlp(int din, int hidden, int nz, std::mt19937_64& rng);
};

struct ForwardCache {
    Matrix x;    // N x din input
    Matrix pre;  // N x hidden pre-activation (Mlp)
    Matrix h;    // N x hidden post-ReLU (Mlp)
};

FeatureBatch forward(const FeatureBatch& x, const EncoderParams& params,
                     ForwardCache* cache = nullptr);

struct EncoderGrads {
    Matrix dw1, db1, dw2, db2;
    Matrix dx;
};

// Gradients of sum_i <dz_i, z_i> w.r.t. all parameters. ReLU gradient is 0 at
// exactly 0.
EncoderGrads backward(const EncoderParams& params, const ForwardCache& cache, const Matrix& dz);

struct LossGrads {
    Matrix dz;          // N x nz
    Matrix dcentroids;  // K x nz
};

// Gradients of (1/N) sum_i ||z_i - mu_{k_i}||^2 / (2*sigma). The prior and
// log-factorial terms of the objective are parameter-free.
LossGrads loss_grad(const FeatureBatch& z, const std::vector<int>& labels,
                    const ClusterModel& model);

// Bias-corrected Adam over a flat list of parameter matrices.
struct AdamState {
    std::vector<Matrix> m, v;
    long t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;

    void init(const std::vector<const Matrix*>& params);
};

void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
               AdamState& state);

// Flat little-endian float64 checkpoint with a plain-text header line giving
// kind and dimensions; stores encoder parameters followed by centroids.
void save_checkpoint(const std::string& path, const EncoderParams& params,
                     const ClusterModel& model);
void load_checkpoint(const std::string& path, EncoderParams& params, ClusterModel& model);

}  // namespace ca
