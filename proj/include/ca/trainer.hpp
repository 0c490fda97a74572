#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ca/core.hpp"
#include "ca/data.hpp"
#include "ca/encoder.hpp"

namespace ca {

enum class Method { CA, SK, ENT, SS, VarM, NoReg };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

struct TrainConfig {
    Method method = Method::CA;
    int epochs = 10;
    int batch_size = 256;
    int nz = 128;
    double sigma = 100.0;
    double lr = 1e-3;
    double lr_centroids = -1.0;  // < 0 means same as lr
    EncoderKind encoder = EncoderKind::Mlp;
    int hidden = 64;
    std::uint64_t seed = 0;
    bool warm_start = false;
    bool keep_counts_across_batches = false;
    bool estimate_covars = false;
    std::optional<Vector> prior_probs;  // explicit prior; uniform otherwise
    // Baseline weights (reference-code defaults, exposed as flags).
    double w_ent = 100.0;
    double w_reg = 10.0;
    double w_point = 0.1;
    double sk_eps = 0.5;
    int sk_iters = 15;
};

struct MetricsReport {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double kl_star_hard = 0.0;
    double kl_star_soft = 0.0;
    double hard_entropy = 0.0;
    double soft_entropy = 0.0;
};

struct EpochReport {
    int epoch = 0;
    double mean_loss = 0.0;
    MetricsReport metrics;
    std::vector<long> hard_counts;
    Vector soft_counts;
};

struct TrainResult {
    std::vector<EpochReport> epochs;
    EpochReport best;  // by NMI
};

class Trainer {
public:
    Trainer(const TrainConfig& config, int input_dim, int n_clusters);

    // Encode, assign with the configured method, backpropagate the distance
    // term, step both optimizers. Returns the batch loss.
    double train_on_batch(const FeatureBatch& x);

    TrainResult train_epochs(const LabeledDataset& dataset);

    // Evaluation pass over the dataset with nearest-centroid inference.
    EpochReport evaluate(const LabeledDataset& dataset, int epoch);

    // Per-cluster empirical inverse covariances, rescaled so the mean
    // inverse-covariance magnitude matches the previous model. No-op if any
    // cluster is empty; ridge 1e-6*I on singular empirical covariances.
    void estimate_covariances(const FeatureBatch& features, const std::vector<int>& labels);

    const ClusterModel& model() const { return model_; }
    ClusterModel& model() { return model_; }
    const EncoderParams& encoder() const { return encoder_; }
    const TrainConfig& config() const { return config_; }
    void reset_counts();

private:
    std::vector<int> assign_batch(const CostMatrix& costs, double& loss_out);

    TrainConfig config_;
    ClusterModel model_;
    EncoderParams encoder_;
    Prior prior_;
    AdamState opt_encoder_;
    AdamState opt_centroids_;
    std::vector<long> running_counts_;
    std::mt19937_64 rng_;
    bool warm_started_ = false;
};

}  // namespace ca
