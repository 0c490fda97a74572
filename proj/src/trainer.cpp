#include "ca/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ca/assign.hpp"
#include "ca/baselines.hpp"
#include "ca/metrics.hpp"

namespace ca {

Method method_from_name(const std::string& name) {
    if (name == "ca") return Method::CA;
    if (name == "sk") return Method::SK;
    if (name == "ent") return Method::ENT;
    if (name == "ss") return Method::SS;
    if (name == "varm") return Method::VarM;
    if (name == "noreg") return Method::NoReg;
    throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method m) {
    switch (m) {
        case Method::CA: return "ca";
        case Method::SK: return "sk";
        case Method::ENT: return "ent";
        case Method::SS: return "ss";
        case Method::VarM: return "varm";
        case Method::NoReg: return "noreg";
    }
    return "?";
}

Trainer::Trainer(const TrainConfig& config, int input_dim, int n_clusters)
    : config_(config), rng_(config.seed) {
    if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    const int nz = config.encoder == EncoderKind::Identity ? input_dim : config.nz;
    switch (config.encoder) {
        case EncoderKind::Identity:
            encoder_ = EncoderParams::identity(input_dim);
            break;
        case EncoderKind::Linear:
            encoder_ = EncoderParams::linear(input_dim, nz, rng_);
            break;
        case EncoderKind::Mlp:
            encoder_ = EncoderParams::mlp(input_dim, config.hidden, nz, rng_);
            break;
    }
    // Centroids ~ standard normal per coordinate.
    std::normal_distribution<double> gauss(0.0, 1.0);
    model_.centroids.resize(n_clusters, nz);
    for (int j = 0; j < n_clusters; ++j)
        for (int c = 0; c < nz; ++c) model_.centroids(j, c) = gauss(rng_);
    model_.covariance = Isotropic{config.sigma};
    prior_ = config.prior_probs ? Prior::from_probs(*config.prior_probs)
                                : Prior::uniform(n_clusters);
    model_.prior = prior_;

    opt_encoder_.lr = config.lr;
    if (encoder_.kind == EncoderKind::Linear)
        opt_encoder_.init({&encoder_.w1, &encoder_.b1});
    else if (encoder_.kind == EncoderKind::Mlp)
        opt_encoder_.init({&encoder_.w1, &encoder_.b1, &encoder_.w2, &encoder_.b2});
    opt_centroids_.lr = config.lr_centroids < 0 ? config.lr : config.lr_centroids;
    opt_centroids_.init({&model_.centroids});
    running_counts_.assign(n_clusters, 0);
}

void Trainer::reset_counts() { running_counts_.assign(model_.k(), 0); }

std::vector<int> Trainer::assign_batch(const CostMatrix& costs, double& loss_out) {
    switch (config_.method) {
        case Method::CA: {
            const auto r = assign_greedy(costs, prior_,
                                         config_.keep_counts_across_batches ? running_counts_
                                                                            : std::vector<long>{});
            if (config_.keep_counts_across_batches) running_counts_ = r.assignment.counts;
            loss_out = r.assignment.loss;
            return r.assignment.labels;
        }
        case Method::SK: {
            const auto r = assign_sinkhorn(costs, config_.sk_eps, config_.sk_iters);
            loss_out = r.assignment.loss;
            return r.assignment.labels;
        }
        case Method::ENT: {
            const auto r = entropy_reg_loss(costs, config_.w_ent, config_.w_point);
            loss_out = r.loss;
            return r.labels;
        }
        case Method::SS: {
            const auto r =
                variance_loss(costs, VarianceVariant::SumSquares, config_.w_reg, config_.w_point);
            loss_out = r.loss;
            return r.labels;
        }
        case Method::VarM: {
            const auto r =
                variance_loss(costs, VarianceVariant::VarM, config_.w_reg, config_.w_point);
            loss_out = r.loss;
            return r.labels;
        }
        case Method::NoReg: {
            const auto a = assign_noreg(costs);
            loss_out = a.loss;
            return a.labels;
        }
    }
    throw std::logic_error("assign_batch: bad method");
}

double Trainer::train_on_batch(const FeatureBatch& x) {
    ForwardCache cache;
    const FeatureBatch z = forward(x, encoder_, &cache);
    const CostMatrix costs = cost_matrix(z, model_);
    double loss = 0.0;
    const std::vector<int> labels = assign_batch(costs, loss);

    const LossGrads lg = loss_grad(z, labels, model_);
    const EncoderGrads eg = backward(encoder_, cache, lg.dz);
    if (encoder_.kind != EncoderKind::Identity) {
        std::vector<Matrix*> params{&encoder_.w1, &encoder_.b1, &encoder_.w2, &encoder_.b2};
        std::vector<const Matrix*> grads{&eg.dw1, &eg.db1, &eg.dw2, &eg.db2};
        if (encoder_.kind == EncoderKind::Linear) {
            params.resize(2);
            grads.resize(2);
        }
        adam_step(params, grads, opt_encoder_);
    }
    std::vector<Matrix*> cparams{&model_.centroids};
    std::vector<const Matrix*> cgrads{&lg.dcentroids};
    adam_step(cparams, cgrads, opt_centroids_);
    return loss;
}

EpochReport Trainer::evaluate(const LabeledDataset& dataset, int epoch) {
    EpochReport report;
    report.epoch = epoch;
    const FeatureBatch z = forward(FeatureBatch{dataset.features}, encoder_);
    const std::vector<int> pred = infer_batch(z, model_);

    std::vector<long> counts(model_.k(), 0);
    for (int y : pred) ++counts[y];
    report.hard_counts = counts;

    // Soft counts from the softmax of negative eval costs.
    const CostMatrix costs = cost_matrix(z, model_);
    const Matrix soft = softmax_rows(-costs.values);
    report.soft_counts = soft.colwise().sum().transpose();

    const EntropyReport ent = marginal_entropies(soft, std::exp(1.0));
    report.metrics.hard_entropy =
        marginal_entropies(pred, model_.k(), std::exp(1.0)).hard_entropy;
    report.metrics.soft_entropy = ent.soft_entropy;
    report.metrics.kl_star_hard = kl_star(counts, prior_);
    report.metrics.kl_star_soft = kl_star(report.soft_counts, prior_);
    if (dataset.has_labels()) {
        report.metrics.acc = clustering_accuracy(pred, dataset.labels);
        report.metrics.nmi = nmi(pred, dataset.labels);
        report.metrics.ari = ari(pred, dataset.labels);
    }
    if (config_.estimate_covars) estimate_covariances(z, pred);
    return report;
}

void Trainer::estimate_covariances(const FeatureBatch& features, const std::vector<int>& labels) {
    const int k = model_.k(), d = features.dim();
    std::vector<long> counts(k, 0);
    for (int y : labels) ++counts[y];
    for (long c : counts)
        if (c == 0) return;  // skip if any cluster is empty

    std::vector<Matrix> inv(k);
    std::vector<double> half_log_det(k);
    double prev_mean;
    if (model_.isotropic()) {
        prev_mean = 1.0 / model_.sigma();
    } else {
        const auto& cov = std::get<FullCovariance>(model_.covariance);
        double s = 0.0;
        for (const Matrix& m : cov.inv) s += m.mean();
        prev_mean = s / k;
    }

    double new_mean = 0.0;
    for (int j = 0; j < k; ++j) {
        Matrix mean = Matrix::Zero(1, d);
        for (int i = 0; i < features.n(); ++i)
            if (labels[i] == j) mean += features.data.row(i);
        mean /= static_cast<double>(counts[j]);
        Matrix cov = Matrix::Zero(d, d);
        for (int i = 0; i < features.n(); ++i) {
            if (labels[i] != j) continue;
            const Matrix delta = features.data.row(i) - mean;
            cov += delta.transpose() * delta;
        }
        cov /= std::max<long>(counts[j] - 1, 1);
        Eigen::LLT<Matrix> llt(cov);
        if (llt.info() != Eigen::Success) {
            cov += 1e-6 * Matrix::Identity(d, d);
            llt.compute(cov);
        }
        inv[j] = llt.solve(Matrix::Identity(d, d));
        new_mean += inv[j].mean();
    }
    new_mean /= k;

    // Rescale so the mean inverse-covariance magnitude matches the old model.
    const double scale = prev_mean / new_mean;
    FullCovariance fc;
    fc.inv.resize(k);
    fc.half_log_det.resize(k);
    for (int j = 0; j < k; ++j) {
        fc.inv[j] = scale * inv[j];
        // 0.5*log|Sigma| = -0.5*log|Sigma^-1|
        Eigen::LLT<Matrix> llt(fc.inv[j]);
        double log_det_inv = 0.0;
        const Matrix l = llt.matrixL();
        for (int c = 0; c < d; ++c) log_det_inv += 2.0 * std::log(l(c, c));
        fc.half_log_det[j] = -0.5 * log_det_inv;
    }
    model_.covariance = std::move(fc);
}

TrainResult Trainer::train_epochs(const LabeledDataset& dataset) {
    if (dataset.n() == 0) throw std::invalid_argument("train_epochs: empty dataset");
    if (dataset.n() >= model_.k() && config_.batch_size < model_.k())
        std::fprintf(stderr, "warning: batch_size < K\n");

    TrainResult result;
    double best_nmi = -1.0;
    std::vector<int> order(dataset.n());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng_);
        if (config_.warm_start && !warm_started_) {
            // Centroids from the first K encoded points.
            FeatureBatch head;
            head.data.resize(model_.k(), dataset.dim());
            for (int j = 0; j < model_.k(); ++j)
                head.data.row(j) = dataset.features.row(order[j % dataset.n()]);
            model_.centroids = forward(head, encoder_).data;
            warm_started_ = true;
        }
        reset_counts();
        double loss_sum = 0.0;
        int n_batches = 0;
        for (int start = 0; start < dataset.n(); start += config_.batch_size) {
            const int len = std::min(config_.batch_size, dataset.n() - start);
            FeatureBatch batch;
            batch.data.resize(len, dataset.dim());
            for (int i = 0; i < len; ++i)
                batch.data.row(i) = dataset.features.row(order[start + i]);
            loss_sum += train_on_batch(batch);
            ++n_batches;
        }
        EpochReport report = evaluate(dataset, epoch);
        report.mean_loss = loss_sum / n_batches;
        if (dataset.has_labels() && report.metrics.nmi > best_nmi) {
            best_nmi = report.metrics.nmi;
            result.best = report;
        }
        result.epochs.push_back(std::move(report));
    }
    if (best_nmi < 0 && !result.epochs.empty()) result.best = result.epochs.back();
    return result;
}

}  // namespace ca
