#include "ca/encoder.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ca {

namespace {

Matrix init_uniform(int rows, int cols, int fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) w(i, j) = dist(rng);
    return w;
}

const char* kind_name(EncoderKind k) {
    switch (k) {
        case EncoderKind::Identity: return "identity";
        case EncoderKind::Linear: return "linear";
        case EncoderKind::Mlp: return "mlp";
    }
    return "?";
}

EncoderKind kind_from_name(const std::string& s) {
    if (s == "identity") return EncoderKind::Identity;
    if (s == "linear") return EncoderKind::Linear;
    if (s == "mlp") return EncoderKind::Mlp;
    throw std::runtime_error("unknown encoder kind: " + s);
}

void write_matrix(std::ofstream& f, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            f.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

void read_matrix(std::ifstream& f, Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v;
            f.read(reinterpret_cast<char*>(&v), sizeof(double));
            m(i, j) = v;
        }
}

}  // namespace

EncoderParams EncoderParams::identity(int d) {
    EncoderParams p;
    p.kind = EncoderKind::Identity;
    p.din = p.nz = d;
    return p;
}

EncoderParams EncoderParams::linear(int din, int nz, std::mt19937_64& rng) {
    EncoderParams p;
    p.kind = EncoderKind::Linear;
    p.din = din;
    p.nz = nz;
    p.w1 = init_uniform(nz, din, din, rng);
    p.b1 = init_uniform(nz, 1, din, rng);
    return p;
}

EncoderParams EncoderParams::mlp(int din, int hidden, int nz, std::mt19937_64& rng) {
    EncoderParams p;
    p.kind = EncoderKind::Mlp;
    p.din = din;
    p.hidden = hidden;
    p.nz = nz;
    p.w1 = init_uniform(hidden, din, din, rng);
    p.b1 = init_uniform(hidden, 1, din, rng);
    p.w2 = init_uniform(nz, hidden, hidden, rng);
    p.b2 = init_uniform(nz, 1, hidden, rng);
    return p;
}

FeatureBatch forward(const FeatureBatch& x, const EncoderParams& params, ForwardCache* cache) {
    if (x.dim() != params.din) throw std::invalid_argument("forward: input dimension mismatch");
    if (cache) cache->x = x.data;
    switch (params.kind) {
        case EncoderKind::Identity:
            return x;
        case EncoderKind::Linear: {
            Matrix z = x.data * params.w1.transpose();
            z.rowwise() += params.b1.col(0).transpose();
            return FeatureBatch{std::move(z)};
        }
        case EncoderKind::Mlp: {
            Matrix pre = x.data * params.w1.transpose();
            pre.rowwise() += params.b1.col(0).transpose();
            Matrix h = pre.cwiseMax(0.0);
            Matrix z = h * params.w2.transpose();
            z.rowwise() += params.b2.col(0).transpose();
            if (cache) {
                cache->pre = pre;
                cache->h = h;
            }
            return FeatureBatch{std::move(z)};
        }
    }
    throw std::logic_error("forward: bad kind");
}

EncoderGrads backward(const EncoderParams& params, const ForwardCache& cache, const Matrix& dz) {
    EncoderGrads g;
    switch (params.kind) {
        case EncoderKind::Identity:
            g.dx = dz;
            return g;
        case EncoderKind::Linear:
            g.dw1 = dz.transpose() * cache.x;
            g.db1 = dz.colwise().sum().transpose();
            g.dx = dz * params.w1;
            return g;
        case EncoderKind::Mlp: {
            g.dw2 = dz.transpose() * cache.h;
            g.db2 = dz.colwise().sum().transpose();
            Matrix dh = dz * params.w2;
            // ReLU gradient from the cached pre-activation sign; 0 at exactly 0.
            const Matrix mask = (cache.pre.array() > 0.0).cast<double>();
            Matrix dpre = dh.cwiseProduct(mask);
            g.dw1 = dpre.transpose() * cache.x;
            g.db1 = dpre.colwise().sum().transpose();
            g.dx = dpre * params.w1;
            return g;
        }
    }
    throw std::logic_error("backward: bad kind");
}

LossGrads loss_grad(const FeatureBatch& z, const std::vector<int>& labels,
                    const ClusterModel& model) {
    const int n = z.n();
    if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("loss_grad: bad labels");
    const double sigma = model.isotropic() ? model.sigma() : 1.0;
    LossGrads g;
    g.dz.setZero(n, z.dim());
    g.dcentroids.setZero(model.k(), model.dim());
    const double scale = 1.0 / (n * sigma);
    for (int i = 0; i < n; ++i) {
        const Eigen::RowVectorXd delta = z.data.row(i) - model.centroids.row(labels[i]);
        g.dz.row(i) = scale * delta;
        g.dcentroids.row(labels[i]) -= scale * delta;
    }
    return g;
}

void AdamState::init(const std::vector<const Matrix*>& params) {
    m.clear();
    v.clear();
    for (const Matrix* p : params) {
        m.push_back(Matrix::Zero(p->rows(), p->cols()));
        v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
    t = 0;
}

void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
               AdamState& s) {
    if (params.size() != grads.size() || params.size() != s.m.size())
        throw std::invalid_argument("adam_step: parameter/state shape mismatch");
    ++s.t;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
    for (size_t i = 0; i < params.size(); ++i) {
        const Matrix& g = *grads[i];
        s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * g;
        s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g.cwiseProduct(g);
        const Matrix mhat = s.m[i] / bc1;
        const Matrix vhat = s.v[i] / bc2;
        params[i]->array() -= s.lr * mhat.array() / (vhat.array().sqrt() + s.eps);
    }
}

void save_checkpoint(const std::string& path, const EncoderParams& params,
                     const ClusterModel& model) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f << kind_name(params.kind) << ' ' << params.din << ' ' << params.hidden << ' ' << params.nz
      << ' ' << model.k() << ' ' << model.dim() << ' '
      << (model.isotropic() ? model.sigma() : 0.0) << '\n';
    write_matrix(f, params.w1);
    write_matrix(f, params.b1);
    write_matrix(f, params.w2);
    write_matrix(f, params.b2);
    write_matrix(f, model.centroids);
}

void load_checkpoint(const std::string& path, EncoderParams& params, ClusterModel& model) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read checkpoint: " + path);
    std::string header;
    std::getline(f, header);
    std::istringstream hs(header);
    std::string kind;
    int din, hidden, nz, k, d;
    double sigma;
    if (!(hs >> kind >> din >> hidden >> nz >> k >> d >> sigma))
        throw std::runtime_error("malformed checkpoint header");
    params = EncoderParams{};
    params.kind = kind_from_name(kind);
    params.din = din;
    params.hidden = hidden;
    params.nz = nz;
    switch (params.kind) {
        case EncoderKind::Identity:
            break;
        case EncoderKind::Linear:
            params.w1.resize(nz, din);
            params.b1.resize(nz, 1);
            break;
        case EncoderKind::Mlp:
            params.w1.resize(hidden, din);
            params.b1.resize(hidden, 1);
            params.w2.resize(nz, hidden);
            params.b2.resize(nz, 1);
            break;
    }
    read_matrix(f, params.w1);
    read_matrix(f, params.b1);
    read_matrix(f, params.w2);
    read_matrix(f, params.b2);
    model.centroids.resize(k, d);
    read_matrix(f, model.centroids);
    if (sigma > 0) model.covariance = Isotropic{sigma};
    model.prior = Prior::uniform(k);
    if (!f) throw std::runtime_error("truncated checkpoint: " + path);
}

}  // namespace ca
