#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "ca/encoder.hpp"

using namespace ca;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/ca_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("identity and unit-linear encoders pass input through") {
    std::mt19937_64 rng(1);
    const Matrix x = random_matrix(4, 3, rng);
    const FeatureBatch out = forward(FeatureBatch{x}, EncoderParams::identity(3));
    CHECK((out.data.array() == x.array()).all());

    EncoderParams lin = EncoderParams::linear(3, 3, rng);
    lin.w1 = Matrix::Identity(3, 3);
    lin.b1 = Matrix::Zero(3, 1);
    const FeatureBatch out2 = forward(FeatureBatch{x}, lin);
    CHECK((out2.data - x).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("mlp forward matches a per-element loop oracle") {
    std::mt19937_64 rng(2);
    const int n = 5, din = 4, hidden = 6, nz = 3;
    const EncoderParams p = EncoderParams::mlp(din, hidden, nz, rng);
    const Matrix x = random_matrix(n, din, rng);
    const FeatureBatch out = forward(FeatureBatch{x}, p);

    for (int i = 0; i < n; ++i) {
        std::vector<double> h(hidden);
        for (int a = 0; a < hidden; ++a) {
            double s = p.b1(a, 0);
            for (int b = 0; b < din; ++b) s += p.w1(a, b) * x(i, b);
            h[a] = s > 0 ? s : 0.0;
        }
        for (int c = 0; c < nz; ++c) {
            double s = p.b2(c, 0);
            for (int a = 0; a < hidden; ++a) s += p.w2(c, a) * h[a];
            CHECK(out.data(i, c) == doctest::Approx(s).epsilon(1e-12));
        }
    }
}

TEST_CASE("backward with zero upstream gradient is zero") {
    std::mt19937_64 rng(3);
    const EncoderParams p = EncoderParams::mlp(3, 4, 2, rng);
    ForwardCache cache;
    forward(FeatureBatch{random_matrix(5, 3, rng)}, p, &cache);
    const EncoderGrads g = backward(p, cache, Matrix::Zero(5, 2));
    CHECK(g.dw1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.db1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.dw2.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.db2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear single-point weight gradient is the outer product") {
    std::mt19937_64 rng(4);
    EncoderParams p = EncoderParams::linear(3, 2, rng);
    const Matrix x = random_matrix(1, 3, rng);
    ForwardCache cache;
    forward(FeatureBatch{x}, p, &cache);
    const Matrix dz = random_matrix(1, 2, rng);
    const EncoderGrads g = backward(p, cache, dz);
    const Matrix expected = dz.transpose() * x;  // nz x din
    CHECK((g.dw1 - expected).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((g.db1 - dz.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("loss gradients vanish when every point sits on its centroid") {
    ClusterModel m;
    m.centroids = Matrix::Random(3, 2);
    m.covariance = Isotropic{2.0};
    m.prior = Prior::uniform(3);
    Matrix z(3, 2);
    z = m.centroids;
    const LossGrads g = loss_grad(FeatureBatch{z}, {0, 1, 2}, m);
    CHECK(g.dz.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.dcentroids.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("loss gradient closed form for a single point") {
    ClusterModel m;
    m.centroids = Matrix::Zero(1, 2);
    m.centroids.row(0) << 1.0, -2.0;
    m.covariance = Isotropic{1.0};
    m.prior = Prior::uniform(1);
    Matrix z(1, 2);
    z << 4.0, 1.0;
    const LossGrads g = loss_grad(FeatureBatch{z}, {0}, m);
    CHECK(g.dz(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(g.dz(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(g.dcentroids(0, 0) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(g.dcentroids(0, 1) == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("loss gradient matches central finite differences") {
    std::mt19937_64 rng(5);
    const int n = 6, d = 3, k = 2;
    ClusterModel m;
    m.centroids = random_matrix(k, d, rng);
    m.covariance = Isotropic{100.0};
    m.prior = Prior::uniform(k);
    Matrix z = random_matrix(n, d, rng);
    std::vector<int> labels = {0, 1, 0, 1, 1, 0};

    auto loss = [&](const Matrix& zz, const Matrix& cc) {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            total += (zz.row(i) - cc.row(labels[i])).squaredNorm() / (2.0 * 100.0);
        return total / n;
    };
    const LossGrads g = loss_grad(FeatureBatch{z}, labels, m);
    const double h = 1e-5;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            Matrix zp = z, zm = z;
            zp(i, j) += h;
            zm(i, j) -= h;
            const double fd = (loss(zp, m.centroids) - loss(zm, m.centroids)) / (2 * h);
            CHECK(g.dz(i, j) == doctest::Approx(fd).epsilon(1e-5));
        }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) {
            Matrix cp = m.centroids, cm = m.centroids;
            cp(i, j) += h;
            cm(i, j) -= h;
            const double fd = (loss(z, cp) - loss(z, cm)) / (2 * h);
            CHECK(g.dcentroids(i, j) == doctest::Approx(fd).epsilon(1e-5));
        }
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
    Matrix param = Matrix::Ones(2, 2);
    const Matrix before = param;
    const Matrix grad = Matrix::Zero(2, 2);
    AdamState state;
    state.init({&param});
    adam_step({&param}, {&grad}, state);
    CHECK((param.array() == before.array()).all());
}

TEST_CASE("adam first step on a unit gradient moves by about lr") {
    Matrix param = Matrix::Zero(1, 1);
    const Matrix grad = Matrix::Ones(1, 1);
    AdamState state;
    state.lr = 1e-3;
    state.init({&param});
    adam_step({&param}, {&grad}, state);
    // Bias correction makes m_hat/sqrt(v_hat) = 1 up to the eps guard.
    CHECK(param(0, 0) == doctest::Approx(-1e-3).epsilon(1e-4));
}

TEST_CASE("adam drives a convex quadratic to its minimizer") {
    Matrix param = Matrix::Constant(1, 2, 5.0);
    Matrix target(1, 2);
    target << -1.0, 2.0;
    AdamState state;
    state.lr = 0.05;
    state.init({&param});
    for (int step = 0; step < 2000; ++step) {
        const Matrix grad = param - target;
        adam_step({&param}, {&grad}, state);
    }
    CHECK((param - target).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("plain gradient descent on centroids decreases the loss monotonically") {
    std::mt19937_64 rng(6);
    const int n = 20, d = 4, k = 3;
    const Matrix z = random_matrix(n, d, rng, -2.0, 2.0);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i % k;

    ClusterModel m;
    m.centroids = random_matrix(k, d, rng);
    m.covariance = Isotropic{1.0};
    m.prior = Prior::uniform(k);

    auto loss = [&] {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            total += (z.row(i) - m.centroids.row(labels[i])).squaredNorm() / 2.0;
        return total / n;
    };
    double prev = loss();
    for (int step = 0; step < 500; ++step) {
        const LossGrads g = loss_grad(FeatureBatch{z}, labels, m);
        if (g.dcentroids.norm() < 1e-8) break;
        m.centroids -= 1.0 * g.dcentroids;  // safe step: Hessian eigenvalues <= 1/3
        const double cur = loss();
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    const LossGrads g = loss_grad(FeatureBatch{z}, labels, m);
    CHECK(g.dcentroids.norm() <= 1e-6);
}

TEST_CASE("checkpoint round-trip is bit exact") {
    std::mt19937_64 rng(7);
    EncoderParams p = EncoderParams::mlp(4, 5, 3, rng);
    ClusterModel m;
    m.centroids = random_matrix(2, 3, rng);
    m.covariance = Isotropic{100.0};
    m.prior = Prior::uniform(2);

    TempFile f("ckpt.bin");
    save_checkpoint(f.path, p, m);
    EncoderParams p2;
    ClusterModel m2;
    load_checkpoint(f.path, p2, m2);
    CHECK(p2.kind == p.kind);
    CHECK((p2.w1.array() == p.w1.array()).all());
    CHECK((p2.b1.array() == p.b1.array()).all());
    CHECK((p2.w2.array() == p.w2.array()).all());
    CHECK((p2.b2.array() == p.b2.array()).all());
    CHECK((m2.centroids.array() == m.centroids.array()).all());
    CHECK(m2.sigma() == m.sigma());
}

TEST_CASE("identical seeds give bitwise-identical initializations") {
    std::mt19937_64 a(42), b(42);
    const EncoderParams pa = EncoderParams::mlp(8, 6, 4, a);
    const EncoderParams pb = EncoderParams::mlp(8, 6, 4, b);
    CHECK((pa.w1.array() == pb.w1.array()).all());
    CHECK((pa.w2.array() == pb.w2.array()).all());
}
