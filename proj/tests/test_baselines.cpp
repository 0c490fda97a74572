#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ca/baselines.hpp"
#include "ca/metrics.hpp"

using namespace ca;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

CostMatrix make_costs(const Matrix& values) {
    CostMatrix c;
    c.values = values;
    return c;
}

}  // namespace

TEST_CASE("softmax rows sum to one and are shift invariant") {
    std::mt19937_64 rng(9);
    const Matrix scores = random_matrix(6, 4, rng, -3.0, 3.0);
    const Matrix s = softmax_rows(scores);
    for (int i = 0; i < 6; ++i) CHECK(s.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    Matrix shifted = scores;
    shifted.row(2).array() += 123.0;
    const Matrix s2 = softmax_rows(shifted);
    CHECK((s2.row(2) - s.row(2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("softmax survives large magnitudes") {
    Matrix scores(1, 3);
    scores << 1000.0, 999.0, -1000.0;
    const Matrix s = softmax_rows(scores);
    CHECK(s.allFinite());
    CHECK(s.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sinkhorn on equal scores is the uniform matrix") {
    const SoftAssignment s = sinkhorn(Matrix::Constant(5, 4, 0.3), 0.5, 15);
    CHECK((s.probs.array() - 0.25).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("sinkhorn on a dominant diagonal approaches one-hot rows") {
    const int n = 4;
    Matrix scores = Matrix::Constant(n, n, -50.0);
    scores.diagonal().setConstant(50.0);
    const SoftAssignment s = sinkhorn(scores, 0.5, 15);
    for (int i = 0; i < n; ++i) {
        CHECK(s.probs(i, i) >= 0.999);
        CHECK(s.probs.col(i).sum() == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("sinkhorn soft marginals are near uniform on random inputs") {
    std::mt19937_64 rng(13);
    const Prior uniform = Prior::uniform(5);
    for (int trial = 0; trial < 20; ++trial) {
        const SoftAssignment s = sinkhorn(random_matrix(40, 5, rng, -2.0, 2.0), 0.5, 15);
        const Vector col_means = s.probs.colwise().mean().transpose();
        CHECK(kl_star(col_means, uniform) <= 1e-3);
    }
}

TEST_CASE("stabilized and direct sinkhorn agree on benign inputs") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix scores = random_matrix(12, 4, rng, -1.0, 1.0);
        const SoftAssignment a = sinkhorn(scores, 0.5, 15);
        const SoftAssignment b = sinkhorn_direct(scores, 0.5, 15);
        CHECK((a.probs - b.probs).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("sinkhorn column sums approach N/K monotonically in total variation") {
    std::mt19937_64 rng(33);
    const int n = 30, k = 4;
    const Matrix scores = random_matrix(n, k, rng, -2.0, 2.0);
    double prev_tv = 1e18;
    for (int iters = 1; iters <= 12; ++iters) {
        const SoftAssignment s = sinkhorn(scores, 0.5, iters);
        double tv = 0.0;
        for (int j = 0; j < k; ++j)
            tv += std::abs(s.probs.col(j).sum() - static_cast<double>(n) / k);
        CHECK(tv <= prev_tv + 1e-9);
        prev_tv = tv;
    }
}

TEST_CASE("assign_sinkhorn labels are the row argmax of the soft matrix") {
    std::mt19937_64 rng(41);
    const CostMatrix costs = make_costs(random_matrix(25, 4, rng, 0.0, 3.0));
    const SinkhornResult r = assign_sinkhorn(costs);
    for (int i = 0; i < 25; ++i) {
        int argmax = 0;
        r.soft.probs.row(i).maxCoeff(&argmax);
        CHECK(r.assignment.labels[i] == argmax);
    }
}

TEST_CASE("sinkhorn keeps hard collapse despite uniform soft marginals") {
    // Identical rows: a soft method can be marginally uniform while every
    // hard label is the same.
    Matrix v(6, 3);
    for (int i = 0; i < 6; ++i) v.row(i) << 0.0, 0.01, 0.02;
    const SinkhornResult r = assign_sinkhorn(make_costs(v));
    for (int label : r.assignment.labels) CHECK(label == r.assignment.labels[0]);
    const EntropyReport e = marginal_entropies(r.soft.probs, 2.0);
    CHECK(e.hard_entropy == 0.0);
    CHECK(e.soft_entropy >= 0.95 * std::log2(3.0));
}

TEST_CASE("entropy regularizer hits -w_ent*logK on uniform rows") {
    const RegLossResult r = entropy_reg_loss(make_costs(Matrix::Constant(8, 4, 1.0)),
                                             100.0, 0.0);
    CHECK(r.loss == doctest::Approx(-100.0 * std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("entropy regularizer matches a direct Shannon entropy oracle") {
    std::mt19937_64 rng(50);
    const Matrix v = random_matrix(10, 3, rng, 0.0, 2.0);
    const double w_ent = 100.0, w_point = 0.1;
    const RegLossResult r = entropy_reg_loss(make_costs(v), w_ent, w_point);

    const Matrix soft = softmax_rows(-v);
    const Vector m = soft.colwise().mean().transpose();
    double h_marginal = 0.0;
    for (int j = 0; j < 3; ++j)
        if (m[j] > 0) h_marginal -= m[j] * std::log(m[j]);
    double h_rows = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 3; ++j)
            if (soft(i, j) > 0) h_rows -= soft(i, j) * std::log(soft(i, j));
    h_rows /= 10.0;
    CHECK(r.loss == doctest::Approx(-w_ent * h_marginal + w_point * h_rows).epsilon(1e-10));
    for (int i = 0; i < 10; ++i) {
        int argmin = 0;
        v.row(i).minCoeff(&argmin);
        CHECK(r.labels[i] == argmin);
    }
}

TEST_CASE("variance regularizers on uniform and collapsed soft matrices") {
    const int k = 4;
    // Equal costs -> uniform soft matrix, constant column means.
    const CostMatrix uniform = make_costs(Matrix::Constant(6, k, 2.0));
    CHECK(variance_loss(uniform, VarianceVariant::SumSquares, 1.0, 0.0).loss ==
          doctest::Approx(1.0 / (k * k)).epsilon(1e-12));
    CHECK(variance_loss(uniform, VarianceVariant::VarM, 1.0, 0.0).loss ==
          doctest::Approx(0.0).epsilon(1e-12));

    // Rows sharply collapsed onto column 0.
    Matrix v = Matrix::Constant(6, k, 100.0);
    v.col(0).setConstant(0.0);
    const CostMatrix collapsed = make_costs(v);
    CHECK(variance_loss(collapsed, VarianceVariant::SumSquares, 1.0, 0.0).loss ==
          doctest::Approx(1.0 / k).epsilon(1e-10));
    CHECK(variance_loss(collapsed, VarianceVariant::VarM, 1.0, 0.0).loss ==
          doctest::Approx(static_cast<double>(k - 1) / (k * k)).epsilon(1e-10));
}

TEST_CASE("variance regularizers match a direct column-statistics oracle") {
    std::mt19937_64 rng(61);
    const Matrix v = random_matrix(9, 5, rng, 0.0, 3.0);
    const CostMatrix costs = make_costs(v);
    const Matrix soft = softmax_rows(-v);
    const Vector m = soft.colwise().mean().transpose();
    const double ss = m.array().square().mean();
    const double varm = (m.array() - m.mean()).square().mean();

    double point = 0.0;
    for (int i = 0; i < 9; ++i) point += v.row(i).minCoeff();
    point /= 9.0;

    CHECK(variance_loss(costs, VarianceVariant::SumSquares, 10.0, 0.1).loss ==
          doctest::Approx(10.0 * ss + 0.1 * point).epsilon(1e-10));
    CHECK(variance_loss(costs, VarianceVariant::VarM, 10.0, 0.1).loss ==
          doctest::Approx(10.0 * varm + 0.1 * point).epsilon(1e-10));
    // E[m^2] = Var(m) + (E[m])^2 with E[m] = 1/K exactly.
    CHECK(ss == doctest::Approx(varm + 1.0 / 25.0).epsilon(1e-12));
}

TEST_CASE("assign_noreg is the plain row argmin") {
    std::mt19937_64 rng(71);
    const Matrix v = random_matrix(12, 4, rng, 0.0, 5.0);
    const BatchAssignment a = assign_noreg(make_costs(v));
    double min_sum = 0.0;
    for (int i = 0; i < 12; ++i) {
        int argmin = 0;
        v.row(i).minCoeff(&argmin);
        CHECK(a.labels[i] == argmin);
        min_sum += v.row(i).minCoeff();
    }
    CHECK(a.loss == doctest::Approx(min_sum / 12.0).epsilon(1e-12));
}

TEST_CASE("noreg collapse gives hard KL* of log K against a uniform prior") {
    Matrix v = Matrix::Constant(20, 10, 5.0);
    v.col(0).setConstant(0.0);
    const BatchAssignment a = assign_noreg(make_costs(v));
    CHECK(a.counts[0] == 20);
    CHECK(kl_star(a.counts, Prior::uniform(10)) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-6));
}
