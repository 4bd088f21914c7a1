#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "seislabel/labelmap.hpp"

using namespace seislabel;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v(i++) = x;
    return v;
}

Eigen::MatrixXd random_nonneg(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed, double zero_fraction = 0.0) {
    auto rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = coin(rng) < zero_fraction ? 0.0 : uni(rng);
    // keep every row and column strictly active so update denominators stay
    // positive when epsilon = 0
    for (Eigen::Index i = 0; i < rows; ++i)
        if (m.row(i).maxCoeff() == 0.0) m(i, i % cols) = 0.5;
    for (Eigen::Index j = 0; j < cols; ++j)
        if (m.col(j).maxCoeff() == 0.0) m(j % rows, j) = 0.5;
    return m;
}

// Plain gradient-descent forms of the factor updates, written independently of
// the multiplicative implementation: take a step against the (proportionally
// scaled) gradient with the per-entry step size that cancels the current
// iterate, grouping the matrix products differently on purpose.
Eigen::MatrixXd additive_update_W(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                                  const Eigen::MatrixXd& X, double lambda1) {
    Eigen::MatrixXd numer = (X * H.transpose()).eval();
    Eigen::MatrixXd denom = ((W * H) * H.transpose()).eval() + lambda1 * W;
    Eigen::MatrixXd out(W.rows(), W.cols());
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        for (Eigen::Index i = 0; i < W.rows(); ++i) {
            double eta = W(i, j) / denom(i, j);
            out(i, j) = W(i, j) + eta * (numer(i, j) - denom(i, j));
        }
    return out;
}

Eigen::MatrixXd additive_update_H(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                                  const Eigen::MatrixXd& X, double gamma,
                                  double lambda2) {
    Eigen::MatrixXd numer = W.transpose() * X + gamma * H;
    Eigen::MatrixXd denom =
        W.transpose() * (W * H) + lambda2 * H + gamma * (H * (H.transpose() * H));
    Eigen::MatrixXd out(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            double eta = H(i, j) / denom(i, j);
            out(i, j) = H(i, j) + eta * (numer(i, j) - denom(i, j));
        }
    return out;
}

double rel_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double scale = std::max({std::abs(a(i, j)), std::abs(b(i, j)), 1e-30});
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
        }
    return worst;
}

// Frobenius-style objective parts summed scalar by scalar.
double naive_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                       const Eigen::MatrixXd& H, double gamma, double lambda1,
                       double lambda2, ObjectivePart which) {
    double fit = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double pred = 0.0;
            for (Eigen::Index f = 0; f < W.cols(); ++f) pred += W(i, f) * H(f, j);
            double d = X(i, j) - pred;
            fit += d * d;
        }
    double ortho = 0.0;
    for (Eigen::Index a = 0; a < H.rows(); ++a)
        for (Eigen::Index b = 0; b < H.rows(); ++b) {
            double dot = 0.0;
            for (Eigen::Index j = 0; j < H.cols(); ++j) dot += H(a, j) * H(b, j);
            double d = dot - (a == b ? 1.0 : 0.0);
            ortho += d * d;
        }
    double wreg = 0.0;
    for (Eigen::Index f = 0; f < W.cols(); ++f)
        for (Eigen::Index i = 0; i < W.rows(); ++i) wreg += W(i, f) * W(i, f);
    double hreg = 0.0;
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index f = 0; f < H.rows(); ++f) hreg += H(f, j) * H(f, j);
    switch (which) {
        case ObjectivePart::Overall:
            return fit + gamma * ortho + lambda1 * wreg + lambda2 * hreg;
        case ObjectivePart::WPart: return fit + lambda1 * wreg;
        case ObjectivePart::HPart: return fit + gamma * ortho + lambda2 * hreg;
    }
    return 0.0;
}

DataMatrix small_data(int n_classes, int per_class, int side, std::uint64_t seed) {
    auto [corpus, truth] = generate_synthetic_corpus(n_classes, per_class, side, seed);
    return assemble_data_matrix(corpus);
}

}  // namespace

TEST_CASE("data matrix columns are row-major vectorized patches") {
    PatchCorpus corpus;
    corpus.width = corpus.height = 2;
    corpus.n_classes = 1;
    corpus.class_names = {"only"};
    PatchImage img(2, 2);
    img << 0.1f, 0.2f, 0.3f, 0.4f;
    corpus.patches = {img};
    corpus.class_labels = {1};
    DataMatrix data = assemble_data_matrix(corpus);
    REQUIRE(data.X.rows() == 4);
    REQUIRE(data.X.cols() == 1);
    CHECK(data.X(0, 0) == doctest::Approx(0.1));
    CHECK(data.X(1, 0) == doctest::Approx(0.2));
    CHECK(data.X(2, 0) == doctest::Approx(0.3));
    CHECK(data.X(3, 0) == doctest::Approx(0.4));
    CHECK(data.column_labels == std::vector<int>{1});

    // reassembling the column reproduces the patch bit-exactly
    PatchImage back(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            back(r, c) = static_cast<float>(data.X(r * 2 + c, 0));
    CHECK(back == img);

    PatchCorpus unlabeled = corpus;
    unlabeled.n_classes = 0;
    unlabeled.class_labels.clear();
    unlabeled.class_names.clear();
    CHECK_THROWS_AS(assemble_data_matrix(unlabeled), DataError);
}

TEST_CASE("data matrix shape scales with corpus and patch size") {
    DataMatrix data = small_data(4, 3, 32, 2);
    CHECK(data.X.rows() == 32 * 32);
    CHECK(data.X.cols() == 12);
    CHECK(data.X.minCoeff() >= 0.0);
    CHECK(data.X.maxCoeff() <= 1.0);
    CHECK(data.n_classes == 4);
}

TEST_CASE("sparseness measure on reference vectors") {
    CHECK(sparsity(vec({0, 0, 5, 0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sparsity(vec({2, 2, 2, 2, 2})) == doctest::Approx(0.0).epsilon(1e-12));
    double expect = (std::sqrt(2.0) - 7.0 / 5.0) / (std::sqrt(2.0) - 1.0);
    CHECK(sparsity(vec({3, 4})) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(0.0343).epsilon(2e-2));
    CHECK_THROWS_AS(sparsity(vec({0, 0, 0})), NumericError);
    CHECK_THROWS_AS(sparsity(vec({1})), NumericError);
    CHECK_THROWS_AS(sparsity(vec({1, -1})), DataError);
}

TEST_CASE("sparsity projection hits the target and keeps the norm") {
    auto rng = make_rng(3, 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd w(16);
        for (int i = 0; i < 16; ++i) w(i) = uni(rng);
        for (double rho : {0.2, 0.4, 0.7, 0.9}) {
            Eigen::VectorXd v = hoyer_project(w, rho);
            CHECK(v.minCoeff() >= 0.0);
            CHECK(std::abs(sparsity(v) - rho) <= 1e-6);
            CHECK(std::abs(v.norm() - w.norm()) <= 1e-9 * w.norm());
        }
    }
}

TEST_CASE("projection of an already-conforming vector is a fixed point") {
    Eigen::VectorXd w = vec({0.9, 0.4, 0.1, 0.7, 0.05, 0.3, 0.2, 0.8});
    Eigen::VectorXd v = hoyer_project(w, 0.4);
    Eigen::VectorXd vv = hoyer_project(v, 0.4);
    CHECK((vv - v).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("projection rejects degenerate inputs") {
    CHECK_THROWS_AS(hoyer_project(vec({5}), 0.4), NumericError);
    CHECK_THROWS_AS(hoyer_project(vec({0, 0}), 0.4), NumericError);
    CHECK_THROWS_AS(hoyer_project(vec({1, 2}), 0.0), ConfigError);
    CHECK_THROWS_AS(hoyer_project(vec({1, 2}), 1.0), ConfigError);
}

TEST_CASE("feature initialization: shapes, sparsity, determinism") {
    DataMatrix data = small_data(4, 8, 16, 5);  // X is 256 x 32
    InitFeaturesResult init =
        init_features(data.X, data.column_labels, 4, 5, 0.4, 77);
    REQUIRE(init.W0.cols() == 20);
    REQUIRE(init.W0.rows() == 256);
    REQUIRE(init.Q.rows() == 20);
    REQUIRE(init.Q.cols() == 4);
    for (Eigen::Index f = 0; f < 20; ++f) {
        CHECK(init.Q.row(f).sum() == 1.0);
        CHECK(init.Q(f, init.feature_class[f] - 1) == 1.0);
        CHECK(std::abs(sparsity(init.W0.col(f)) - 0.4) <= 1e-6);
        CHECK(init.W0.col(f).minCoeff() >= 0.0);
    }
    // five consecutive features per class, classes ascending
    for (Eigen::Index f = 0; f < 20; ++f) CHECK(init.feature_class[f] == f / 5 + 1);

    InitFeaturesResult again =
        init_features(data.X, data.column_labels, 4, 5, 0.4, 77);
    CHECK(init.W0 == again.W0);
    InitFeaturesResult other =
        init_features(data.X, data.column_labels, 4, 5, 0.4, 78);
    CHECK(init.W0 != other.W0);
}

TEST_CASE("feature count formula at a production-scale configuration") {
    // 4 classes x 151 columns, k = 150 -> 600 features; needs N_p > 600
    Eigen::Index np = 601, per = 151;
    Eigen::MatrixXd X = random_nonneg(np, 4 * per, 88);
    std::vector<int> labels;
    for (int cls = 1; cls <= 4; ++cls)
        labels.insert(labels.end(), per, cls);
    InitFeaturesResult init = init_features(X, labels, 4, 150, 0.4, 1);
    CHECK(init.W0.cols() == 600);
    CHECK(init.Q.rows() == 600);
    CHECK(init.Q.cols() == 4);
    for (Eigen::Index f = 0; f < 600; ++f) CHECK(init.Q.row(f).sum() == 1.0);
}

TEST_CASE("feature initialization rejects undersized classes") {
    DataMatrix data = small_data(2, 3, 16, 6);
    CHECK_THROWS_AS(init_features(data.X, data.column_labels, 2, 4, 0.4, 0),
                    DataError);
    // k * n_classes must stay below min(N_p, N_s): 2*4 >= 6 columns
    CHECK_THROWS_AS(init_features(data.X, data.column_labels, 2, 3, 0.4, 0),
                    DataError);
}

TEST_CASE("multiplicative W update: fixed point at an exact factorization") {
    Eigen::MatrixXd W = random_nonneg(12, 4, 10);
    Eigen::MatrixXd H = random_nonneg(4, 9, 11);
    Eigen::MatrixXd X = W * H;
    Eigen::MatrixXd W2 = update_W(W, H, X, 0.0, 0.0);
    CHECK(rel_gap(W2, W) <= 1e-12);
}

TEST_CASE("multiplicative updates preserve zeros and non-negativity") {
    Eigen::MatrixXd W = random_nonneg(15, 5, 12, 0.3);
    Eigen::MatrixXd H = random_nonneg(5, 10, 13);
    Eigen::MatrixXd X = random_nonneg(15, 10, 14);
    Eigen::MatrixXd Wc = W, Hc = H;
    for (int it = 0; it < 25; ++it) {
        Wc = update_W(Wc, Hc, X, 0.1, 1e-12);
        Hc = update_H(Wc, Hc, X, 5.0, 0.5, 1e-12);
        CHECK(Wc.minCoeff() >= 0.0);
        CHECK(Hc.minCoeff() >= 0.0);
    }
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            if (W(i, j) == 0.0) CHECK(Wc(i, j) == 0.0);
}

TEST_CASE("all-zero H stays zero under the H update") {
    Eigen::MatrixXd W = random_nonneg(8, 3, 15);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3, 6);
    Eigen::MatrixXd X = random_nonneg(8, 6, 16);
    Eigen::MatrixXd H2 = update_H(W, H, X, 5.0, 0.5, 1e-12);
    CHECK(H2.maxCoeff() == 0.0);
    CHECK(H2.minCoeff() == 0.0);
}

TEST_CASE("multiplicative updates equal their gradient-descent forms") {
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd W = random_nonneg(30, 8, 100 + trial, 0.25);
        Eigen::MatrixXd H = random_nonneg(8, 20, 200 + trial);
        Eigen::MatrixXd X = random_nonneg(30, 20, 300 + trial);
        const double l1 = 0.1, l2 = 0.5, g = 5.0;

        Eigen::MatrixXd w_mur = update_W(W, H, X, l1, 0.0);
        Eigen::MatrixXd w_add = additive_update_W(W, H, X, l1);
        CHECK(rel_gap(w_mur, w_add) <= 1e-10);

        Eigen::MatrixXd h_mur = update_H(w_mur, H, X, g, l2, 0.0);
        Eigen::MatrixXd h_add = additive_update_H(w_mur, H, X, g, l2);
        CHECK(rel_gap(h_mur, h_add) <= 1e-10);
    }
}

TEST_CASE("update shape mismatches are rejected") {
    Eigen::MatrixXd W = random_nonneg(6, 3, 1);
    Eigen::MatrixXd H = random_nonneg(4, 5, 2);
    Eigen::MatrixXd X = random_nonneg(6, 5, 3);
    CHECK_THROWS_AS(update_W(W, H, X, 0.1, 1e-12), DataError);
    CHECK_THROWS_AS(update_H(W, H, X, 5.0, 0.5, 1e-12), DataError);
    CHECK_THROWS_AS(
        objective(X, W, H, 5.0, 0.1, 0.5, ObjectivePart::Overall), DataError);
}

TEST_CASE("objective parts against a scalar-summation oracle") {
    Eigen::MatrixXd W = random_nonneg(9, 4, 20);
    Eigen::MatrixXd H = random_nonneg(4, 7, 21);
    Eigen::MatrixXd X = random_nonneg(9, 7, 22);
    for (auto part : {ObjectivePart::Overall, ObjectivePart::WPart, ObjectivePart::HPart}) {
        double got = objective(X, W, H, 5.0, 0.1, 0.5, part);
        double want = naive_objective(X, W, H, 5.0, 0.1, 0.5, part);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }

    // exact factorization with all weights zero -> 0
    Eigen::MatrixXd X2 = W * H;
    CHECK(objective(X2, W, H, 0.0, 0.0, 0.0, ObjectivePart::Overall) <= 1e-20);

    // orthonormal H rows kill the gamma term
    Eigen::MatrixXd Hortho = Eigen::MatrixXd::Identity(4, 7);
    double with_gamma = objective(X, W, Hortho, 5.0, 0.0, 0.0, ObjectivePart::HPart);
    double fit_only = objective(X, W, Hortho, 0.0, 0.0, 0.0, ObjectivePart::HPart);
    CHECK(with_gamma == doctest::Approx(fit_only).epsilon(1e-12));
}

TEST_CASE("the W objective is non-increasing under the W update") {
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd W = random_nonneg(14, 5, 400 + trial, 0.2);
        Eigen::MatrixXd H = random_nonneg(5, 11, 500 + trial);
        Eigen::MatrixXd X = random_nonneg(14, 11, 600 + trial);
        double before = objective(X, W, H, 0.0, 0.1, 0.0, ObjectivePart::WPart);
        Eigen::MatrixXd W2 = update_W(W, H, X, 0.1, 1e-12);
        double after = objective(X, W2, H, 0.0, 0.1, 0.0, ObjectivePart::WPart);
        CHECK(after <= before + 1e-9 * std::max(1.0, before));
    }
}

TEST_CASE("factorize: trace bookkeeping, decrease, and zero-pattern") {
    DataMatrix data = small_data(3, 8, 16, 30);  // X is 256 x 24
    NmfConfig cfg;
    cfg.k = 2;
    cfg.iterations = 40;
    cfg.seed = 9;
    FactorizeResult res = factorize(data, cfg);

    CHECK(res.trace.overall.size() == 41);
    CHECK(res.trace.w_part.size() == 41);
    CHECK(res.trace.h_part.size() == 41);
    CHECK(res.trace.overall.back() < res.trace.overall.front());
    CHECK(res.factors.W.minCoeff() >= 0.0);
    CHECK(res.factors.H.minCoeff() >= 0.0);
    CHECK(res.factors.W.rows() == 256);
    CHECK(res.factors.W.cols() == 6);
    CHECK(res.factors.H.rows() == 6);
    CHECK(res.factors.H.cols() == 24);
    CHECK(res.Q.rows() == 6);
    CHECK(res.Q.cols() == 3);

    // the zero pattern of the initial features survives all iterations
    InitFeaturesResult init = init_features(data.X, data.column_labels, 3, cfg.k,
                                            cfg.rho_w, derive_seed(cfg.seed, 11));
    REQUIRE(init.W0.rows() == res.factors.W.rows());
    REQUIRE(init.W0.cols() == res.factors.W.cols());
    int zeros = 0;
    for (Eigen::Index j = 0; j < init.W0.cols(); ++j)
        for (Eigen::Index i = 0; i < init.W0.rows(); ++i)
            if (init.W0(i, j) == 0.0) {
                ++zeros;
                CHECK(res.factors.W(i, j) == 0.0);
            }
    CHECK(zeros > 0);  // the sparsity projection must have zeroed something

    // determinism
    FactorizeResult res2 = factorize(data, cfg);
    CHECK(res.factors.W == res2.factors.W);
    CHECK(res.factors.H == res2.factors.H);
}

TEST_CASE("stationarity residual vanishes at a converged point") {
    // run the updates to numerical convergence on a tiny instance with
    // strictly positive factors (no pinned zeros)
    Eigen::MatrixXd W = random_nonneg(20, 4, 71);
    Eigen::MatrixXd H = random_nonneg(4, 10, 72);
    Eigen::MatrixXd X = random_nonneg(20, 10, 73);
    NmfConfig cfg;
    cfg.lambda1 = 0.1;
    cfg.lambda2 = 0.5;
    cfg.gamma = 5.0;
    auto [rw0, rh0] = kkt_residual(X, W, H, cfg);
    CHECK(rw0 > 1e-3);  // random pair is far from stationary
    CHECK(rh0 > 1e-3);
    for (int it = 0; it < 20000; ++it) {
        W = update_W(W, H, X, cfg.lambda1, 0.0);
        H = update_H(W, H, X, cfg.gamma, cfg.lambda2, 0.0);
    }
    auto [rw, rh] = kkt_residual(X, W, H, cfg);
    CHECK(rw <= 1e-6);
    CHECK(rh <= 1e-6);
}

TEST_CASE("pinned zeros report their gradient pressure in the residual") {
    // Entries frozen at zero by the multiplicative update may keep a negative
    // gradient: the update converges there anyway (the zero pattern is a hard
    // constraint), and the residual's feasibility part surfaces that pressure
    // instead of hiding it.
    Eigen::MatrixXd W = random_nonneg(20, 4, 71, 0.2);
    Eigen::MatrixXd H = random_nonneg(4, 10, 72);
    Eigen::MatrixXd X = random_nonneg(20, 10, 73);
    NmfConfig cfg;
    for (int it = 0; it < 20000; ++it) {
        W = update_W(W, H, X, cfg.lambda1, 0.0);
        H = update_H(W, H, X, cfg.gamma, cfg.lambda2, 0.0);
    }
    Eigen::MatrixXd W2 = update_W(W, H, X, cfg.lambda1, 0.0);
    CHECK((W2 - W).cwiseAbs().maxCoeff() <= 1e-10);  // numerically fixed
    auto [rw, rh] = kkt_residual(X, W, H, cfg);
    CHECK(rh <= 1e-6);
    CHECK(rw > 1e-3);  // the pinned zeros still want to grow
}

TEST_CASE("label extraction on a hand-evaluated instance") {
    Eigen::MatrixXd W(3, 2);
    W << 0.9, 0.0, 0.5, 0.4, 0.0, 1.2;
    Eigen::MatrixXd H(2, 1);
    H << 0.6, 0.5;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    LabelField field = extract_labels(W, H, Q, 0.35);
    // class likelihoods: class1 = [0.54, 0.30, 0], class2 = [0, 0.20, 0.60]
    CHECK(field.Y(0, 0) == 1);
    CHECK(field.Y(1, 0) == 0);  // winner 0.30 under tau
    CHECK(field.Y(2, 0) == 2);
    CHECK(field.C(0, 0) == doctest::Approx(0.54).epsilon(1e-12));
    CHECK(field.C(1, 0) == doctest::Approx(0.30).epsilon(1e-12));
    CHECK(field.C(2, 0) == doctest::Approx(0.60).epsilon(1e-12));
    CHECK(field.n_classes == 2);
}

TEST_CASE("label extraction corner cases") {
    Eigen::MatrixXd W(2, 2);
    W << 0.5, 0.0, 0.5, 0.5;
    Eigen::MatrixXd H(2, 2);
    H << 1.0, 0.8, 0.0, 0.0;  // only class-1 features active
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    LabelField field = extract_labels(W, H, Q, 0.1);
    for (Eigen::Index n = 0; n < 2; ++n)
        for (Eigen::Index i = 0; i < 2; ++i) CHECK(field.Y(i, n) == 1);

    // a threshold above every likelihood blanks the whole field
    LabelField blank = extract_labels(W, H, Q, 10.0);
    for (Eigen::Index n = 0; n < 2; ++n)
        for (Eigen::Index i = 0; i < 2; ++i) CHECK(blank.Y(i, n) == 0);

    // argmax ties go to the lower class index
    Eigen::MatrixXd Wt(1, 2);
    Wt << 0.7, 0.7;
    Eigen::MatrixXd Ht(2, 1);
    Ht << 1.0, 1.0;
    LabelField tie = extract_labels(Wt, Ht, Q, 0.0);
    CHECK(tie.Y(0, 0) == 1);

    // malformed memberships are rejected
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(extract_labels(W, H, bad, 0.1), DataError);
    Eigen::MatrixXd frac = Eigen::MatrixXd::Constant(2, 2, 0.5);
    CHECK_THROWS_AS(extract_labels(W, H, frac, 0.1), DataError);
}

TEST_CASE("rescaling an image's coefficients never flips confident labels") {
    Eigen::MatrixXd W = random_nonneg(25, 6, 80, 0.3);
    Eigen::MatrixXd H = random_nonneg(6, 8, 81);
    std::vector<int> fc = {1, 1, 2, 2, 3, 3};
    Eigen::MatrixXd Q = membership_matrix(fc, 3);
    const double tau = 0.2;
    LabelField base = extract_labels(W, H, Q, tau);
    Eigen::MatrixXd H2 = H;
    H2.col(3) *= 2.5;
    LabelField scaled = extract_labels(W, H2, Q, tau);
    for (Eigen::Index i = 0; i < base.Y.rows(); ++i)
        if (base.Y(i, 3) != 0) CHECK(scaled.Y(i, 3) == base.Y(i, 3));
}

TEST_CASE("median filter of label images") {
    using LabelCol = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;
    // constant field is unchanged
    LabelCol flat = LabelCol::Constant(25, 3);
    CHECK(median_filter_label_image(flat, 5, 5) == flat);

    // an isolated speck disappears
    LabelCol speck = LabelCol::Constant(25, 1);
    speck(12) = 2;  // center of the 5x5 grid
    LabelCol cleaned = median_filter_label_image(speck, 5, 5);
    CHECK(cleaned(12) == 1);
    CHECK(cleaned == LabelCol::Constant(25, 1));

    // random fields match a naive sorted-window oracle, replicate padding
    auto rng = make_rng(55, 0);
    std::uniform_int_distribution<int> lab(0, 4);
    const int w = 9, h = 7;
    LabelCol noisy(w * h);
    for (int i = 0; i < w * h; ++i) noisy(i) = static_cast<std::uint8_t>(lab(rng));
    LabelCol got = median_filter_label_image(noisy, w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            std::vector<std::uint8_t> window;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    int rr = std::clamp(r + dr, 0, h - 1);
                    int cc = std::clamp(c + dc, 0, w - 1);
                    window.push_back(noisy(rr * w + cc));
                }
            std::sort(window.begin(), window.end());
            CHECK(got(r * w + c) == window[4]);
        }

    // whole-field filtering applies per column
    LabelField field;
    field.n_classes = 4;
    field.Y.resize(w * h, 2);
    field.Y.col(0) = noisy;
    field.Y.col(1) = LabelCol::Constant(w * h, 2);
    field.C = Eigen::MatrixXd::Ones(w * h, 2);
    median_filter_labels(field, w, h);
    CHECK(field.Y.col(0) == got);
    CHECK(field.Y.col(1) == LabelCol::Constant(w * h, 2));
}

TEST_CASE("nmf config validation") {
    NmfConfig good;
    CHECK_NOTHROW(good.validate());
    NmfConfig bad = good;
    bad.rho_w = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = good;
    bad.lambda1 = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = good;
    bad.iterations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = good;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = good;
    bad.k = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
