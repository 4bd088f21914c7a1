#include "seislabel/labelmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seislabel/kmeans.hpp"

namespace seislabel {

void NmfConfig::validate() const {
    if (lambda1 < 0 || lambda2 < 0 || gamma < 0)
        throw ConfigError("nmf config: regularization weights must be >= 0");
    if (!(rho_w > 0.0 && rho_w < 1.0))
        throw ConfigError("nmf config: rho_w must be in (0,1)");
    if (tau < 0) throw ConfigError("nmf config: tau must be >= 0");
    if (k < 1) throw ConfigError("nmf config: k must be >= 1");
    if (iterations < 1) throw ConfigError("nmf config: iterations must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("nmf config: epsilon must be > 0");
}

DataMatrix assemble_data_matrix(const PatchCorpus& corpus) {
    corpus.validate();
    if (!corpus.labeled())
        throw DataError("assemble_data_matrix: corpus has no class labels");
    DataMatrix data;
    data.width = corpus.width;
    data.height = corpus.height;
    data.n_classes = corpus.n_classes;
    Eigen::Index np = static_cast<Eigen::Index>(corpus.width) * corpus.height;
    data.X.resize(np, corpus.size());
    for (int n = 0; n < corpus.size(); ++n) {
        const PatchImage& img = corpus.patches[n];
        for (int r = 0; r < corpus.height; ++r)
            for (int c = 0; c < corpus.width; ++c)
                data.X(static_cast<Eigen::Index>(r) * corpus.width + c, n) = img(r, c);
        data.column_labels.push_back(corpus.class_labels[n]);
    }
    return data;
}

double sparsity(const Eigen::VectorXd& w) {
    Eigen::Index n = w.size();
    if (n < 2) throw NumericError("sparsity: vector length must be >= 2");
    for (Eigen::Index i = 0; i < n; ++i)
        if (w[i] < 0.0) throw DataError("sparsity: negative entry");
    double l1 = w.lpNorm<1>();
    double l2 = w.norm();
    if (l2 == 0.0) throw NumericError("sparsity: zero vector");
    double rn = std::sqrt(static_cast<double>(n));
    return (rn - l1 / l2) / (rn - 1.0);
}

Eigen::VectorXd hoyer_project(const Eigen::VectorXd& w, double rho) {
    Eigen::Index n = w.size();
    if (n < 2)
        throw NumericError("hoyer_project: length-1 vectors have no adjustable sparsity");
    if (!(rho > 0.0 && rho < 1.0))
        throw ConfigError("hoyer_project: target sparsity must be in (0,1)");
    double l2 = w.norm();
    if (l2 == 0.0) throw NumericError("hoyer_project: zero vector");

    double rn = std::sqrt(static_cast<double>(n));
    double l1_target = l2 * (rn - rho * (rn - 1.0));

    Eigen::VectorXd v = w;
    std::vector<char> zeroed(n, 0);
    Eigen::Index active = n;
    v.array() += (l1_target - v.sum()) / n;

    for (Eigen::Index round = 0; round <= n; ++round) {
        double mean = l1_target / active;
        double a = 0.0, b = 0.0, c = -l2 * l2;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (zeroed[i]) continue;
            double d = v[i] - mean;
            a += d * d;
            b += 2.0 * mean * d;
            c += mean * mean;
        }
        if (a > 0.0) {
            double disc = std::max(b * b - 4.0 * a * c, 0.0);
            double alpha = (-b + std::sqrt(disc)) / (2.0 * a);
            for (Eigen::Index i = 0; i < n; ++i)
                if (!zeroed[i]) v[i] = mean + alpha * (v[i] - mean);
        } else {
            for (Eigen::Index i = 0; i < n; ++i)
                if (!zeroed[i]) v[i] = mean;
        }

        bool any_negative = false;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!zeroed[i] && v[i] < 0.0) any_negative = true;
        if (!any_negative) break;

        double kept_sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (zeroed[i]) continue;
            if (v[i] < 0.0) {
                v[i] = 0.0;
                zeroed[i] = 1;
                --active;
            } else {
                kept_sum += v[i];
            }
        }
        if (active == 0)
            throw NumericError("hoyer_project: projection emptied the support");
        double shift = (l1_target - kept_sum) / active;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!zeroed[i]) v[i] += shift;
    }

    for (Eigen::Index i = 0; i < n; ++i) v[i] = std::max(v[i], 0.0);
    double norm = v.norm();
    if (norm == 0.0) throw NumericError("hoyer_project: degenerate projection");
    v *= l2 / norm;  // scales l1 and l2 together, so sparsity is unaffected
    return v;
}

Eigen::MatrixXd membership_matrix(const std::vector<int>& feature_class,
                                  int n_classes) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(feature_class.size(), n_classes);
    for (std::size_t f = 0; f < feature_class.size(); ++f) {
        int c = feature_class[f];
        if (c < 1 || c > n_classes)
            throw DataError("membership_matrix: feature class out of range");
        Q(static_cast<Eigen::Index>(f), c - 1) = 1.0;
    }
    return Q;
}

InitFeaturesResult init_features(const Eigen::MatrixXd& X,
                                 const std::vector<int>& labels, int n_classes,
                                 int k, double rho_w, std::uint64_t seed) {
    if (static_cast<Eigen::Index>(labels.size()) != X.cols())
        throw DataError("init_features: one label per column required");
    if (n_classes < 1) throw ConfigError("init_features: n_classes must be >= 1");
    if (k < 1) throw ConfigError("init_features: k must be >= 1");
    Eigen::Index n_f = static_cast<Eigen::Index>(k) * n_classes;
    if (n_f >= std::min(X.rows(), X.cols())) {
        std::ostringstream os;
        os << "init_features: k*n_classes = " << n_f
           << " must be smaller than min(pixels, samples) = "
           << std::min(X.rows(), X.cols());
        throw DataError(os.str());
    }

    InitFeaturesResult out;
    out.W0.resize(X.rows(), n_f);
    Eigen::Index next = 0;
    for (int cls = 1; cls <= n_classes; ++cls) {
        std::vector<Eigen::Index> cols;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) cols.push_back(static_cast<Eigen::Index>(i));
        if (static_cast<int>(cols.size()) < k) {
            std::ostringstream os;
            os << "init_features: class " << cls << " has " << cols.size()
               << " columns, fewer than k = " << k;
            throw DataError(os.str());
        }
        Eigen::MatrixXd sub(X.rows(), cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) sub.col(i) = X.col(cols[i]);

        KMeansResult km = kmeans(sub, k, derive_seed(seed, 1000 + cls));
        for (int j = 0; j < k; ++j) {
            out.W0.col(next++) = hoyer_project(km.centroids.col(j), rho_w);
            out.feature_class.push_back(cls);
        }
    }
    out.Q = membership_matrix(out.feature_class, n_classes);
    return out;
}

Eigen::MatrixXd update_W(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& X, double lambda1, double epsilon) {
    if (W.cols() != H.rows() || W.rows() != X.rows() || H.cols() != X.cols())
        throw DataError("update_W: shape mismatch");
    Eigen::MatrixXd numer = X * H.transpose();
    Eigen::MatrixXd denom = W * (H * H.transpose()) + lambda1 * W;
    Eigen::MatrixXd out(W.rows(), W.cols());
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        for (Eigen::Index i = 0; i < W.rows(); ++i) {
            double w = W(i, j);
            // exact zeros stay exact zeros (multiplicative preservation)
            out(i, j) = w == 0.0 ? 0.0
                                 : w * (numer(i, j) + epsilon) / (denom(i, j) + epsilon);
        }
    return out;
}

Eigen::MatrixXd update_H(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& X, double gamma, double lambda2,
                         double epsilon) {
    if (W.cols() != H.rows() || W.rows() != X.rows() || H.cols() != X.cols())
        throw DataError("update_H: shape mismatch");
    Eigen::MatrixXd numer = W.transpose() * X + gamma * H;
    Eigen::MatrixXd denom =
        (W.transpose() * W) * H + lambda2 * H + gamma * ((H * H.transpose()) * H);
    Eigen::MatrixXd out(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            double h = H(i, j);
            out(i, j) = h == 0.0 ? 0.0
                                 : h * (numer(i, j) + epsilon) / (denom(i, j) + epsilon);
        }
    return out;
}

namespace {

struct ObjectiveTriple {
    double overall, w_part, h_part;
};

ObjectiveTriple objective_triple(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                                 const Eigen::MatrixXd& H, double gamma,
                                 double lambda1, double lambda2) {
    double fit = (X - W * H).squaredNorm();
    Eigen::MatrixXd hht = H * H.transpose();
    hht.diagonal().array() -= 1.0;
    double ortho = gamma * hht.squaredNorm();
    double wreg = lambda1 * W.squaredNorm();
    double hreg = lambda2 * H.squaredNorm();
    return {fit + ortho + wreg + hreg, fit + wreg, fit + ortho + hreg};
}

}  // namespace

double objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                 const Eigen::MatrixXd& H, double gamma, double lambda1,
                 double lambda2, ObjectivePart which) {
    if (W.cols() != H.rows() || W.rows() != X.rows() || H.cols() != X.cols())
        throw DataError("objective: shape mismatch");
    ObjectiveTriple t = objective_triple(X, W, H, gamma, lambda1, lambda2);
    switch (which) {
        case ObjectivePart::Overall: return t.overall;
        case ObjectivePart::WPart: return t.w_part;
        case ObjectivePart::HPart: return t.h_part;
    }
    throw ConfigError("objective: unknown part");
}

FactorizeResult factorize(const DataMatrix& data, const NmfConfig& config) {
    config.validate();
    if (data.X.size() == 0) throw DataError("factorize: empty data matrix");
    if (static_cast<Eigen::Index>(data.column_labels.size()) != data.X.cols())
        throw DataError("factorize: one label per column required");

    InitFeaturesResult init =
        init_features(data.X, data.column_labels, data.n_classes, config.k,
                      config.rho_w, derive_seed(config.seed, 11));

    Eigen::Index n_f = init.W0.cols();
    auto rng = make_rng(config.seed, 12);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Eigen::MatrixXd H(n_f, data.X.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i) H(i, j) = uni(rng);

    Eigen::MatrixXd W = init.W0;
    FactorizeResult result;
    auto record = [&] {
        ObjectiveTriple t = objective_triple(data.X, W, H, config.gamma,
                                             config.lambda1, config.lambda2);
        result.trace.overall.push_back(t.overall);
        result.trace.w_part.push_back(t.w_part);
        result.trace.h_part.push_back(t.h_part);
    };
    record();
    for (int it = 0; it < config.iterations; ++it) {
        W = update_W(W, H, data.X, config.lambda1, config.epsilon);
        H = update_H(W, H, data.X, config.gamma, config.lambda2, config.epsilon);
        record();
    }

    result.factors = FactorPair{std::move(W), std::move(H), init.feature_class};
    result.Q = std::move(init.Q);
    return result;
}

std::pair<double, double> kkt_residual(const Eigen::MatrixXd& X,
                                       const Eigen::MatrixXd& W,
                                       const Eigen::MatrixXd& H,
                                       const NmfConfig& config) {
    // Gradients in the scaling the multiplicative updates descend on: their
    // fixed points satisfy grad .* factor = 0 with grad >= 0 on zero entries.
    Eigen::MatrixXd grad_w =
        W * (H * H.transpose()) + config.lambda1 * W - X * H.transpose();
    Eigen::MatrixXd grad_h = (W.transpose() * W) * H + config.lambda2 * H +
                             config.gamma * ((H * H.transpose()) * H) -
                             W.transpose() * X - config.gamma * H;

    auto residual = [](const Eigen::MatrixXd& grad, const Eigen::MatrixXd& factor) {
        double stationarity = 0.0, feasibility = 0.0;
        for (Eigen::Index j = 0; j < factor.cols(); ++j)
            for (Eigen::Index i = 0; i < factor.rows(); ++i) {
                if (factor(i, j) == 0.0)
                    feasibility = std::max(feasibility, -grad(i, j));
                else
                    stationarity = std::max(stationarity,
                                            std::abs(grad(i, j) * factor(i, j)));
            }
        return stationarity + std::max(feasibility, 0.0);
    };
    return {residual(grad_w, W), residual(grad_h, H)};
}

LabelField extract_labels(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                          const Eigen::MatrixXd& Q, double tau) {
    if (W.cols() != H.rows() || Q.rows() != W.cols())
        throw DataError("extract_labels: shape mismatch");
    int n_classes = static_cast<int>(Q.cols());
    if (n_classes < 1) throw DataError("extract_labels: no classes in Q");
    std::vector<std::vector<Eigen::Index>> class_features(n_classes);
    for (Eigen::Index f = 0; f < Q.rows(); ++f) {
        int cls = -1;
        for (int c = 0; c < n_classes; ++c) {
            double q = Q(f, c);
            if (q != 0.0 && q != 1.0)
                throw DataError("extract_labels: Q must be binary");
            if (q == 1.0) {
                if (cls >= 0)
                    throw DataError("extract_labels: Q row with multiple classes");
                cls = c;
            }
        }
        if (cls < 0) throw DataError("extract_labels: Q row with no class");
        class_features[cls].push_back(f);
    }

    LabelField out;
    out.n_classes = n_classes;
    out.Y.setZero(W.rows(), H.cols());
    out.C.setZero(W.rows(), H.cols());
    Eigen::MatrixXd best = Eigen::MatrixXd::Constant(W.rows(), H.cols(), -1.0);

    for (int c = 0; c < n_classes; ++c) {
        const auto& feats = class_features[c];
        Eigen::MatrixXd Wc(W.rows(), feats.size());
        Eigen::MatrixXd Hc(feats.size(), H.cols());
        for (std::size_t t = 0; t < feats.size(); ++t) {
            Wc.col(t) = W.col(feats[t]);
            Hc.row(t) = H.row(feats[t]);
        }
        Eigen::MatrixXd L = Wc * Hc;  // class-c likelihood per pixel and image
        for (Eigen::Index n = 0; n < L.cols(); ++n)
            for (Eigen::Index i = 0; i < L.rows(); ++i)
                if (L(i, n) > best(i, n)) {
                    best(i, n) = L(i, n);
                    out.Y(i, n) = static_cast<std::uint8_t>(c + 1);
                }
    }

    out.C = best.cwiseMax(0.0);
    for (Eigen::Index n = 0; n < out.Y.cols(); ++n)
        for (Eigen::Index i = 0; i < out.Y.rows(); ++i)
            if (out.C(i, n) < tau) out.Y(i, n) = 0;
    return out;
}

Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1> median_filter_label_image(
    const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>& labels, int width,
    int height) {
    if (labels.size() != static_cast<Eigen::Index>(width) * height)
        throw DataError("median_filter_label_image: size mismatch");
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1> out(labels.size());
    std::uint8_t window[9];
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            int t = 0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    int rr = std::clamp(r + dr, 0, height - 1);
                    int cc = std::clamp(c + dc, 0, width - 1);
                    window[t++] = labels[static_cast<Eigen::Index>(rr) * width + cc];
                }
            std::nth_element(window, window + 4, window + 9);
            out[static_cast<Eigen::Index>(r) * width + c] = window[4];
        }
    return out;
}

void median_filter_labels(LabelField& field, int width, int height) {
    if (field.Y.rows() != static_cast<Eigen::Index>(width) * height)
        throw DataError("median_filter_labels: geometry mismatch");
    for (Eigen::Index n = 0; n < field.Y.cols(); ++n)
        field.Y.col(n) = median_filter_label_image(field.Y.col(n), width, height);
}

void write_trace_csv(const ConvergenceTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "iteration,overall,w_part,h_part\n";
    out.precision(12);
    for (std::size_t i = 0; i < trace.overall.size(); ++i)
        out << i << ',' << trace.overall[i] << ',' << trace.w_part[i] << ','
            << trace.h_part[i] << '\n';
}

}  // namespace seislabel
