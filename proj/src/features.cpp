#include "seislabel/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace seislabel {

Measure parse_measure(const std::string& name) {
    if (name == "curvelet-svd") return Measure::CurveletSvd;
    if (name == "euclidean") return Measure::Euclidean;
    throw ConfigError("unknown similarity measure \"" + name +
                      "\" (expected curvelet-svd or euclidean)");
}

std::string measure_name(Measure m) {
    return m == Measure::CurveletSvd ? "curvelet-svd" : "euclidean";
}

Eigen::VectorXd wedge_singular_values(const Eigen::MatrixXcd& coeffs) {
    if (coeffs.size() == 0) throw DataError("wedge_singular_values: empty matrix");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(coeffs);
    return svd.singularValues();
}

double effective_rank(const Eigen::VectorXd& sigma) {
    if (sigma.size() == 0) throw DataError("effective_rank: empty spectrum");
    double total = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] < 0.0)
            throw DataError("effective_rank: negative singular value");
        total += sigma[i];
    }
    if (total == 0.0)
        throw NumericError("effective_rank: all-zero singular value spectrum");
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        double p = sigma[i] / total;
        if (p > 0.0) entropy -= p * std::log(p);
    }
    double er = std::exp(entropy);
    return std::clamp(er, 1.0, static_cast<double>(sigma.size()));
}

Eigen::VectorXd truncate_by_effective_rank(const Eigen::VectorXd& sigma) {
    int keep = static_cast<int>(std::floor(effective_rank(sigma)));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(sigma.size());
    out.head(keep) = sigma.head(keep);
    return out;
}

FeatureVector feature_vector(CurveletTransform& transform, const Patch& patch) {
    CurveletCoeffs coeffs = transform.forward(patch);

    FeatureVector fv;
    int total = 0;
    for (const auto& c : coeffs.coeffs)
        total += static_cast<int>(std::min(c.rows(), c.cols()));
    fv.values.resize(total);

    int offset = 0;
    for (std::size_t i = 0; i < coeffs.coeffs.size(); ++i) {
        const Wedge& w = coeffs.geometry->wedges()[coeffs.wedge_index[i]];
        Eigen::VectorXd sigma = wedge_singular_values(coeffs.coeffs[i]);
        // A wedge with no signal content (zero matrix) has no defined
        // effective rank; its block stays all-zero.
        Eigen::VectorXd kept =
            sigma.sum() > 0.0 ? truncate_by_effective_rank(sigma) : sigma;
        fv.values.segment(offset, kept.size()) = kept;
        fv.layout.push_back(FeatureBlock{w.scale, w.orientation, offset,
                                         static_cast<int>(kept.size())});
        offset += static_cast<int>(kept.size());
    }
    return fv;
}

namespace {

double similarity_values(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double diff = (a - b).lpNorm<1>();
    double sum = (a + b).lpNorm<1>();
    if (sum == 0.0)
        throw NumericError("similarity: both feature vectors are zero");
    return std::clamp(1.0 - diff / sum, 0.0, 1.0);
}

}  // namespace

double similarity(const FeatureVector& v1, const FeatureVector& v2) {
    if (v1.values.size() != v2.values.size())
        throw DataError("similarity: feature vectors have different layouts");
    return similarity_values(v1.values, v2.values);
}

CorpusFeatures corpus_features(const PatchCorpus& corpus) {
    corpus.validate();
    if (corpus.size() < 1) throw DataError("corpus_features: empty corpus");
    CurveletTransform transform(corpus.height, corpus.width);
    CorpusFeatures out;
    for (int i = 0; i < corpus.size(); ++i) {
        FeatureVector fv = feature_vector(transform, corpus.patch(i));
        if (i == 0) {
            out.values.resize(fv.values.size(), corpus.size());
            out.layout = fv.layout;
        }
        out.values.col(i) = fv.values;
    }
    return out;
}

Eigen::MatrixXd euclidean_similarity_matrix(const PatchCorpus& corpus) {
    corpus.validate();
    int n = corpus.size();
    if (n < 2)
        throw NumericError("euclidean_similarity_matrix: need at least 2 patches");

    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double d = (corpus.patches[i] - corpus.patches[j]).cast<double>().norm();
            D(i, j) = d;
            D(j, i) = d;
        }
    }
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
        double row_max = D.row(i).maxCoeff();
        for (int j = 0; j < n; ++j)
            S(i, j) = row_max > 0.0 ? 1.0 - D(i, j) / row_max : 1.0;
        S(i, i) = 1.0;
    }
    return S;
}

Eigen::MatrixXd similarity_matrix(const PatchCorpus& corpus, Measure measure) {
    if (corpus.size() < 2)
        throw NumericError("similarity_matrix: need at least 2 patches");
    if (measure == Measure::Euclidean) return euclidean_similarity_matrix(corpus);

    CorpusFeatures f = corpus_features(corpus);
    int n = corpus.size();
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
        S(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            double s = similarity_values(f.values.col(i), f.values.col(j));
            S(i, j) = s;
            S(j, i) = s;
        }
    }
    return S;
}

// ---- persistence ------------------------------------------------------------

void save_features(const CorpusFeatures& features, const std::string& path) {
    std::vector<Eigen::MatrixXf> planes;
    planes.reserve(static_cast<std::size_t>(features.values.cols()));
    for (Eigen::Index c = 0; c < features.values.cols(); ++c)
        planes.push_back(features.values.col(c).transpose().cast<float>());
    save_float_stack("SLF1", planes, path);
}

CorpusFeatures load_features(const std::string& path) {
    auto planes = load_float_stack("SLF1", path);
    CorpusFeatures out;
    out.values.resize(planes[0].cols(), static_cast<Eigen::Index>(planes.size()));
    for (std::size_t i = 0; i < planes.size(); ++i)
        out.values.col(static_cast<Eigen::Index>(i)) =
            planes[i].row(0).transpose().cast<double>();
    return out;
}

void save_similarity(const Eigen::MatrixXd& S, const std::string& path) {
    save_float_stack("SLS1", {S.cast<float>()}, path);
}

Eigen::MatrixXd load_similarity(const std::string& path) {
    auto planes = load_float_stack("SLS1", path);
    return planes.at(0).cast<double>();
}

void write_matrix_csv(const Eigen::MatrixXd& M, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out.precision(12);
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c) out << ',';
            out << M(r, c);
        }
        out << '\n';
    }
}

}  // namespace seislabel
