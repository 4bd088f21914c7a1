#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "seislabel/common.hpp"
#include "seislabel/corpus.hpp"
#include "seislabel/curvelet.hpp"

namespace seislabel {

enum class Measure { CurveletSvd, Euclidean };

Measure parse_measure(const std::string& name);          // "curvelet-svd" | "euclidean"
std::string measure_name(Measure m);

// Singular values of one wedge coefficient matrix, non-increasing.
Eigen::VectorXd wedge_singular_values(const Eigen::MatrixXcd& coeffs);

// exp of the Shannon entropy of the l1-normalized spectrum; in [1, L].
double effective_rank(const Eigen::VectorXd& sigma);

// Keep the first floor(effective_rank(sigma)) entries, zero the rest.
Eigen::VectorXd truncate_by_effective_rank(const Eigen::VectorXd& sigma);

// Concatenated truncated singular values over the retained wedges, in tiling
// order.  Layout is fixed by the patch geometry: block b covers
// [offset, offset+length) and belongs to (scale, orientation).
struct FeatureBlock {
    int scale = 0;
    int orientation = 0;
    int offset = 0;
    int length = 0;
};

struct FeatureVector {
    Eigen::VectorXd values;
    std::vector<FeatureBlock> layout;
};

// Extract the feature vector of one patch through a prepared transform.
// All-zero wedges (e.g. from constant patches) contribute all-zero blocks.
FeatureVector feature_vector(CurveletTransform& transform, const Patch& patch);

// 1 - |v1-v2|_1 / |v1+v2|_1, clamped to [0,1].
double similarity(const FeatureVector& v1, const FeatureVector& v2);

// Pairwise similarity of the whole corpus under the chosen measure.  The
// curvelet path is symmetric with unit diagonal; the Euclidean baseline is
// row-normalized distance (1 - d/rowmax) and need not be symmetric.
Eigen::MatrixXd similarity_matrix(const PatchCorpus& corpus, Measure measure);
Eigen::MatrixXd euclidean_similarity_matrix(const PatchCorpus& corpus);

// Feature vectors for every patch (shared layout), as a column per patch.
struct CorpusFeatures {
    Eigen::MatrixXd values;               // feature length x n_patches
    std::vector<FeatureBlock> layout;
};
CorpusFeatures corpus_features(const PatchCorpus& corpus);

// Persistence: feature sets as "SLF1", similarity matrices as "SLS1" (both in
// the packed float container), plus a plain CSV export for matrices.
void save_features(const CorpusFeatures& features, const std::string& path);
CorpusFeatures load_features(const std::string& path);
void save_similarity(const Eigen::MatrixXd& S, const std::string& path);
Eigen::MatrixXd load_similarity(const std::string& path);
void write_matrix_csv(const Eigen::MatrixXd& M, const std::string& path);

}  // namespace seislabel
