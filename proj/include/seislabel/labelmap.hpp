#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "seislabel/common.hpp"
#include "seislabel/corpus.hpp"

namespace seislabel {

// Vectorized weakly-labeled patches: column n is patch n, entries in [0,1].
struct DataMatrix {
    Eigen::MatrixXd X;                 // N_p x N_s
    std::vector<int> column_labels;    // per column, in 1..n_classes
    int n_classes = 0;
    int width = 0, height = 0;         // patch geometry for reshaping labels
};

// Non-negative factors plus the class bookkeeping of W's columns.
struct FactorPair {
    Eigen::MatrixXd W;                 // N_p x N_f
    Eigen::MatrixXd H;                 // N_f x N_s
    std::vector<int> feature_class;    // per W column, in 1..n_classes
};

struct NmfConfig {
    double lambda1 = 0.1;    // ||W||_F^2 weight
    double lambda2 = 0.5;    // ||H||_F^2 weight
    double gamma = 5.0;      // ||HH^T - I||_F^2 weight
    double rho_w = 0.4;      // target sparsity of initial features
    double tau = 0.001;      // confidence threshold for pixel labels
    int k = 300;             // features per class
    int iterations = 200;
    double epsilon = 1e-12;  // division guard in the multiplicative updates
    std::uint64_t seed = 0;

    void validate() const;
};

struct ConvergenceTrace {
    std::vector<double> overall;   // iterations + 1 entries, index 0 = initial
    std::vector<double> w_part;
    std::vector<double> h_part;
};

struct FactorizeResult {
    FactorPair factors;
    Eigen::MatrixXd Q;             // N_f x n_classes, binary memberships
    ConvergenceTrace trace;
};

enum class ObjectivePart { Overall, WPart, HPart };

DataMatrix assemble_data_matrix(const PatchCorpus& corpus);

// Normalized l1/l2 sparseness in [0,1]: 0 for uniform, 1 for single support.
double sparsity(const Eigen::VectorXd& w);

// Project onto { v >= 0, ||v||_2 = ||w||_2, sparsity(v) = rho } (Hoyer 2004).
Eigen::VectorXd hoyer_project(const Eigen::VectorXd& w, double rho);

// Per-class k-means on X's columns; centroids, Hoyer-projected to rho_w,
// become the initial feature matrix.  Returns W0, feature classes, and Q.
struct InitFeaturesResult {
    Eigen::MatrixXd W0;
    std::vector<int> feature_class;
    Eigen::MatrixXd Q;
};
InitFeaturesResult init_features(const Eigen::MatrixXd& X,
                                 const std::vector<int>& labels, int n_classes,
                                 int k, double rho_w, std::uint64_t seed);

Eigen::MatrixXd membership_matrix(const std::vector<int>& feature_class,
                                  int n_classes);

// One multiplicative update of each factor.  Entries of W that are exactly
// zero stay exactly zero.
Eigen::MatrixXd update_W(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& X, double lambda1, double epsilon);
Eigen::MatrixXd update_H(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                         const Eigen::MatrixXd& X, double gamma, double lambda2,
                         double epsilon);

double objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                 const Eigen::MatrixXd& H, double gamma, double lambda1,
                 double lambda2, ObjectivePart which);

// Full weak-to-pixel mapping: init_features, random H0 in [0,1], alternating
// multiplicative updates for config.iterations rounds, objective trace.
FactorizeResult factorize(const DataMatrix& data, const NmfConfig& config);

// Stationarity check: for each factor, max |gradient * factor| (elementwise)
// plus the largest negative gradient over zero entries.  Near zero at a
// constrained stationary point.  Uses the same gradient scaling the updates
// descend on.
std::pair<double, double> kkt_residual(const Eigen::MatrixXd& X,
                                       const Eigen::MatrixXd& W,
                                       const Eigen::MatrixXd& H,
                                       const NmfConfig& config);

// Per-image class likelihoods -> argmax labels + confidences; confidence
// below tau becomes class 0 (uncertain).  No median filtering here.
LabelField extract_labels(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                          const Eigen::MatrixXd& Q, double tau);

// 3x3 median filter (5th order statistic, replicate padding) of one label
// image stored row-major in a column, then of a whole field.
Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1> median_filter_label_image(
    const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>& labels, int width,
    int height);
void median_filter_labels(LabelField& field, int width, int height);

void write_trace_csv(const ConvergenceTrace& trace, const std::string& path);

}  // namespace seislabel
