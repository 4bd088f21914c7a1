#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "seislabel/common.hpp"
#include "seislabel/corpus.hpp"
#include "seislabel/features.hpp"
#include "seislabel/labelmap.hpp"

namespace seislabel {

// Retrieval metrics over a similarity matrix with per-item class labels.
// Rankings exclude the query itself and break ties toward the lower index.

double precision_at_m(const Eigen::MatrixXd& S, const std::vector<int>& labels,
                      int m);
double retrieval_accuracy(const Eigen::MatrixXd& S, const std::vector<int>& labels);
double mean_average_precision(const Eigen::MatrixXd& S,
                              const std::vector<int>& labels);

struct RocPoint {
    double threshold, tpr, fpr;
};
// Threshold sweep over unordered off-diagonal pairs with symmetrized scores;
// pairs at or above the threshold count as positive predictions.
std::pair<std::vector<RocPoint>, double> roc_auc(const Eigen::MatrixXd& S,
                                                 const std::vector<int>& labels);

double rand_index(const std::vector<int>& clustering, const std::vector<int>& labels);

// Classical MDS to 2D: symmetrize S, distances 1-s, double centering, top two
// eigenpairs; each output axis is sign-fixed so its first nonzero entry is
// positive.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& S);

// MDS embedding + seeded k-means + Rand index against the labels.
struct ClusteringExperiment {
    double rand;
    Eigen::MatrixXd coordinates;   // n x 2
    std::vector<int> clusters;
};
ClusteringExperiment clustering_experiment(const Eigen::MatrixXd& S,
                                           const std::vector<int>& labels,
                                           int n_clusters, std::uint64_t seed);

// Fraction of non-ignored pixels where Y equals Y_ref.
double pixel_accuracy(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& Y,
                      const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& Y_ref,
                      const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& ignore);

struct MeasureMetrics {
    std::string measure;
    double ra = 0.0, map = 0.0, auc = 0.0, rand = 0.0;
};

struct MetricsReport {
    std::vector<MeasureMetrics> rows;
    std::vector<int> pm_cutoffs;
    std::vector<std::vector<double>> pm_values;   // per row, per cutoff
    std::vector<std::vector<RocPoint>> roc_curves;  // per row
};

// Full Table-1-shaped report for one corpus: RA/MAP/AUC plus the clustering
// Rand index, P@M curve, and ROC points per measure.
MetricsReport evaluate_measures(const PatchCorpus& corpus,
                                const std::vector<Measure>& measures,
                                int n_clusters, std::uint64_t seed);

// One point of the mislabel-robustness experiment.
struct RobustnessCurve {
    std::string parameter_name;    // "k" or "rho_w"
    double parameter_value = 0.0;
    std::vector<double> fractions;
    std::vector<double> relative_performance;  // entry 0 (fraction 0) == 1
    double base_accuracy = 0.0;
    int trials = 0;
};

struct SweepPoint {
    NmfConfig config;
    std::string parameter_name;
    double parameter_value;
};

// For each config: factorize the weakly-labeled corpus, then re-run with a
// fraction of X's columns replaced by patches of a different class and report
// masked pixel accuracy relative to the unperturbed run.  Pixels uncertain in
// the base run are ignored throughout.
std::vector<RobustnessCurve> robustness_sweep(const PatchCorpus& corpus,
                                              const LabelField& ground_truth,
                                              const std::vector<SweepPoint>& grid,
                                              const std::vector<double>& fractions,
                                              int trials, std::uint64_t seed);

void write_metrics_csv(const MetricsReport& report, const std::string& path);
void write_pm_csv(const MetricsReport& report, const std::string& path);
void write_roc_csv(const MetricsReport& report, const std::string& path);
void write_robustness_csv(const std::vector<RobustnessCurve>& curves,
                          const std::string& path);

}  // namespace seislabel
