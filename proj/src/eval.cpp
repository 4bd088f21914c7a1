#include "seislabel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "seislabel/kmeans.hpp"

namespace seislabel {

namespace {

void check_square(const Eigen::MatrixXd& S, const std::vector<int>& labels) {
    if (S.rows() != S.cols()) throw DataError("metrics: similarity matrix not square");
    if (static_cast<Eigen::Index>(labels.size()) != S.rows())
        throw DataError("metrics: one label per item required");
}

// Items ranked by similarity to query i (descending, ties to lower index),
// excluding the query itself.
std::vector<int> ranking_for(const Eigen::MatrixXd& S, int i) {
    std::vector<int> order;
    order.reserve(S.rows() - 1);
    for (int j = 0; j < S.rows(); ++j)
        if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (S(i, a) != S(i, b)) return S(i, a) > S(i, b);
        return a < b;
    });
    return order;
}

int class_size_minus_query(const std::vector<int>& labels, int i) {
    int n = 0;
    for (std::size_t j = 0; j < labels.size(); ++j)
        if (static_cast<int>(j) != i && labels[j] == labels[i]) ++n;
    return n;
}

}  // namespace

double precision_at_m(const Eigen::MatrixXd& S, const std::vector<int>& labels,
                      int m) {
    check_square(S, labels);
    int n = static_cast<int>(S.rows());
    if (m < 1 || m > n - 1)
        throw ConfigError("precision_at_m: M must be in 1..N-1");
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<int> order = ranking_for(S, i);
        int hits = 0;
        for (int r = 0; r < m; ++r)
            if (labels[order[r]] == labels[i]) ++hits;
        total += static_cast<double>(hits) / m;
    }
    return total / n;
}

double retrieval_accuracy(const Eigen::MatrixXd& S, const std::vector<int>& labels) {
    check_square(S, labels);
    int n = static_cast<int>(S.rows());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        int m = class_size_minus_query(labels, i);
        if (m == 0)
            throw DataError("retrieval_accuracy: class of item " + std::to_string(i) +
                            " has a single member");
        std::vector<int> order = ranking_for(S, i);
        int hits = 0;
        for (int r = 0; r < m; ++r)
            if (labels[order[r]] == labels[i]) ++hits;
        total += static_cast<double>(hits) / m;
    }
    return total / n;
}

double mean_average_precision(const Eigen::MatrixXd& S,
                              const std::vector<int>& labels) {
    check_square(S, labels);
    int n = static_cast<int>(S.rows());
    double total = 0.0;
    int queries = 0;
    for (int i = 0; i < n; ++i) {
        int rel_total = class_size_minus_query(labels, i);
        if (rel_total == 0) continue;  // no relevant items: AP undefined, skip
        std::vector<int> order = ranking_for(S, i);
        int hits = 0;
        double ap = 0.0;
        for (std::size_t r = 0; r < order.size(); ++r) {
            if (labels[order[r]] != labels[i]) continue;
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
        total += ap / rel_total;
        ++queries;
    }
    if (queries == 0)
        throw DataError("mean_average_precision: every class has a single member");
    return total / queries;
}

std::pair<std::vector<RocPoint>, double> roc_auc(const Eigen::MatrixXd& S,
                                                 const std::vector<int>& labels) {
    check_square(S, labels);
    int n = static_cast<int>(S.rows());
    std::vector<std::pair<double, bool>> pairs;  // (symmetrized score, same class)
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    std::size_t positives = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool same = labels[i] == labels[j];
            pairs.emplace_back((S(i, j) + S(j, i)) / 2.0, same);
            if (same) ++positives;
        }
    std::size_t negatives = pairs.size() - positives;
    if (positives == 0 || negatives == 0)
        throw NumericError("roc_auc: need both same-class and different-class pairs");

    std::set<double> distinct;
    for (const auto& [score, same] : pairs) distinct.insert(score);
    std::vector<double> thresholds(distinct.rbegin(), distinct.rend());
    thresholds.insert(thresholds.begin(), thresholds.front() + 1.0);  // (0,0) sentinel

    std::vector<RocPoint> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (const auto& [score, same] : pairs) {
            if (score >= t) {
                if (same)
                    ++tp;
                else
                    ++fp;
            }
        }
        curve.push_back({t, static_cast<double>(tp) / positives,
                         static_cast<double>(fp) / negatives});
    }

    double auc = 0.0;
    for (std::size_t p = 1; p < curve.size(); ++p)
        auc += (curve[p].fpr - curve[p - 1].fpr) * (curve[p].tpr + curve[p - 1].tpr) / 2.0;
    return {curve, auc};
}

double rand_index(const std::vector<int>& clustering, const std::vector<int>& labels) {
    if (clustering.size() != labels.size())
        throw DataError("rand_index: partition sizes differ");
    std::size_t n = labels.size();
    if (n < 2) throw NumericError("rand_index: need at least 2 items");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            bool same_cluster = clustering[i] == clustering[j];
            bool same_class = labels[i] == labels[j];
            if (same_cluster == same_class) ++agree;
        }
    return 2.0 * static_cast<double>(agree) / (static_cast<double>(n) * (n - 1));
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& S) {
    if (S.rows() != S.cols()) throw DataError("classical_mds: matrix not square");
    Eigen::Index n = S.rows();
    if (n < 3) throw NumericError("classical_mds: need at least 3 points");

    Eigen::MatrixXd A = (S + S.transpose()) / 2.0;
    Eigen::MatrixXd D2(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double d = 1.0 - A(i, j);
            D2(i, j) = d * d;
        }
    Eigen::VectorXd row_mean = D2.rowwise().mean();
    double total_mean = D2.mean();
    Eigen::MatrixXd B(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            B(i, j) = -0.5 * (D2(i, j) - row_mean[i] - row_mean[j] + total_mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((B + B.transpose()) / 2.0);
    Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, 2);
    for (int axis = 0; axis < 2; ++axis) {
        Eigen::Index idx = n - 1 - axis;  // eigenvalues ascend in Eigen
        double lambda = eig.eigenvalues()[idx];
        if (lambda <= 0.0) continue;      // fewer than 2 usable dimensions
        Eigen::VectorXd v = eig.eigenvectors().col(idx) * std::sqrt(lambda);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v[i]) > 1e-12) {
                if (v[i] < 0.0) v = -v;
                break;
            }
        }
        coords.col(axis) = v;
    }
    return coords;
}

ClusteringExperiment clustering_experiment(const Eigen::MatrixXd& S,
                                           const std::vector<int>& labels,
                                           int n_clusters, std::uint64_t seed) {
    if (n_clusters < 2) throw ConfigError("clustering_experiment: need >= 2 clusters");
    check_square(S, labels);
    ClusteringExperiment out;
    out.coordinates = classical_mds(S);
    KMeansResult km = kmeans(out.coordinates.transpose(), n_clusters,
                             derive_seed(seed, 21));
    out.clusters = km.assignment;
    out.rand = rand_index(out.clusters, labels);
    return out;
}

double pixel_accuracy(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& Y,
                      const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& Y_ref,
                      const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& ignore) {
    if (Y.rows() != Y_ref.rows() || Y.cols() != Y_ref.cols() ||
        Y.rows() != ignore.rows() || Y.cols() != ignore.cols())
        throw DataError("pixel_accuracy: shape mismatch");
    std::size_t considered = 0, correct = 0;
    for (Eigen::Index c = 0; c < Y.cols(); ++c)
        for (Eigen::Index r = 0; r < Y.rows(); ++r) {
            if (ignore(r, c)) continue;
            ++considered;
            if (Y(r, c) == Y_ref(r, c)) ++correct;
        }
    if (considered == 0)
        throw NumericError("pixel_accuracy: every pixel is ignored");
    return static_cast<double>(correct) / static_cast<double>(considered);
}

MetricsReport evaluate_measures(const PatchCorpus& corpus,
                                const std::vector<Measure>& measures,
                                int n_clusters, std::uint64_t seed) {
    corpus.validate();
    if (!corpus.labeled())
        throw DataError("evaluate_measures: corpus has no class labels");
    std::vector<int> labels(corpus.class_labels.begin(), corpus.class_labels.end());

    MetricsReport report;
    for (int m = 1; m <= corpus.size() - 1; ++m) report.pm_cutoffs.push_back(m);

    for (std::size_t mi = 0; mi < measures.size(); ++mi) {
        Eigen::MatrixXd S = similarity_matrix(corpus, measures[mi]);
        MeasureMetrics row;
        row.measure = measure_name(measures[mi]);
        row.ra = retrieval_accuracy(S, labels);
        row.map = mean_average_precision(S, labels);
        auto [curve, auc] = roc_auc(S, labels);
        row.auc = auc;
        row.rand = clustering_experiment(S, labels, n_clusters,
                                         derive_seed(seed, 400 + mi))
                       .rand;
        report.rows.push_back(row);
        report.roc_curves.push_back(curve);
        std::vector<double> pm;
        pm.reserve(report.pm_cutoffs.size());
        for (int m : report.pm_cutoffs) pm.push_back(precision_at_m(S, labels, m));
        report.pm_values.push_back(pm);
    }
    return report;
}

std::vector<RobustnessCurve> robustness_sweep(const PatchCorpus& corpus,
                                              const LabelField& ground_truth,
                                              const std::vector<SweepPoint>& grid,
                                              const std::vector<double>& fractions,
                                              int trials, std::uint64_t seed) {
    corpus.validate();
    if (!corpus.labeled())
        throw DataError("robustness_sweep: corpus has no class labels");
    if (trials < 1) throw ConfigError("robustness_sweep: trials must be >= 1");
    for (double f : fractions)
        if (f < 0.0 || f > 0.25)
            throw ConfigError("robustness_sweep: fractions must lie in [0, 0.25]");

    DataMatrix data = assemble_data_matrix(corpus);
    int n_s = static_cast<int>(data.X.cols());
    if (ground_truth.Y.rows() != data.X.rows() ||
        ground_truth.Y.cols() != data.X.cols())
        throw DataError("robustness_sweep: ground truth does not match corpus");

    // smallest class share bounds the meaningful replacement fraction
    std::vector<int> class_count(data.n_classes + 1, 0);
    for (int l : data.column_labels) ++class_count[l];
    double min_share = 1.0;
    for (int c = 1; c <= data.n_classes; ++c)
        min_share = std::min(min_share, static_cast<double>(class_count[c]) / n_s);
    for (double f : fractions)
        if (f > 0.0 && f >= min_share)
            throw DataError("robustness_sweep: fraction " + std::to_string(f) +
                            " is not below the smallest class share " +
                            std::to_string(min_share));

    std::vector<RobustnessCurve> curves;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        NmfConfig cfg = grid[gi].config;
        cfg.seed = derive_seed(seed, 777 + gi);

        FactorizeResult base = factorize(data, cfg);
        LabelField base_labels = extract_labels(base.factors.W, base.factors.H,
                                                base.Q, cfg.tau);
        median_filter_labels(base_labels, data.width, data.height);

        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ignore(
            base_labels.Y.rows(), base_labels.Y.cols());
        for (Eigen::Index n = 0; n < ignore.cols(); ++n)
            for (Eigen::Index i = 0; i < ignore.rows(); ++i)
                ignore(i, n) = base_labels.Y(i, n) == 0 || ground_truth.Y(i, n) == 0;

        double base_acc = pixel_accuracy(base_labels.Y, ground_truth.Y, ignore);

        RobustnessCurve curve;
        curve.parameter_name = grid[gi].parameter_name;
        curve.parameter_value = grid[gi].parameter_value;
        curve.trials = trials;
        curve.base_accuracy = base_acc;
        for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
            double f = fractions[fi];
            curve.fractions.push_back(f);
            if (f == 0.0) {  // self-comparison: identical seeds, identical run
                curve.relative_performance.push_back(1.0);
                continue;
            }
            int replace = static_cast<int>(std::floor(f * n_s));
            double rel_sum = 0.0;
            for (int trial = 0; trial < trials; ++trial) {
                auto rng = make_rng(seed, (gi * 1000 + fi) * 100 + trial + 31);
                std::vector<int> cols(n_s);
                for (int i = 0; i < n_s; ++i) cols[i] = i;
                std::shuffle(cols.begin(), cols.end(), rng);

                DataMatrix perturbed = data;
                for (int r = 0; r < replace; ++r) {
                    int col = cols[r];
                    int own = data.column_labels[col];
                    // uniform draw among columns of any other class
                    int pick;
                    do {
                        pick = std::uniform_int_distribution<int>(0, n_s - 1)(rng);
                    } while (data.column_labels[pick] == own);
                    perturbed.X.col(col) = data.X.col(pick);
                }

                FactorizeResult run = factorize(perturbed, cfg);
                LabelField labels = extract_labels(run.factors.W, run.factors.H,
                                                   run.Q, cfg.tau);
                median_filter_labels(labels, data.width, data.height);
                rel_sum += pixel_accuracy(labels.Y, ground_truth.Y, ignore) / base_acc;
            }
            curve.relative_performance.push_back(rel_sum / trials);
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

// ---- CSV output -------------------------------------------------------------

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out.precision(10);
    out << "measure,ra,map,auc,rand\n";
    for (const auto& row : report.rows)
        out << row.measure << ',' << row.ra << ',' << row.map << ',' << row.auc
            << ',' << row.rand << '\n';
}

void write_pm_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out.precision(10);
    out << "measure,m,precision\n";
    for (std::size_t r = 0; r < report.rows.size(); ++r)
        for (std::size_t c = 0; c < report.pm_cutoffs.size(); ++c)
            out << report.rows[r].measure << ',' << report.pm_cutoffs[c] << ','
                << report.pm_values[r][c] << '\n';
}

void write_roc_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out.precision(10);
    out << "measure,threshold,fpr,tpr\n";
    for (std::size_t r = 0; r < report.rows.size(); ++r)
        for (const RocPoint& p : report.roc_curves[r])
            out << report.rows[r].measure << ',' << p.threshold << ',' << p.fpr
                << ',' << p.tpr << '\n';
}

void write_robustness_csv(const std::vector<RobustnessCurve>& curves,
                          const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out.precision(10);
    out << "parameter,value,fraction,relative_performance,trials,base_accuracy\n";
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.fractions.size(); ++i)
            out << c.parameter_name << ',' << c.parameter_value << ','
                << c.fractions[i] << ',' << c.relative_performance[i] << ','
                << c.trials << ',' << c.base_accuracy << '\n';
}

}  // namespace seislabel
