#include "seislabel/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace seislabel {

namespace {

// Similarity of one query feature column against all corpus feature columns.
Eigen::VectorXd curvelet_scores(const Eigen::VectorXd& query,
                                const Eigen::MatrixXd& corpus_features) {
    int n = static_cast<int>(corpus_features.cols());
    Eigen::VectorXd s(n);
    for (int j = 0; j < n; ++j) {
        double diff = (query - corpus_features.col(j)).lpNorm<1>();
        double sum = (query + corpus_features.col(j)).lpNorm<1>();
        if (sum == 0.0)
            throw NumericError("retrieval: query and corpus patch both have zero features");
        s[j] = std::clamp(1.0 - diff / sum, 0.0, 1.0);
    }
    return s;
}

Eigen::VectorXd euclidean_scores(const PatchImage& query, const PatchCorpus& corpus) {
    int n = corpus.size();
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j)
        d[j] = (query - corpus.patches[j]).cast<double>().norm();
    double mx = d.maxCoeff();
    Eigen::VectorXd s(n);
    for (int j = 0; j < n; ++j) s[j] = mx > 0.0 ? 1.0 - d[j] / mx : 1.0;
    return s;
}

std::vector<int> ranked_order(const Eigen::VectorXd& scores, int exclude = -1) {
    std::vector<int> order;
    order.reserve(scores.size());
    for (int i = 0; i < scores.size(); ++i)
        if (i != exclude) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

RetrievalResult take_top(const Eigen::VectorXd& scores, int m, int exclude,
                         int query_id) {
    RetrievalResult out;
    out.query_id = query_id;
    std::vector<int> order = ranked_order(scores, exclude);
    out.ranked_ids.assign(order.begin(), order.begin() + m);
    out.scores.reserve(m);
    for (int i = 0; i < m; ++i) out.scores.push_back(scores[out.ranked_ids[i]]);
    return out;
}

}  // namespace

RetrievalResult retrieve_top_m(const Patch& query, const PatchCorpus& corpus,
                               int m, Measure measure) {
    corpus.validate();
    query.validate();
    if (m < 1) throw ConfigError("retrieve_top_m: M must be >= 1");
    if (m > corpus.size())
        throw ConfigError("retrieve_top_m: M = " + std::to_string(m) +
                          " exceeds corpus size " + std::to_string(corpus.size()));
    if (query.width != corpus.width || query.height != corpus.height)
        throw DataError("retrieve_top_m: query dimensions do not match corpus");

    Eigen::VectorXd scores;
    if (measure == Measure::CurveletSvd) {
        CorpusFeatures f = corpus_features(corpus);
        CurveletTransform transform(corpus.height, corpus.width);
        FeatureVector qf = feature_vector(transform, query);
        scores = curvelet_scores(qf.values, f.values);
    } else {
        scores = euclidean_scores(query.pixels, corpus);
    }
    return take_top(scores, m, -1, -1);
}

RetrievalResult retrieve_top_m(const PatchCorpus& corpus, int query_index,
                               int m, Measure measure) {
    corpus.validate();
    if (query_index < 0 || query_index >= corpus.size())
        throw ConfigError("retrieve_top_m: query index out of range");
    if (m < 1) throw ConfigError("retrieve_top_m: M must be >= 1");
    if (m > corpus.size() - 1)
        throw ConfigError("retrieve_top_m: M = " + std::to_string(m) +
                          " exceeds corpus size minus the query");

    Eigen::VectorXd scores;
    if (measure == Measure::CurveletSvd) {
        CorpusFeatures f = corpus_features(corpus);
        scores = curvelet_scores(f.values.col(query_index), f.values);
    } else {
        scores = euclidean_scores(corpus.patches[query_index], corpus);
    }
    return take_top(scores, m, query_index, query_index);
}

WeakLabeling assign_image_labels(const std::vector<std::vector<Patch>>& exemplars,
                                 const PatchCorpus& corpus, int m, Measure measure) {
    corpus.validate();
    int n_classes = static_cast<int>(exemplars.size());
    if (n_classes < 1) throw ConfigError("assign_image_labels: no exemplar classes");
    if (m < 1) throw ConfigError("assign_image_labels: M must be >= 1");
    if (m > corpus.size())
        throw ConfigError("assign_image_labels: M exceeds corpus size");
    for (int c = 0; c < n_classes; ++c) {
        if (exemplars[c].empty())
            throw DataError("assign_image_labels: class " + std::to_string(c + 1) +
                            " has no exemplars");
        for (const Patch& p : exemplars[c]) {
            p.validate();
            if (p.width != corpus.width || p.height != corpus.height)
                throw DataError("assign_image_labels: exemplar dimensions do not match corpus");
        }
    }

    int n = corpus.size();
    // score(c, j): best similarity of patch j to class c's exemplars; keep the
    // winning exemplar's flattened index for provenance.
    Eigen::MatrixXd score = Eigen::MatrixXd::Constant(n_classes, n, -1.0);
    Eigen::MatrixXi best_ex = Eigen::MatrixXi::Constant(n_classes, n, -1);

    CorpusFeatures f;
    std::unique_ptr<CurveletTransform> transform;
    if (measure == Measure::CurveletSvd) {
        f = corpus_features(corpus);
        transform = std::make_unique<CurveletTransform>(corpus.height, corpus.width);
    }

    int flat_id = 0;
    for (int c = 0; c < n_classes; ++c) {
        for (const Patch& ex : exemplars[c]) {
            Eigen::VectorXd s;
            if (measure == Measure::CurveletSvd) {
                FeatureVector qf = feature_vector(*transform, ex);
                s = curvelet_scores(qf.values, f.values);
            } else {
                s = euclidean_scores(ex.pixels, corpus);
            }
            for (int j = 0; j < n; ++j)
                if (s[j] > score(c, j)) {
                    score(c, j) = s[j];
                    best_ex(c, j) = flat_id;
                }
            ++flat_id;
        }
    }

    // Per-class rank of every patch (1-based) in that class's own ordering.
    Eigen::MatrixXi rank(n_classes, n);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<int> order = ranked_order(score.row(c).transpose());
        for (int pos = 0; pos < n; ++pos) rank(c, order[pos]) = pos + 1;
    }

    // Greedy assignment over the global candidate pool: best score first,
    // ties to the lower class then lower patch index.  A class keeps taking
    // its highest-ranked unassigned patches until it holds M.
    struct Candidate {
        double score;
        int cls, patch;
    };
    std::vector<Candidate> pool;
    pool.reserve(static_cast<std::size_t>(n_classes) * n);
    for (int c = 0; c < n_classes; ++c)
        for (int j = 0; j < n; ++j) pool.push_back({score(c, j), c, j});
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.cls != b.cls) return a.cls < b.cls;
        return a.patch < b.patch;
    });

    WeakLabeling out;
    out.n_classes = n_classes;
    out.image_labels.assign(n, 0);
    std::vector<int> filled(n_classes, 0);
    for (const Candidate& cand : pool) {
        if (out.image_labels[cand.patch] != 0) continue;
        if (filled[cand.cls] >= m) continue;
        out.image_labels[cand.patch] = cand.cls + 1;
        ++filled[cand.cls];
        out.provenance.push_back({cand.patch, cand.cls + 1, best_ex(cand.cls, cand.patch),
                                  rank(cand.cls, cand.patch), cand.score});
    }
    std::sort(out.provenance.begin(), out.provenance.end(),
              [](const auto& a, const auto& b) { return a.patch_id < b.patch_id; });
    return out;
}

PatchCorpus apply_weak_labels(const PatchCorpus& corpus, const WeakLabeling& weak) {
    if (static_cast<int>(weak.image_labels.size()) != corpus.size())
        throw DataError("apply_weak_labels: labeling size does not match corpus");
    PatchCorpus out;
    out.width = corpus.width;
    out.height = corpus.height;
    out.n_classes = weak.n_classes;
    for (int c = 1; c <= weak.n_classes; ++c)
        out.class_names.push_back(
            c <= static_cast<int>(corpus.class_names.size())
                ? corpus.class_names[c - 1]
                : "class_" + std::to_string(c));
    for (int j = 0; j < corpus.size(); ++j) {
        if (weak.image_labels[j] == 0) continue;
        out.patches.push_back(corpus.patches[j]);
        out.class_labels.push_back(static_cast<std::uint16_t>(weak.image_labels[j]));
    }
    out.validate();
    return out;
}

void write_weak_labels_csv(const WeakLabeling& weak, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "patch_id,class_id,exemplar_id,rank,score\n";
    out.precision(12);
    for (const auto& p : weak.provenance)
        out << p.patch_id << ',' << p.class_id << ',' << p.exemplar_id << ','
            << p.rank << ',' << p.score << '\n';
}

}  // namespace seislabel
