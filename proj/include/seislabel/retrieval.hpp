#pragma once

#include <string>
#include <vector>

#include "seislabel/corpus.hpp"
#include "seislabel/features.hpp"

namespace seislabel {

struct RetrievalResult {
    int query_id = -1;               // corpus index, or -1 for external queries
    std::vector<int> ranked_ids;     // similarity non-increasing, ties by index
    std::vector<double> scores;
};

// Per-patch weak class labels produced by exemplar retrieval.
struct WeakLabeling {
    std::vector<int> image_labels;   // 0 = unlabeled, else 1..n_classes
    struct Provenance {
        int patch_id = -1;
        int class_id = 0;
        int exemplar_id = -1;        // index into the flattened exemplar list
        int rank = 0;                // 1-based rank in that class's retrieval
        double score = 0.0;
    };
    std::vector<Provenance> provenance;  // one entry per labeled patch
    int n_classes = 0;
};

// Rank all corpus patches against an external query patch.
RetrievalResult retrieve_top_m(const Patch& query, const PatchCorpus& corpus,
                               int m, Measure measure);

// Rank against corpus member `query_index`, excluding the query itself.
RetrievalResult retrieve_top_m(const PatchCorpus& corpus, int query_index,
                               int m, Measure measure);

// Per class: combine exemplar similarities by max, rank, and keep the top M
// distinct patches.  A patch ranked by several classes goes to its highest
// scoring class (ties to the lower class index); each class then fills up to
// M patches in rank order, so every class gets exactly M unless the corpus
// runs out of unassigned patches.
WeakLabeling assign_image_labels(const std::vector<std::vector<Patch>>& exemplars,
                                 const PatchCorpus& corpus, int m, Measure measure);

// Corpus with the weak labels attached (unlabeled patches dropped).
PatchCorpus apply_weak_labels(const PatchCorpus& corpus, const WeakLabeling& weak);

void write_weak_labels_csv(const WeakLabeling& weak, const std::string& path);

}  // namespace seislabel
