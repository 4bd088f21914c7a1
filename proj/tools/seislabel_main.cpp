#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "seislabel/eval.hpp"
#include "seislabel/pipeline.hpp"
#include "seislabel/retrieval.hpp"

namespace fs = std::filesystem;
using namespace seislabel;

namespace {

int dispatch(CLI::App& app, int argc, char** argv) {
    std::string sub;

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a synthetic texture corpus");
    int s_classes = 4, s_per_class = 50, s_size = 64;
    std::uint64_t s_seed = 0;
    std::string s_out = "corpus.slc1", s_truth;
    synth->add_option("--classes", s_classes, "Number of texture classes (2..8)");
    synth->add_option("--per-class", s_per_class, "Patches per class");
    synth->add_option("--size", s_size, "Patch size in pixels (>= 16)");
    synth->add_option("--seed", s_seed, "Root random seed");
    synth->add_option("--out", s_out, "Output corpus path (.slc1)");
    synth->add_option("--truth", s_truth, "Optional ground-truth mask path (.slm1)");

    // ---- features ----
    auto* features = app.add_subcommand("features", "Feature vectors and similarity matrix");
    std::string f_corpus, f_features_out, f_similarity_out, f_csv_out;
    std::string f_measure = "curvelet-svd";
    features->add_option("--corpus", f_corpus, "Input corpus (.slc1)")->required();
    features->add_option("--measure", f_measure, "curvelet-svd or euclidean");
    features->add_option("--features-out", f_features_out, "Feature vectors (.slf1, curvelet-svd only)");
    features->add_option("--similarity-out", f_similarity_out, "Similarity matrix (.sls1)");
    features->add_option("--csv-out", f_csv_out, "Similarity matrix as CSV");

    // ---- retrieve ----
    auto* retrieve = app.add_subcommand("retrieve", "Exemplar retrieval and weak labels");
    std::string r_corpus, r_exemplars, r_out = "weak_labels.csv", r_labeled_out;
    std::string r_measure = "curvelet-svd";
    int r_m = 500;
    retrieve->add_option("--corpus", r_corpus, "Input corpus (.slc1)")->required();
    retrieve->add_option("--exemplars", r_exemplars,
                         "Labeled corpus file or directory of per-class .slc1 files")
        ->required();
    retrieve->add_option("--m", r_m, "Patches to label per class");
    retrieve->add_option("--measure", r_measure, "curvelet-svd or euclidean");
    retrieve->add_option("--out", r_out, "Weak label CSV path");
    retrieve->add_option("--labeled-out", r_labeled_out, "Weakly-labeled corpus (.slc1)");

    // ---- labelmap ----
    auto* labelmap = app.add_subcommand("labelmap", "Weak-to-pixel label mapping (NMF)");
    std::string l_corpus, l_labels_out = "labels.slm1", l_trace_out = "convergence.csv";
    NmfConfig l_cfg;
    labelmap->add_option("--corpus", l_corpus, "Weakly-labeled corpus (.slc1)")->required();
    labelmap->add_option("--k", l_cfg.k, "Features per class");
    labelmap->add_option("--rho-w", l_cfg.rho_w, "Initial feature sparsity target");
    labelmap->add_option("--tau", l_cfg.tau, "Confidence threshold");
    labelmap->add_option("--iters", l_cfg.iterations, "Update iterations");
    labelmap->add_option("--lambda1", l_cfg.lambda1, "W regularization weight");
    labelmap->add_option("--lambda2", l_cfg.lambda2, "H regularization weight");
    labelmap->add_option("--gamma", l_cfg.gamma, "Row-orthogonality weight");
    labelmap->add_option("--epsilon", l_cfg.epsilon, "Update division guard");
    labelmap->add_option("--seed", l_cfg.seed, "Root random seed");
    labelmap->add_option("--labels-out", l_labels_out, "Pixel labels (.slm1)");
    labelmap->add_option("--trace-out", l_trace_out, "Objective trace CSV");

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "Retrieval/clustering metrics");
    std::string e_corpus, e_out_dir = ".";
    std::vector<std::string> e_measures;
    std::uint64_t e_seed = 0;
    int e_clusters = 0;
    std::vector<int> e_robust_k;
    std::vector<double> e_fractions;
    int e_trials = 3;
    std::string e_truth;
    evaluate->add_option("--corpus", e_corpus, "Labeled corpus (.slc1)")->required();
    evaluate->add_option("--measure", e_measures,
                         "curvelet-svd or euclidean (repeatable; default both)");
    evaluate->add_option("--clusters", e_clusters, "Clusters for the Rand index (default: class count)");
    evaluate->add_option("--seed", e_seed, "Root random seed");
    evaluate->add_option("--out-dir", e_out_dir, "Directory for metric CSVs");
    evaluate->add_option("--robustness-k", e_robust_k,
                         "Run the mislabel-robustness sweep for these k values (needs --truth)");
    evaluate->add_option("--fractions", e_fractions, "Replacement fractions (default 0 0.1 0.2)");
    evaluate->add_option("--trials", e_trials, "Random trials per nonzero fraction");
    evaluate->add_option("--truth", e_truth, "Ground-truth masks (.slm1) for the sweep");

    // ---- pipeline ----
    auto* pipeline = app.add_subcommand("pipeline", "Run retrieve -> labelmap -> evaluate");
    std::string p_config;
    std::vector<std::string> p_sets;
    pipeline->add_option("--config", p_config, "Flat key=value config file")->required();
    pipeline->add_option("--set", p_sets, "Override a config key, e.g. --set k=150 (repeatable)");

    app.require_subcommand(1);
    app.parse(argc, argv);

    if (synth->parsed()) {
        auto [corpus, truth] = generate_synthetic_corpus(s_classes, s_per_class, s_size, s_seed);
        save_corpus(corpus, s_out);
        std::cout << "wrote " << corpus.size() << " patches to " << s_out << "\n";
        if (!s_truth.empty()) {
            save_label_field(truth, s_size, s_size, s_truth);
            std::cout << "wrote ground-truth masks to " << s_truth << "\n";
        }
        return 0;
    }

    if (features->parsed()) {
        PatchCorpus corpus = load_corpus(f_corpus);
        Measure measure = parse_measure(f_measure);
        if (!f_features_out.empty()) {
            if (measure != Measure::CurveletSvd)
                throw ConfigError("--features-out requires --measure curvelet-svd");
            save_features(corpus_features(corpus), f_features_out);
            std::cout << "wrote feature vectors to " << f_features_out << "\n";
        }
        if (!f_similarity_out.empty() || !f_csv_out.empty()) {
            Eigen::MatrixXd S = similarity_matrix(corpus, measure);
            if (!f_similarity_out.empty()) {
                save_similarity(S, f_similarity_out);
                std::cout << "wrote similarity matrix to " << f_similarity_out << "\n";
            }
            if (!f_csv_out.empty()) {
                write_matrix_csv(S, f_csv_out);
                std::cout << "wrote similarity CSV to " << f_csv_out << "\n";
            }
        }
        return 0;
    }

    if (retrieve->parsed()) {
        PatchCorpus corpus = load_corpus(r_corpus);
        auto exemplars = load_exemplars(r_exemplars, corpus.width, corpus.height);
        WeakLabeling weak =
            assign_image_labels(exemplars, corpus, r_m, parse_measure(r_measure));
        write_weak_labels_csv(weak, r_out);
        std::cout << "wrote weak labels to " << r_out << "\n";
        if (!r_labeled_out.empty()) {
            save_corpus(apply_weak_labels(corpus, weak), r_labeled_out);
            std::cout << "wrote weakly-labeled corpus to " << r_labeled_out << "\n";
        }
        return 0;
    }

    if (labelmap->parsed()) {
        PatchCorpus corpus = load_corpus(l_corpus);
        DataMatrix data = assemble_data_matrix(corpus);
        FactorizeResult result = factorize(data, l_cfg);
        write_trace_csv(result.trace, l_trace_out);
        LabelField labels = extract_labels(result.factors.W, result.factors.H,
                                           result.Q, l_cfg.tau);
        median_filter_labels(labels, data.width, data.height);
        save_label_field(labels, data.width, data.height, l_labels_out);
        std::cout << "objective " << result.trace.overall.front() << " -> "
                  << result.trace.overall.back() << "; wrote " << l_labels_out
                  << " and " << l_trace_out << "\n";
        return 0;
    }

    if (evaluate->parsed()) {
        PatchCorpus corpus = load_corpus(e_corpus);
        fs::create_directories(e_out_dir);
        auto out_path = [&](const std::string& name) {
            return (fs::path(e_out_dir) / name).string();
        };
        std::vector<Measure> measures;
        for (const auto& name : e_measures) measures.push_back(parse_measure(name));
        if (measures.empty())
            measures = {Measure::CurveletSvd, Measure::Euclidean};
        int clusters = e_clusters > 0 ? e_clusters : corpus.n_classes;
        MetricsReport report = evaluate_measures(corpus, measures, clusters, e_seed);
        write_metrics_csv(report, out_path("metrics.csv"));
        write_pm_csv(report, out_path("precision_at_m.csv"));
        write_roc_csv(report, out_path("roc.csv"));
        for (const auto& row : report.rows)
            std::cout << row.measure << ": RA " << row.ra << ", MAP " << row.map
                      << ", AUC " << row.auc << ", Rand " << row.rand << "\n";

        if (!e_robust_k.empty()) {
            if (e_truth.empty())
                throw ConfigError("--robustness-k requires --truth");
            LabelField truth = load_label_field(e_truth);
            if (e_fractions.empty()) e_fractions = {0.0, 0.1, 0.2};
            std::vector<SweepPoint> grid;
            for (int k : e_robust_k) {
                NmfConfig cfg;
                cfg.k = k;
                grid.push_back({cfg, "k", static_cast<double>(k)});
            }
            auto curves = robustness_sweep(corpus, truth, grid, e_fractions,
                                           e_trials, e_seed);
            write_robustness_csv(curves, out_path("robustness.csv"));
            std::cout << "wrote robustness sweep to " << out_path("robustness.csv")
                      << "\n";
        }
        return 0;
    }

    // pipeline
    PipelineConfig config = load_pipeline_config(p_config);
    for (const std::string& kv : p_sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got \"" + kv + "\"");
        config.apply(kv.substr(0, eq), kv.substr(eq + 1));
    }
    run_pipeline(config);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weakly-supervised pixel labeling of grayscale image patches"};
    try {
        return dispatch(app, argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
