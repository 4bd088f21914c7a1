#include "seislabel/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seislabel/eval.hpp"
#include "seislabel/retrieval.hpp"

namespace fs = std::filesystem;

namespace seislabel {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key \"" + key + "\": cannot parse \"" + value +
                          "\" as a number");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key \"" + key + "\": cannot parse \"" + value +
                          "\" as an integer");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key \"" + key + "\": cannot parse \"" + value +
                      "\" as a boolean");
}

// Re-throw a stage's error with the stage name attached, keeping its type so
// the CLI exit code is preserved.
template <typename Fn>
void stage(const std::string& name, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(name + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(name + ": " + e.what());
    }
}

}  // namespace

void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "corpus") corpus_path = value;
    else if (key == "exemplars") exemplars_path = value;
    else if (key == "ground_truth") ground_truth_path = value;
    else if (key == "output_dir") output_dir = value;
    else if (key == "m") m = static_cast<int>(parse_int(key, value));
    else if (key == "measure") measure = parse_measure(value);
    else if (key == "k") nmf.k = static_cast<int>(parse_int(key, value));
    else if (key == "rho_w") nmf.rho_w = parse_double(key, value);
    else if (key == "tau") nmf.tau = parse_double(key, value);
    else if (key == "lambda1") nmf.lambda1 = parse_double(key, value);
    else if (key == "lambda2") nmf.lambda2 = parse_double(key, value);
    else if (key == "gamma") nmf.gamma = parse_double(key, value);
    else if (key == "iterations") nmf.iterations = static_cast<int>(parse_int(key, value));
    else if (key == "epsilon") nmf.epsilon = parse_double(key, value);
    else if (key == "eval") run_eval = parse_bool(key, value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
    else throw ConfigError("unknown config key \"" + key + "\"");
}

void PipelineConfig::validate() const {
    if (corpus_path.empty()) throw ConfigError("config: \"corpus\" is required");
    if (!fs::exists(corpus_path))
        throw ConfigError("config: corpus path does not exist: " + corpus_path);
    if (exemplars_path.empty())
        throw ConfigError("config: \"exemplars\" is required");
    if (!fs::exists(exemplars_path))
        throw ConfigError("config: exemplars path does not exist: " + exemplars_path);
    if (!ground_truth_path.empty() && !fs::exists(ground_truth_path))
        throw ConfigError("config: ground_truth path does not exist: " +
                          ground_truth_path);
    if (m < 1) throw ConfigError("config: m must be >= 1");
    nmf.validate();
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    PipelineConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            config.apply(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

void save_pipeline_config(const PipelineConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << "corpus = " << config.corpus_path << '\n'
        << "exemplars = " << config.exemplars_path << '\n';
    if (!config.ground_truth_path.empty())
        out << "ground_truth = " << config.ground_truth_path << '\n';
    out << "output_dir = " << config.output_dir << '\n'
        << "m = " << config.m << '\n'
        << "measure = " << measure_name(config.measure) << '\n'
        << "k = " << config.nmf.k << '\n'
        << "rho_w = " << config.nmf.rho_w << '\n'
        << "tau = " << config.nmf.tau << '\n'
        << "lambda1 = " << config.nmf.lambda1 << '\n'
        << "lambda2 = " << config.nmf.lambda2 << '\n'
        << "gamma = " << config.nmf.gamma << '\n'
        << "iterations = " << config.nmf.iterations << '\n'
        << "epsilon = " << config.nmf.epsilon << '\n'
        << "eval = " << (config.run_eval ? "true" : "false") << '\n'
        << "seed = " << config.seed << '\n';
}

std::vector<std::vector<Patch>> load_exemplars(const std::string& path,
                                               int expected_width,
                                               int expected_height) {
    std::vector<std::vector<Patch>> exemplars;
    auto check = [&](const Patch& p, const std::string& origin) {
        if (p.width != expected_width || p.height != expected_height)
            throw DataError("exemplars " + origin + ": patch is " +
                            std::to_string(p.width) + "x" + std::to_string(p.height) +
                            " but the corpus is " + std::to_string(expected_width) +
                            "x" + std::to_string(expected_height));
    };

    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.path().extension() == ".slc1") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw DataError("exemplars directory " + path + " has no .slc1 files");
        for (const auto& file : files) {
            PatchCorpus c = load_corpus(file.string());
            std::vector<Patch> cls;
            for (int i = 0; i < c.size(); ++i) {
                Patch p = c.patch(i);
                check(p, file.string());
                cls.push_back(std::move(p));
            }
            exemplars.push_back(std::move(cls));
        }
        return exemplars;
    }

    PatchCorpus c = load_corpus(path);
    if (!c.labeled())
        throw DataError("exemplar corpus " + path +
                        " has no class labels (use a labeled file or a directory)");
    exemplars.resize(c.n_classes);
    for (int i = 0; i < c.size(); ++i) {
        Patch p = c.patch(i);
        check(p, path);
        exemplars[c.class_labels[i] - 1].push_back(std::move(p));
    }
    for (int cls = 0; cls < c.n_classes; ++cls)
        if (exemplars[cls].empty())
            throw DataError("exemplar corpus " + path + ": class " +
                            std::to_string(cls + 1) + " has no patches");
    return exemplars;
}

void run_pipeline(const PipelineConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);
    auto out_path = [&](const std::string& name) {
        return (fs::path(config.output_dir) / name).string();
    };

    PatchCorpus corpus;
    std::vector<std::vector<Patch>> exemplars;
    stage("load", [&] {
        corpus = load_corpus(config.corpus_path);
        exemplars = load_exemplars(config.exemplars_path, corpus.width, corpus.height);
    });

    WeakLabeling weak;
    PatchCorpus labeled;
    stage("retrieve", [&] {
        weak = assign_image_labels(exemplars, corpus, config.m, config.measure);
        write_weak_labels_csv(weak, out_path("weak_labels.csv"));
        labeled = apply_weak_labels(corpus, weak);
        save_corpus(labeled, out_path("labeled_corpus.slc1"));
        std::cout << "[retrieve] labeled " << labeled.size() << " of "
                  << corpus.size() << " patches across " << weak.n_classes
                  << " classes\n";
    });

    DataMatrix data;
    FactorizeResult factorized;
    LabelField labels;
    stage("labelmap", [&] {
        data = assemble_data_matrix(labeled);
        NmfConfig cfg = config.nmf;
        cfg.seed = derive_seed(config.seed, 1);
        factorized = factorize(data, cfg);
        write_trace_csv(factorized.trace, out_path("convergence.csv"));
        labels = extract_labels(factorized.factors.W, factorized.factors.H,
                                factorized.Q, cfg.tau);
        median_filter_labels(labels, data.width, data.height);
        save_label_field(labels, data.width, data.height, out_path("labels.slm1"));
        std::cout << "[labelmap] factorized " << data.X.rows() << "x" << data.X.cols()
                  << " with " << factorized.factors.W.cols() << " features; objective "
                  << factorized.trace.overall.front() << " -> "
                  << factorized.trace.overall.back() << "\n";
    });

    if (config.run_eval) {
        stage("evaluate", [&] {
            MetricsReport report = evaluate_measures(
                labeled, {Measure::CurveletSvd, Measure::Euclidean},
                labeled.n_classes, derive_seed(config.seed, 2));
            write_metrics_csv(report, out_path("metrics.csv"));
            write_pm_csv(report, out_path("precision_at_m.csv"));
            write_roc_csv(report, out_path("roc.csv"));
            for (const auto& row : report.rows)
                std::cout << "[evaluate] " << row.measure << ": RA " << row.ra
                          << ", MAP " << row.map << ", AUC " << row.auc << ", Rand "
                          << row.rand << "\n";
        });
    }

    if (!config.ground_truth_path.empty()) {
        stage("accuracy", [&] {
            int w = 0, h = 0;
            LabelField truth = load_label_field(config.ground_truth_path, &w, &h);
            if (w != data.width || h != data.height)
                throw DataError("ground truth geometry does not match corpus");
            // The pipeline's ground truth covers the whole input corpus; keep
            // the columns that survived weak labeling, in corpus order.
            std::vector<int> kept;
            for (std::size_t i = 0; i < weak.image_labels.size(); ++i)
                if (weak.image_labels[i] != 0) kept.push_back(static_cast<int>(i));
            if (truth.Y.cols() == static_cast<Eigen::Index>(weak.image_labels.size()) &&
                static_cast<int>(kept.size()) != static_cast<int>(truth.Y.cols())) {
                Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> sub(
                    truth.Y.rows(), kept.size());
                for (std::size_t i = 0; i < kept.size(); ++i)
                    sub.col(static_cast<Eigen::Index>(i)) = truth.Y.col(kept[i]);
                truth.Y = sub;
                truth.C = Eigen::MatrixXd::Ones(truth.Y.rows(), truth.Y.cols());
            }
            if (truth.Y.cols() != labels.Y.cols())
                throw DataError("ground truth image count does not match labeled corpus");
            Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ignore(
                labels.Y.rows(), labels.Y.cols());
            for (Eigen::Index n = 0; n < ignore.cols(); ++n)
                for (Eigen::Index i = 0; i < ignore.rows(); ++i)
                    ignore(i, n) = labels.Y(i, n) == 0 || truth.Y(i, n) == 0;
            double acc = pixel_accuracy(labels.Y, truth.Y, ignore);
            std::ofstream out(out_path("accuracy.csv"), std::ios::trunc);
            out << "masked_pixel_accuracy\n" << acc << "\n";
            std::cout << "[accuracy] masked pixel accuracy " << acc << "\n";
        });
    }

    save_pipeline_config(config, out_path("config.used"));
}

}  // namespace seislabel
