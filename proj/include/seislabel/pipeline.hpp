#pragma once

#include <string>
#include <vector>

#include "seislabel/common.hpp"
#include "seislabel/features.hpp"
#include "seislabel/labelmap.hpp"

namespace seislabel {

// Flat key=value experiment description; every numeric key can be overridden
// from the command line.  See README for the key list.
struct PipelineConfig {
    std::string corpus_path;
    std::string exemplars_path;    // packed corpus file or directory of them
    std::string ground_truth_path; // optional SLM1 masks for accuracy reporting
    std::string output_dir = ".";
    int m = 500;
    Measure measure = Measure::CurveletSvd;
    NmfConfig nmf;
    bool run_eval = true;
    std::uint64_t seed = 0;

    void apply(const std::string& key, const std::string& value);
    void validate() const;
};

PipelineConfig load_pipeline_config(const std::string& path);
void save_pipeline_config(const PipelineConfig& config, const std::string& path);

// Load exemplars grouped per class: either a labeled packed corpus (classes
// from its labels) or a directory whose *.slc1 files each hold one class.
std::vector<std::vector<Patch>> load_exemplars(const std::string& path,
                                               int expected_width,
                                               int expected_height);

// retrieve -> assemble -> factorize -> extract -> evaluate, writing all
// artifacts into config.output_dir.
void run_pipeline(const PipelineConfig& config);

}  // namespace seislabel
