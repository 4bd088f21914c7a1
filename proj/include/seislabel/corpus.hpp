#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "seislabel/common.hpp"

namespace seislabel {

// One grayscale image patch, pixel values in [0,1], row-major storage.
using PatchImage = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Patch {
    int width = 0;   // columns
    int height = 0;  // rows
    PatchImage pixels;  // height x width

    void validate() const;
};

// Ordered collection of same-sized patches with optional image-level class
// labels (1..n_classes; empty vector = unlabeled corpus).
struct PatchCorpus {
    int width = 0;
    int height = 0;
    int n_classes = 0;                      // 0 = unlabeled
    std::vector<std::uint16_t> class_labels;  // per patch, in {1..n_classes}
    std::vector<std::string> class_names;     // n_classes entries (may be generic)
    std::vector<PatchImage> patches;          // each height x width

    int size() const { return static_cast<int>(patches.size()); }
    bool labeled() const { return n_classes > 0; }
    Patch patch(int i) const { return Patch{width, height, patches.at(i)}; }
    void validate() const;
};

// Per-pixel integer labels for a set of images: column n holds the row-major
// vectorized label image of patch n.  0 means "uncertain"/unassigned; classes
// are 1..n_classes.  C carries the matching per-pixel confidences (not
// persisted; set to 1 for ground-truth masks).
struct LabelField {
    int n_classes = 0;
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> Y;  // N_p x N_s
    Eigen::MatrixXd C;                                              // N_p x N_s

    void validate() const;
};

// A 3D raster of amplitudes; vertical 2D sections are the sampling substrate.
// Flat storage order: index = (i_inline * n_crossline + i_crossline) * n_depth
// + i_depth.
struct RasterVolume {
    int n_inline = 0;
    int n_crossline = 0;
    int n_depth = 0;
    std::vector<float> samples;

    float at(int il, int xl, int dp) const {
        return samples[(static_cast<std::size_t>(il) * n_crossline + xl) * n_depth + dp];
    }
    void validate() const;
};

// Affine rescale of the whole volume so min -> 0 and max -> 1.
RasterVolume normalize_volume(const RasterVolume& volume);

// `count` random size x size patches from uniformly chosen vertical sections
// (inline or crossline) at uniformly random positions.  Deterministic in seed.
PatchCorpus sample_patches(const RasterVolume& volume, int count, int size,
                           std::uint64_t seed);

// Deterministic procedural texture corpus (n_classes in 2..8, per_class each,
// square size x size patches) together with per-pixel ground-truth masks.
std::pair<PatchCorpus, LabelField> generate_synthetic_corpus(int n_classes,
                                                             int per_class,
                                                             int size,
                                                             std::uint64_t seed);

// Packed binary container IO.  Corpus files use magic "SLC1" (f32 pixels,
// optional u16 labels); mask files use magic "SLM1" (u8 labels).  Little
// endian throughout; see README for the byte layout.
void save_corpus(const PatchCorpus& corpus, const std::string& path);
PatchCorpus load_corpus(const std::string& path);

void save_label_field(const LabelField& field, int width, int height,
                      const std::string& path);
LabelField load_label_field(const std::string& path, int* width = nullptr,
                            int* height = nullptr);

// Shared helpers for the other packed-float payloads ("SLF1" feature sets,
// "SLS1" similarity matrices, "SLW1" wedge dumps): a `count` x `rows` x `cols`
// stack of row-major f32 planes.
void save_float_stack(const std::string& magic, const std::vector<Eigen::MatrixXf>& planes,
                      const std::string& path);
std::vector<Eigen::MatrixXf> load_float_stack(const std::string& magic,
                                              const std::string& path);

}  // namespace seislabel
