#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "seislabel/common.hpp"
#include "seislabel/corpus.hpp"

namespace seislabel {

// Number of scales in the tiling: ceil(log2(min(n1,n2)) - 3).  Scale 0 is the
// isotropic low-pass ring; scales 1..J-1 are directional coronae of dyadically
// increasing radius, scale J-1 being the finest.
int num_scales(int n1, int n2);

// Orientation count of a full annulus: 1 at scale 0, 16*2^ceil((j-1)/2) for
// j >= 1.  Because the spectrum of a real image is conjugate-symmetric, only
// the wedges of two consecutive quadrants (half of each annulus) are actually
// produced by the transform.
int num_orientations(int j);

// One frequency wedge: a smooth window over a contiguous block of the
// centered frequency grid.  `row0`/`col0` are centered frequency coordinates
// (DC at 0); the window array is `win(r, c)` for frequency (row0+r, col0+c).
struct Wedge {
    int scale = 0;
    int orientation = 0;
    int row0 = 0, col0 = 0;
    Eigen::ArrayXXd win;
};

// The complete smooth tiling of the n1 x n2 frequency plane.  `wedges` holds
// every orientation of every scale in (scale, orientation) order; the squared
// windows sum to exactly 1 at every frequency bin.  `retained(i)` marks the
// wedges the transform keeps under the conjugate-symmetry reduction: all of
// scale 0 plus orientations 0..K/2-1 of each directional scale.
class FrequencyTiling {
public:
    FrequencyTiling(int n1, int n2);

    int rows() const { return n1_; }
    int cols() const { return n2_; }
    int scales() const { return J_; }
    int orientations(int scale) const { return orientations_.at(scale); }
    const std::vector<Wedge>& wedges() const { return wedges_; }
    bool retained(std::size_t wedge_index) const;
    int retained_count() const;

    // Sum over all wedges of win^2 at one frequency bin (centered coords);
    // 1 everywhere for a valid tiling.
    double window_energy_at(int k1, int k2) const;

private:
    int n1_, n2_, J_;
    std::vector<int> orientations_;
    std::vector<Wedge> wedges_;
};

// Coefficients of one patch: a complex matrix per retained wedge, in tiling
// order.  Wedge i of `coeffs` corresponds to `geometry->wedges()[index[i]]`.
struct CurveletCoeffs {
    std::shared_ptr<const FrequencyTiling> geometry;
    std::vector<std::size_t> wedge_index;           // into geometry->wedges()
    std::vector<Eigen::MatrixXcd> coeffs;

    double wedge_energy(std::size_t i) const { return coeffs[i].squaredNorm(); }
    // Total frame energy, counting each directional wedge twice for its
    // conjugate mirror; equals the image energy for real input.
    double total_energy() const;
};

// Forward transform for one fixed patch geometry: FFT, per-wedge windowing,
// crop to the wedge's bounding box, unitary inverse FFT.  The instance owns
// FFT plans and scratch buffers, so one instance must not be shared across
// threads; the tiling it exposes is immutable and freely shareable.
class CurveletTransform {
public:
    CurveletTransform(int n1, int n2);
    ~CurveletTransform();
    CurveletTransform(const CurveletTransform&) = delete;
    CurveletTransform& operator=(const CurveletTransform&) = delete;

    const FrequencyTiling& tiling() const { return *tiling_; }
    std::shared_ptr<const FrequencyTiling> tiling_ptr() const { return tiling_; }

    CurveletCoeffs forward(const Patch& patch);
    CurveletCoeffs forward(const PatchImage& pixels);

private:
    struct Impl;
    std::shared_ptr<const FrequencyTiling> tiling_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace seislabel
