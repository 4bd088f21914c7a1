#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "seislabel/common.hpp"

namespace seislabel {

struct KMeansResult {
    Eigen::MatrixXd centroids;        // dim x k
    std::vector<int> assignment;      // per point, in 0..k-1
    int iterations = 0;
};

// Seeded k-means++ initialization followed by Lloyd iterations (at most
// max_iters, stopping when the largest relative centroid shift drops below
// shift_tol).  Points are columns.  Deterministic for a fixed seed: ties in
// nearest-centroid assignment go to the lower centroid index, empty clusters
// are reseeded to the point farthest from its centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int max_iters = 100, double shift_tol = 1e-6);

}  // namespace seislabel
