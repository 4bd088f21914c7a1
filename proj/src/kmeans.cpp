#include "seislabel/kmeans.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace seislabel {

namespace {

// Index sampled proportionally to `weights` using one uniform draw; all-zero
// weights fall back to the first index not yet used as a center.
int weighted_pick(const Eigen::VectorXd& weights, std::mt19937_64& rng) {
    double total = weights.sum();
    if (total <= 0.0) return -1;
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    for (int i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u <= acc && weights[i] > 0.0) return i;
    }
    for (int i = static_cast<int>(weights.size()) - 1; i >= 0; --i)
        if (weights[i] > 0.0) return i;
    return -1;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int max_iters, double shift_tol) {
    int n = static_cast<int>(points.cols());
    if (k < 1) throw ConfigError("kmeans: k must be >= 1");
    if (n < k)
        throw DataError("kmeans: " + std::to_string(n) + " points for k = " +
                        std::to_string(k));

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centroids(points.rows(), k);
    std::vector<char> used(n, 0);

    // k-means++ seeding: first center uniform, the rest proportional to the
    // squared distance to the nearest existing center.
    int first = std::uniform_int_distribution<int>(0, n - 1)(rng);
    centroids.col(0) = points.col(first);
    used[first] = 1;
    Eigen::VectorXd d2(n);
    for (int i = 0; i < n; ++i)
        d2[i] = (points.col(i) - centroids.col(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
        int pick = weighted_pick(d2, rng);
        if (pick < 0) {  // all remaining points coincide with chosen centers
            pick = 0;
            while (pick < n && used[pick]) ++pick;
        }
        used[pick] = 1;
        centroids.col(c) = points.col(pick);
        for (int i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], (points.col(i) - centroids.col(c)).squaredNorm());
    }

    KMeansResult result;
    result.assignment.assign(n, 0);
    std::vector<int> count(k, 0);
    Eigen::VectorXd point_dist(n);

    for (int iter = 0; iter < max_iters; ++iter) {
        result.iterations = iter + 1;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = (points.col(i) - centroids.col(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            result.assignment[i] = best;
            point_dist[i] = best_d;
        }

        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(points.rows(), k);
        std::fill(count.begin(), count.end(), 0);
        for (int i = 0; i < n; ++i) {
            next.col(result.assignment[i]) += points.col(i);
            ++count[result.assignment[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) {
                next.col(c) /= count[c];
            } else {
                // Reseed an empty cluster to the point farthest from its
                // current centroid (deterministic: lowest index on ties).
                int far = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i)
                    if (point_dist[i] > far_d) {
                        far_d = point_dist[i];
                        far = i;
                    }
                next.col(c) = points.col(far);
                point_dist[far] = 0.0;
            }
        }

        double max_shift = 0.0;
        for (int c = 0; c < k; ++c) {
            double ref = centroids.col(c).norm();
            double shift = (next.col(c) - centroids.col(c)).norm() / (ref + 1e-15);
            max_shift = std::max(max_shift, shift);
        }
        centroids = next;
        if (max_shift <= shift_tol) break;
    }

    // Final assignment against the converged centroids.
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            double d = (points.col(i) - centroids.col(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        result.assignment[i] = best;
    }
    result.centroids = std::move(centroids);
    return result;
}

}  // namespace seislabel
