#pragma once

#include <cstdint>

#include "fedgwc/matrix.hpp"

namespace fedgwc {

struct KMeansResult {
    std::vector<int> labels;
    Matrix centroids;
    double inertia = 0.0;
    int iterations = 0;
};

/// Seeded k-means++ followed by Lloyd iterations. Nearest-centroid ties break
/// toward the lowest centroid index; an emptied cluster is reseeded at the
/// point farthest from its assigned centroid. Stops on a relative inertia
/// improvement below tol or after max_iter rounds.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter = 100,
                    double tol = 1e-6);

}  // namespace fedgwc
