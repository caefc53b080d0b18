#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "fedgwc/interaction.hpp"
#include "fedgwc/matrix.hpp"

namespace fedgwc {

/// Result of one split decision. labels index clients in the order of the
/// interaction state they were derived from; db_scores keeps the
/// Davies-Bouldin value of every candidate cluster count that was tried.
struct ClusteringOutcome {
    std::map<ClientId, int> labels;
    int n_cl = 1;
    std::map<int, double> db_scores;
};

/// Normalized spectral clustering: embed rows with the top-n eigenvectors of
/// D^{-1/2} W D^{-1/2}, row-normalize, then seeded k-means. Labels are
/// canonicalized (clusters ordered by their lexicographically smallest
/// embedding row) so relabeling clients permutes the output consistently.
std::vector<int> spectral_clustering(const AffinityMatrix& affinity, int n, std::uint64_t seed);

/// Davies-Bouldin score over arbitrary feature rows: mean over clusters of the
/// worst (S_i + S_j) / D_ij ratio. Coinciding centroids yield +infinity.
double davies_bouldin(const Matrix& features, const std::vector<int>& labels);

/// Full split decision: build W, try n = 2..min(n_max, K-1), score each
/// labeling with Davies-Bouldin on the rows of W, discard candidates with a
/// cluster smaller than k_min, and keep the best admissible candidate only if
/// its score is <= 1; otherwise report a single cluster.
ClusteringOutcome fedgw_cluster(const InteractionState& state, double beta, int n_max,
                                std::uint64_t seed, int k_min);

}  // namespace fedgwc
