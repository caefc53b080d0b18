#include "fedgwc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fedgwc/jacobi.hpp"
#include "fedgwc/kmeans.hpp"

namespace fedgwc {

namespace {

// Relabel clusters by the lexicographic order of their smallest member row so
// that the labeling does not depend on the order clients were listed in.
std::vector<int> canonicalize_labels(const std::vector<int>& labels, const Matrix& rows, int k) {
    const std::size_t n = labels.size();
    struct Key {
        std::vector<double> min_row;
        std::size_t first_member = 0;
        int cluster = 0;
        bool used = false;
    };
    std::vector<Key> keys(k);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = labels[i];
        std::vector<double> row(rows.row_data(i), rows.row_data(i) + rows.cols());
        if (!keys[c].used || row < keys[c].min_row) {
            if (!keys[c].used) keys[c].first_member = i;
            keys[c].min_row = std::move(row);
            keys[c].used = true;
        }
        keys[c].cluster = c;
    }
    std::vector<int> order;
    for (int c = 0; c < k; ++c)
        if (keys[c].used) order.push_back(c);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        if (keys[x].min_row != keys[y].min_row) return keys[x].min_row < keys[y].min_row;
        return keys[x].first_member < keys[y].first_member;
    });
    std::vector<int> remap(k, -1);
    for (std::size_t pos = 0; pos < order.size(); ++pos) remap[order[pos]] = static_cast<int>(pos);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = remap[labels[i]];
    return out;
}

}  // namespace

std::vector<int> spectral_clustering(const AffinityMatrix& affinity, int n, std::uint64_t seed) {
    const Matrix& W = affinity.W;
    const std::size_t K = W.rows();
    if (W.cols() != K) throw ShapeError("affinity matrix must be square");
    if (n < 2 || static_cast<std::size_t>(n) >= K)
        throw DomainError("cluster count must satisfy 2 <= n < K, got n=" + std::to_string(n) +
                          " K=" + std::to_string(K));
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j)
            if (W(i, j) != W(j, i)) throw DomainError("affinity matrix must be symmetric");

    // Symmetric normalization D^{-1/2} W D^{-1/2}; diag(W)=1 keeps degrees > 0.
    std::vector<double> inv_sqrt_deg(K);
    for (std::size_t i = 0; i < K; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < K; ++j) deg += W(i, j);
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }
    Matrix M(K, K);
    for (std::size_t i = 0; i < K; ++i) {
        M(i, i) = W(i, i) * inv_sqrt_deg[i] * inv_sqrt_deg[i];
        for (std::size_t j = i + 1; j < K; ++j) {
            const double m = W(i, j) * inv_sqrt_deg[i] * inv_sqrt_deg[j];
            M(i, j) = m;
            M(j, i) = m;
        }
    }

    const EigenDecomposition dec = jacobi_eigen(M);

    // Rows of the top-n eigenvector block, normalized to the unit sphere.
    Matrix emb(K, static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < K; ++i) {
        double norm = 0.0;
        for (int c = 0; c < n; ++c) {
            const double x = dec.vectors(i, static_cast<std::size_t>(c));
            emb(i, static_cast<std::size_t>(c)) = x;
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (int c = 0; c < n; ++c) emb(i, static_cast<std::size_t>(c)) /= norm;
    }

    const KMeansResult km = kmeans(emb, n, seed);
    return canonicalize_labels(km.labels, emb, n);
}

double davies_bouldin(const Matrix& features, const std::vector<int>& labels) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    if (labels.size() != n) throw ShapeError("one label per feature row required");
    const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    if (k < 2) throw DomainError("Davies-Bouldin needs at least 2 clusters");

    Matrix centroid(static_cast<std::size_t>(k), d);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++count[labels[i]];
        for (std::size_t j = 0; j < d; ++j) centroid(labels[i], j) += features(i, j);
    }
    for (int c = 0; c < k; ++c) {
        if (count[c] == 0) throw DomainError("Davies-Bouldin requires non-empty clusters");
        for (std::size_t j = 0; j < d; ++j) centroid(c, j) /= static_cast<double>(count[c]);
    }

    // S_i: mean member-to-centroid distance.
    std::vector<double> spread(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = features(i, j) - centroid(labels[i], j);
            sq += diff * diff;
        }
        spread[labels[i]] += std::sqrt(sq);
    }
    for (int c = 0; c < k; ++c) spread[c] /= static_cast<double>(count[c]);

    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = centroid(i, c) - centroid(j, c);
                sq += diff * diff;
            }
            const double dist = std::sqrt(sq);
            const double ratio = dist == 0.0 ? std::numeric_limits<double>::infinity()
                                             : (spread[i] + spread[j]) / dist;
            worst = std::max(worst, ratio);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

ClusteringOutcome fedgw_cluster(const InteractionState& state, double beta, int n_max,
                                std::uint64_t seed, int k_min) {
    const std::size_t K = state.size();
    if (K < 3) throw CohortError("clustering needs at least 3 clients");
    if (n_max < 2) throw ConfigError("n_max must be at least 2, got " + std::to_string(n_max));
    if (k_min < 1) throw ConfigError("k_min must be at least 1, got " + std::to_string(k_min));

    const AffinityMatrix affinity = build_affinity(state, beta);

    ClusteringOutcome outcome;
    const int n_hi = std::min<int>(n_max, static_cast<int>(K) - 1);
    std::map<int, std::vector<int>> labelings;
    int best_n = 0;
    double best_db = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= n_hi; ++n) {
        std::vector<int> labels = spectral_clustering(affinity, n, seed);
        std::vector<std::size_t> sizes(n, 0);
        for (int c : labels) ++sizes[c];
        const std::size_t smallest = *std::min_element(sizes.begin(), sizes.end());
        const double db = smallest == 0 ? std::numeric_limits<double>::infinity()
                                        : davies_bouldin(affinity.W, labels);
        outcome.db_scores[n] = db;
        const bool admissible = smallest >= static_cast<std::size_t>(k_min);
        if (admissible && db < best_db) {
            best_db = db;
            best_n = n;
        }
        labelings[n] = std::move(labels);
    }

    if (best_n == 0 || best_db > 1.0) {
        outcome.n_cl = 1;
        for (ClientId id : state.clients) outcome.labels[id] = 0;
        return outcome;
    }

    outcome.n_cl = best_n;
    const std::vector<int>& chosen = labelings[best_n];
    for (std::size_t i = 0; i < K; ++i) outcome.labels[state.clients[i]] = chosen[i];
    return outcome;
}

}  // namespace fedgwc
