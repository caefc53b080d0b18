#include "fedgwc/kmeans.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace fedgwc {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

// Cumulative-weight draw; deterministic walk instead of std::discrete_distribution.
std::size_t draw_weighted(const std::vector<double>& w, double total, std::mt19937_64& eng) {
    std::uniform_real_distribution<double> uni(0.0, total);
    const double r = uni(eng);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (r < acc) return i;
    }
    return w.size() - 1;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter, double tol) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw DomainError("k must lie in [1, n_points], got " + std::to_string(k));

    auto eng = make_engine(seed);
    Matrix centroids(static_cast<std::size_t>(k), d);

    // k-means++ seeding
    {
        std::uniform_int_distribution<std::size_t> uni(0, n - 1);
        std::size_t first = uni(eng);
        for (std::size_t j = 0; j < d; ++j) centroids(0, j) = points(first, j);
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        for (int c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double ds = sq_dist(points.row_data(i), centroids.row_data(c - 1), d);
                if (ds < dist[i]) dist[i] = ds;
                total += dist[i];
            }
            std::size_t pick;
            if (total > 0.0) {
                pick = draw_weighted(dist, total, eng);
            } else {
                pick = uni(eng);  // all points coincide with chosen centers
            }
            for (std::size_t j = 0; j < d; ++j) centroids(c, j) = points(pick, j);
        }
    }

    KMeansResult res;
    res.labels.assign(n, 0);
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= max_iter; ++iter) {
        res.iterations = iter;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points.row_data(i), centroids.row_data(0), d);
            for (int c = 1; c < k; ++c) {
                const double ds = sq_dist(points.row_data(i), centroids.row_data(c), d);
                if (ds < best_d) {  // strict: ties keep the lowest index
                    best_d = ds;
                    best = c;
                }
            }
            res.labels[i] = best;
            inertia += best_d;
        }

        Matrix sums(static_cast<std::size_t>(k), d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = res.labels[i];
            ++counts[c];
            for (std::size_t j = 0; j < d; ++j) sums(c, j) += points(i, j);
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed at the point farthest from its centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double ds =
                        sq_dist(points.row_data(i), centroids.row_data(res.labels[i]), d);
                    if (ds > far_d) {
                        far_d = ds;
                        far = i;
                    }
                }
                for (std::size_t j = 0; j < d; ++j) centroids(c, j) = points(far, j);
            } else {
                for (std::size_t j = 0; j < d; ++j)
                    centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
            }
        }

        res.inertia = inertia;
        if (std::isfinite(prev_inertia) && prev_inertia - inertia <= tol * prev_inertia) break;
        prev_inertia = inertia;
    }

    res.centroids = centroids;
    return res;
}

}  // namespace fedgwc
