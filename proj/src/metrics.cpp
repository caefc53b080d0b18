#include "fedgwc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace fedgwc {

RankedHistogram rank_histogram(const ClassHistogram& h) {
    RankedHistogram r;
    r.freqs = h.freqs;
    std::sort(r.freqs.begin(), r.freqs.end(), std::greater<double>());
    return r;
}

double wasserstein_distance(const ClassHistogram& a, const ClassHistogram& b, int p) {
    if (a.freqs.size() != b.freqs.size())
        throw ShapeError("histograms must have the same class count");
    if (p < 1) throw DomainError("Wasserstein order p must be >= 1");
    const RankedHistogram ra = rank_histogram(a);
    const RankedHistogram rb = rank_histogram(b);
    const double C = static_cast<double>(ra.freqs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ra.freqs.size(); ++i)
        acc += std::pow(std::abs(ra.freqs[i] - rb.freqs[i]), p);
    return std::pow(acc / C, 1.0 / p);
}

namespace {

int cluster_count(const std::vector<int>& labels) {
    int k = 0;
    for (int c : labels) {
        if (c < 0) throw DomainError("cluster labels must be non-negative");
        k = std::max(k, c + 1);
    }
    return k;
}

}  // namespace

double was_score(const std::vector<ClassHistogram>& histograms, const std::vector<int>& labels) {
    const std::size_t n = histograms.size();
    if (labels.size() != n) throw ShapeError("one label per histogram required");
    const int k = cluster_count(labels);
    if (k < 2) throw DomainError("silhouette is undefined for a single cluster");
    std::vector<std::size_t> size(k, 0);
    for (int c : labels) ++size[c];

    Matrix dist(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = wasserstein_distance(histograms[i], histograms[j]);
            dist(i, j) = d;
            dist(j, i) = d;
        }

    double total = 0.0;
    std::vector<double> sum_to(k);
    for (std::size_t i = 0; i < n; ++i) {
        const int own = labels[i];
        if (size[own] <= 1) continue;  // singleton contributes 0
        std::fill(sum_to.begin(), sum_to.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum_to[labels[j]] += dist(i, j);
        const double a = sum_to[own] / static_cast<double>(size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || size[c] == 0) continue;
            b = std::min(b, sum_to[c] / static_cast<double>(size[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;  // both zero -> contributes 0
    }
    return total / static_cast<double>(n);
}

double wadb_score(const std::vector<ClassHistogram>& histograms, const std::vector<int>& labels) {
    const std::size_t n = histograms.size();
    if (labels.size() != n) throw ShapeError("one label per histogram required");
    if (n == 0) throw ShapeError("no histograms given");
    const int k = cluster_count(labels);
    if (k < 2) throw DomainError("Davies-Bouldin needs at least 2 clusters");
    const std::size_t C = histograms.front().freqs.size();

    Matrix ranks(n, C);
    for (std::size_t i = 0; i < n; ++i) {
        if (histograms[i].freqs.size() != C)
            throw ShapeError("histograms must have the same class count");
        const RankedHistogram r = rank_histogram(histograms[i]);
        for (std::size_t j = 0; j < C; ++j) ranks(i, j) = r.freqs[j];
    }

    const double inv_c = 1.0 / static_cast<double>(C);
    auto scaled_dist = [&](const double* a, const double* b) {
        double sq = 0.0;
        for (std::size_t j = 0; j < C; ++j) {
            const double diff = a[j] - b[j];
            sq += diff * diff;
        }
        return std::sqrt(sq * inv_c);
    };

    Matrix centroid(static_cast<std::size_t>(k), C);
    std::vector<std::size_t> size(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++size[labels[i]];
        for (std::size_t j = 0; j < C; ++j) centroid(labels[i], j) += ranks(i, j);
    }
    for (int c = 0; c < k; ++c) {
        if (size[c] == 0) throw DomainError("Davies-Bouldin requires non-empty clusters");
        for (std::size_t j = 0; j < C; ++j) centroid(c, j) /= static_cast<double>(size[c]);
    }

    std::vector<double> spread(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        spread[labels[i]] += scaled_dist(ranks.row_data(i), centroid.row_data(labels[i]));
    for (int c = 0; c < k; ++c) spread[c] /= static_cast<double>(size[c]);

    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const double d = scaled_dist(centroid.row_data(i), centroid.row_data(j));
            const double ratio =
                d == 0.0 ? std::numeric_limits<double>::infinity() : (spread[i] + spread[j]) / d;
            worst = std::max(worst, ratio);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

double rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size())
        throw ShapeError("partitions must cover the same clients");
    const std::size_t n = labels_a.size();
    if (n < 2) throw ShapeError("Rand index needs at least 2 clients");
    long agree = 0;
    long pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_a = labels_a[i] == labels_a[j];
            const bool same_b = labels_b[i] == labels_b[j];
            agree += (same_a == same_b) ? 1 : 0;
            ++pairs;
        }
    return static_cast<double>(agree) / static_cast<double>(pairs);
}

double balanced_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                         int classes) {
    if (predictions.size() != labels.size())
        throw ShapeError("predictions and labels must have equal length");
    if (labels.empty()) throw ShapeError("cannot score an empty label set");
    std::vector<long> present(classes, 0), hit(classes, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || y >= classes) throw DomainError("label out of class range");
        ++present[y];
        if (predictions[i] == y) ++hit[y];
    }
    double total = 0.0;
    int used = 0;
    for (int c = 0; c < classes; ++c) {
        if (present[c] == 0) continue;  // absent classes excluded from the mean
        total += static_cast<double>(hit[c]) / static_cast<double>(present[c]);
        ++used;
    }
    return total / static_cast<double>(used);
}

}  // namespace fedgwc
