#pragma once

#include <vector>

#include "fedgwc/datagen.hpp"

namespace fedgwc {

/// Class frequencies sorted descending; the rank pairing is the optimal
/// coupling between two empirical class distributions.
struct RankedHistogram {
    std::vector<double> freqs;
};

RankedHistogram rank_histogram(const ClassHistogram& h);

/// Closed-form p-Wasserstein between the empirical measures of two class
/// histograms: ((1/C) sum_i |a_(i) - b_(i)|^p)^(1/p) over descending-ranked
/// entries.
double wasserstein_distance(const ClassHistogram& a, const ClassHistogram& b, int p = 2);

/// Mean Silhouette over clients with all pairwise distances taken as the
/// ranked Wasserstein distance. Singletons contribute 0, as do clients whose
/// intra and nearest-cluster distances are both 0. Throws DomainError when
/// fewer than 2 clusters are present.
double was_score(const std::vector<ClassHistogram>& histograms, const std::vector<int>& labels);

/// Davies-Bouldin over ranked-histogram vectors with the scaled distance
/// ((1/C) sum |.|^2)^(1/2); centroids are elementwise means of member ranks.
double wadb_score(const std::vector<ClassHistogram>& histograms, const std::vector<int>& labels);

/// Fraction of client pairs on which the two partitions agree
/// (same-cluster in both, or different-cluster in both).
double rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

/// Mean per-class recall over the classes present in `labels`.
double balanced_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                         int classes);

}  // namespace fedgwc
