#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fedgwc/common.hpp"
#include "fedgwc/training.hpp"

namespace fedgwc {

/// Class-frequency vector on the simplex.
struct ClassHistogram {
    std::vector<double> freqs;
};

enum class Domain { Clean, Noisy, Blurred };

Domain domain_from_string(const std::string& name);
std::string to_string(Domain d);

struct GroupSpec {
    int size = 0;
    double dirichlet_alpha = 1.0;  // 0 encodes a one-hot class assignment
    Domain domain = Domain::Clean;
};

struct FederationSpec {
    int clients = 0;             // K
    int classes = 0;             // C
    int features = 0;            // d, must be >= C (class means on basis vectors)
    int samples_per_client = 0;  // split 80/20 into train/test
    std::vector<GroupSpec> groups;
    double feature_scale = 3.0;  // distance of class means from the origin
    double noise_scale = 2.0;    // extra feature noise in the noisy domain
    int blur_width = 3;          // moving-average window in the blurred domain
    // Per-class difficulty ramp: class c draws features with std
    // 1 + (class_spread - 1) * c / (C - 1). At the default 1.0 every class is
    // equally hard and label skew leaves no trace in the losses; raise it to
    // make class composition visible to loss-based clustering.
    double class_spread = 1.0;
    std::uint64_t seed = 0;
};

void validate(const FederationSpec& spec);

struct FederationClient {
    ClientId id = 0;
    int group = 0;
    Domain domain = Domain::Clean;
    ClassHistogram histogram;
    ClientDataset train;
    ClientDataset test;
};

struct Federation {
    int classes = 0;
    int features = 0;
    std::vector<FederationClient> clients;
    std::vector<GroupSpec> groups;  // empty when no ground truth is available
    std::uint64_t seed = 0;

    bool has_ground_truth() const { return !groups.empty(); }
    std::vector<int> ground_truth() const;
};

/// Class proportions from Dirichlet(alpha * 1_C); alpha = 0 degenerates to a
/// one-hot histogram on a uniformly drawn class.
ClassHistogram dirichlet_partition(double alpha, int classes, std::mt19937_64& rng);

/// Synthetic federation: each client draws a class histogram from its group's
/// Dirichlet, samples class-conditional Gaussians (means feature_scale * e_c,
/// unit covariance), applies the group's domain transform, and splits 80/20.
Federation make_federation(const FederationSpec& spec);

/// Empirical class frequencies of a dataset.
ClassHistogram empirical_histogram(const ClientDataset& data, int classes);

}  // namespace fedgwc
