#pragma once

#include <map>
#include <vector>

#include "fedgwc/common.hpp"

namespace fedgwc {

/// Per-client loss values recorded at each of the S local iterations of one round.
struct LossTrace {
    ClientId client_id = 0;
    std::vector<double> values;
};

/// Per-iteration mean and sample standard deviation of the cohort's losses.
struct RoundLossStats {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::size_t cohort_size = 0;
};

/// Running Gaussian-weight estimates, one scalar per client ever sampled.
/// Weights start at 0 and stay in [0, 1) under convex updates with rewards in (0, 1].
struct GaussianWeightState {
    std::map<ClientId, double> gamma;
    std::map<ClientId, long> sample_count;

    double gamma_of(ClientId id) const {
        auto it = gamma.find(id);
        return it == gamma.end() ? 0.0 : it->second;
    }
};

/// Cohort mean and unbiased sample std per local iteration.
/// Throws CohortError for fewer than 2 traces, ShapeError on unequal lengths.
RoundLossStats compute_round_stats(const std::vector<LossTrace>& traces);

/// Gaussian kernel rewards r^s = exp(-(l^s - m^s)^2 / (2 (sigma^s)^2)).
/// Degenerate cohort (sigma = 0): reward is 1 when the loss equals the mean,
/// 0 otherwise (the sigma->0 limit of the kernel, an indicator of the mean).
/// Positive rewards are clamped to the smallest normal double so they stay in (0, 1].
std::vector<double> gaussian_rewards(const LossTrace& trace, const RoundLossStats& stats);

/// Mean reward over the S local iterations.
double average_reward(const std::vector<double>& rewards);

/// Robbins-Monro update gamma <- (1 - alpha) gamma + alpha omega for one
/// sampled client; clients absent from the round keep their weight untouched.
void update_weight(GaussianWeightState& state, ClientId client, double omega, double alpha);

}  // namespace fedgwc
