#include "fedgwc/reward.hpp"

#include <cmath>
#include <limits>

namespace fedgwc {

RoundLossStats compute_round_stats(const std::vector<LossTrace>& traces) {
    if (traces.size() < 2)
        throw CohortError("round statistics need at least 2 loss traces, got " +
                          std::to_string(traces.size()));
    const std::size_t S = traces.front().values.size();
    for (const auto& t : traces)
        if (t.values.size() != S)
            throw ShapeError("loss traces of unequal length: " + std::to_string(t.values.size()) +
                             " vs " + std::to_string(S));

    RoundLossStats stats;
    stats.cohort_size = traces.size();
    stats.mean.assign(S, 0.0);
    stats.stddev.assign(S, 0.0);
    const double n = static_cast<double>(traces.size());
    for (std::size_t s = 0; s < S; ++s) {
        double m = 0.0;
        for (const auto& t : traces) m += t.values[s];
        m /= n;
        double var = 0.0;
        for (const auto& t : traces) {
            const double d = t.values[s] - m;
            var += d * d;
        }
        var /= (n - 1.0);  // unbiased sample variance
        stats.mean[s] = m;
        stats.stddev[s] = std::sqrt(var);
    }
    return stats;
}

std::vector<double> gaussian_rewards(const LossTrace& trace, const RoundLossStats& stats) {
    const std::size_t S = stats.mean.size();
    if (trace.values.size() != S)
        throw ShapeError("trace length " + std::to_string(trace.values.size()) +
                         " does not match round stats length " + std::to_string(S));

    std::vector<double> rewards(S);
    for (std::size_t s = 0; s < S; ++s) {
        const double l = trace.values[s];
        const double m = stats.mean[s];
        const double sigma = stats.stddev[s];
        double r;
        if (sigma == 0.0) {
            r = (l == m) ? 1.0 : 0.0;
        } else {
            const double z = (l - m) / sigma;
            r = std::exp(-0.5 * z * z);
            // exp underflows to 0 for extreme outliers; keep the open interval.
            if (r < std::numeric_limits<double>::min()) r = std::numeric_limits<double>::min();
        }
        rewards[s] = r;
    }
    return rewards;
}

double average_reward(const std::vector<double>& rewards) {
    if (rewards.empty()) throw ShapeError("cannot average an empty reward sequence");
    double sum = 0.0;
    for (double r : rewards) sum += r;
    return sum / static_cast<double>(rewards.size());
}

void update_weight(GaussianWeightState& state, ClientId client, double omega, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("weight update step size must lie in (0,1), got " + std::to_string(alpha));
    if (!(omega > 0.0 && omega <= 1.0))
        throw DomainError("average reward must lie in (0,1], got " + std::to_string(omega));
    double& g = state.gamma[client];
    g = (1.0 - alpha) * g + alpha * omega;
    ++state.sample_count[client];
}

}  // namespace fedgwc
