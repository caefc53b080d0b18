#include "fedgwc/interaction.hpp"

#include <algorithm>
#include <cmath>

namespace fedgwc {

std::size_t InteractionState::index_of(ClientId id) const {
    auto it = std::find(clients.begin(), clients.end(), id);
    if (it == clients.end())
        throw DomainError("client " + std::to_string(id) + " not in this cluster");
    return static_cast<std::size_t>(it - clients.begin());
}

InteractionState make_interaction_state(std::vector<ClientId> clients, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("interaction step size must lie in (0,1), got " + std::to_string(alpha));
    InteractionState s;
    s.clients = std::move(clients);
    s.P = Matrix(s.clients.size(), s.clients.size(), 0.0);
    s.initial = s.P;
    s.mse_signal = 1.0;
    s.alpha = alpha;
    s.round = 0;
    return s;
}

InteractionState filter_interaction_state(const InteractionState& state,
                                          const std::vector<ClientId>& members) {
    std::vector<std::size_t> idx;
    idx.reserve(members.size());
    for (ClientId id : members) idx.push_back(state.index_of(id));
    InteractionState child;
    child.clients = members;
    child.P = select_square(state.P, idx);
    child.initial = child.P;
    child.mse_signal = 1.0;
    child.alpha = state.alpha;
    child.round = 0;
    return child;
}

double interaction_entry_bound(const InteractionState& state, std::size_t k, std::size_t j) {
    const double decay = std::pow(1.0 - state.alpha, static_cast<double>(state.round));
    return decay * state.initial(k, j) + 1.0 - decay * (1.0 - state.alpha);
}

void update_interaction(InteractionState& state, const std::set<ClientId>& sampled,
                        const std::map<ClientId, double>& omegas) {
    if (sampled.size() < 3)
        throw CohortError("interaction update needs at least 3 sampled clients, got " +
                          std::to_string(sampled.size()));
    if (omegas.size() != sampled.size())
        throw DomainError("rewards must be defined exactly on the sampled set");

    std::vector<std::size_t> idx;
    std::vector<double> omega_of;
    idx.reserve(sampled.size());
    for (ClientId id : sampled) {
        auto it = omegas.find(id);
        if (it == omegas.end())
            throw DomainError("missing reward for sampled client " + std::to_string(id));
        if (!(it->second > 0.0 && it->second <= 1.0))
            throw DomainError("average reward must lie in (0,1], got " +
                              std::to_string(it->second));
        idx.push_back(state.index_of(id));
        omega_of.push_back(it->second);
    }

    const double a = state.alpha;
    double sq_change = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double omega = omega_of[r];
        for (std::size_t c = 0; c < idx.size(); ++c) {
            double& p = state.P(idx[r], idx[c]);
            const double p_new = (1.0 - a) * p + a * omega;
            const double d = p_new - p;
            sq_change += d * d;
            p = p_new;
        }
    }
    const double block = static_cast<double>(idx.size() * idx.size());
    state.mse_signal = (1.0 - a) * state.mse_signal + a * (sq_change / block);
    ++state.round;

    // Entrywise ceiling from the EMA unrolling; violation means a bug upstream.
    for (std::size_t k = 0; k < state.size(); ++k)
        for (std::size_t j = 0; j < state.size(); ++j)
            if (state.P(k, j) > interaction_entry_bound(state, k, j) + 1e-12)
                throw Error("interaction matrix entry exceeds its theoretical bound");
}

bool converged(const InteractionState& state, double epsilon) {
    if (!(epsilon > 0.0))
        throw ConfigError("convergence threshold must be positive, got " + std::to_string(epsilon));
    return state.mse_signal < epsilon;
}

std::vector<double> extract_upv(const InteractionState& state, std::size_t k, std::size_t j) {
    const std::size_t n = state.size();
    if (k == j) throw DomainError("perception vector requires two distinct clients");
    if (k >= n || j >= n) throw DomainError("client index out of range");
    std::vector<double> v;
    v.reserve(n - 2);
    for (std::size_t i = 0; i < n; ++i)
        if (i != k && i != j) v.push_back(state.P(k, i));
    return v;
}

AffinityMatrix build_affinity(const InteractionState& state, double beta) {
    if (!(beta > 0.0))
        throw ConfigError("RBF spread must be positive, got " + std::to_string(beta));
    const std::size_t n = state.size();
    if (n < 3)
        throw CohortError("affinity needs at least 3 clients, got " + std::to_string(n));

    AffinityMatrix aff;
    aff.beta = beta;
    aff.W = Matrix(n, n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        aff.W(k, k) = 1.0;
        for (std::size_t j = k + 1; j < n; ++j) {
            // ||v_k^j - v_j^k||^2 over the common index set {0..n-1} \ {k,j}
            double sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == k || i == j) continue;
                const double d = state.P(k, i) - state.P(j, i);
                sq += d * d;
            }
            const double w = std::exp(-beta * sq);
            aff.W(k, j) = w;
            aff.W(j, k) = w;
        }
    }
    return aff;
}

}  // namespace fedgwc
