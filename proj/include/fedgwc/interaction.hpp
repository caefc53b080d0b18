#pragma once

#include <map>
#include <set>
#include <vector>

#include "fedgwc/common.hpp"
#include "fedgwc/matrix.hpp"

namespace fedgwc {

/// Pairwise interaction estimates for one cluster. P(k,j) is an exponential
/// moving average of client k's reward over the rounds where k and j were
/// sampled together. mse_signal starts at 1 and tracks an EMA of the mean
/// squared entry change over each round's updated block; it is the
/// convergence signal gating the clustering step.
struct InteractionState {
    std::vector<ClientId> clients;  // fixed ordering defining matrix indices
    Matrix P;
    Matrix initial;  // entries at (re)initialization, reference point of the entrywise bound
    double mse_signal = 1.0;
    double alpha = 0.1;
    long round = 0;

    std::size_t size() const { return clients.size(); }
    std::size_t index_of(ClientId id) const;
};

/// Symmetric RBF affinity over unbiased perception vectors.
struct AffinityMatrix {
    Matrix W;
    double beta = 0.0;
};

InteractionState make_interaction_state(std::vector<ClientId> clients, double alpha);

/// New state for a subset of clients, keeping their P rows/columns; the MSE
/// signal and round counter restart as for a fresh cluster.
InteractionState filter_interaction_state(const InteractionState& state,
                                          const std::vector<ClientId>& members);

/// One round of the EMA block update: P(k,j) <- (1-a) P(k,j) + a omega_k for
/// every pair of sampled clients (diagonal included); everything else is
/// untouched. Also advances the MSE signal and the round counter.
void update_interaction(InteractionState& state, const std::set<ClientId>& sampled,
                        const std::map<ClientId, double>& omegas);

bool converged(const InteractionState& state, double epsilon);

/// Row k of P with entries k and j removed; pairs (k,j)/(j,k) stay aligned
/// component-wise because both drop the same index set.
std::vector<double> extract_upv(const InteractionState& state, std::size_t k, std::size_t j);

/// W(k,j) = exp(-beta ||v_k^j - v_j^k||^2), computed once per unordered pair
/// so symmetry is exact; the diagonal is fixed to 1.
AffinityMatrix build_affinity(const InteractionState& state, double beta);

/// Entrywise ceiling (1-a)^t P0 + 1 - (1-a)^(t+1) valid after t rounds.
double interaction_entry_bound(const InteractionState& state, std::size_t k, std::size_t j);

}  // namespace fedgwc
