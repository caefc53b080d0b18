#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedgwc/cluster.hpp"
#include "fedgwc/datagen.hpp"
#include "fedgwc/interaction.hpp"
#include "fedgwc/reward.hpp"
#include "fedgwc/training.hpp"

namespace fedgwc {

/// Participation sampler for one cluster. Selection is stratified by ascending
/// sample count (all least-sampled members go first), shuffled within a
/// stratum from the seeded stream; this keeps the count spread within 1 inside
/// a static cluster.
struct SamplerState {
    double rho = 0.1;
    std::map<ClientId, long> counts;
    std::uint64_t rng_seed = 0;
    long draws = 0;
};

/// Per-round cohort size: max(ceil(rho * members), 3). The floor of 3 keeps
/// cohort statistics well defined and preserves loss privacy in aggregates.
std::size_t cohort_size(double rho, std::size_t members);

struct ClusterNode {
    int id = 0;
    std::vector<ClientId> members;  // sorted, pairwise disjoint across live nodes
    ModelParams model;
    InteractionState interaction;
    GaussianWeightState weights;
    SamplerState sampler;
    ModelParams velocity;  // FedAvgM buffer, empty until first use
};

/// Draw the round's cohort and update the sampler counts.
std::vector<ClientId> sample_cohort(ClusterNode& node);

struct LocalUpdate {
    ModelParams params;
    LossTrace trace;
    double weight = 1.0;  // n_k
};

using LocalTrainer =
    std::function<LocalUpdate(const ModelParams& start, ClientId client, std::uint64_t seed)>;

struct RoundOutcome {
    ClusterNode node;
    std::vector<ClientId> cohort;
    double mean_loss = 0.0;
    std::map<ClientId, double> omegas;
    bool aborted = false;
    std::string abort_reason;
};

/// One communication round for one cluster: sample, train locally, aggregate,
/// then apply the reward and interaction updates. A DivergenceError from the
/// trainer aborts the round and returns the node unchanged.
RoundOutcome run_round(const ClusterNode& node, const LocalTrainer& trainer, AggMethod method,
                       double server_momentum, double alpha, std::uint64_t round_seed);

struct FedGwcParams {
    double alpha = 0.1;
    double epsilon = 1e-5;
    double beta = 0.5;
    int n_max = 5;
    int k_min = 30;  // default ceil(3 / rho)
    double rho = 0.1;
};

/// Partition a node into children following the given labels: each child
/// copies the parent model, keeps its members' P rows/columns (MSE back to 1),
/// keeps its members' weights, and starts fresh sampler counts.
std::vector<ClusterNode> split_node(const ClusterNode& node, const std::map<ClientId, int>& labels,
                                    int n_cl, int& next_cluster_id);

struct SplitOutcome {
    bool checked = false;  // interaction had converged, so clustering ran
    ClusteringOutcome clustering;
    std::vector<ClusterNode> children;  // empty -> node continues unchanged
};

/// Split check: nothing happens until the interaction MSE drops below epsilon;
/// then the split decision runs and, when it yields more than one cluster, the
/// node is partitioned.
SplitOutcome maybe_split(const ClusterNode& node, const FedGwcParams& params, std::uint64_t seed,
                         int& next_cluster_id);

struct RunConfig {
    long rounds = 0;  // T
    ModelSpec model;
    TrainerConfig trainer;
    AggMethod aggregator = AggMethod::FedAvg;
    double server_momentum = 0.0;
    FedGwcParams fedgwc;
    std::uint64_t seed = 0;
    long eval_every = 10;                // 0 disables periodic evaluation
    std::optional<int> expected_trace_len;  // optional cross-check of S
};

struct RoundRecord {
    long round = 0;
    int cluster = 0;
    std::vector<ClientId> cohort;
    double mean_loss = 0.0;
    int n_cl = 1;
};

struct CheckRecord {
    long round = 0;
    int cluster = 0;
    std::map<int, double> db_scores;
    int n_cl = 1;
};

struct SplitEvent {
    long round = 0;
    int parent = 0;
    std::vector<int> children;
    std::vector<std::vector<ClientId>> members;
};

struct AbortRecord {
    long round = 0;
    int cluster = 0;
    std::string reason;
};

struct EvalRecord {
    long round = 0;
    int cluster = 0;
    double balanced_accuracy = 0.0;
};

struct TreeNode {
    int id = 0;
    int parent = -1;
    long created_round = 0;
    long split_round = -1;
    std::vector<int> children;
    std::vector<ClientId> members;
};

struct ClusterSummary {
    int id = 0;
    std::vector<ClientId> members;
    double balanced_accuracy = 0.0;
};

struct ExperimentLog {
    std::vector<RoundRecord> rounds;
    std::vector<CheckRecord> checks;
    std::vector<SplitEvent> splits;
    std::vector<AbortRecord> aborts;
    std::vector<EvalRecord> evals;
    std::vector<TreeNode> tree;
    std::vector<ClusterSummary> final_clusters;
    std::vector<ModelParams> final_models;        // aligned with final_clusters
    std::vector<InteractionState> final_states;   // aligned with final_clusters
    std::map<ClientId, int> final_labels;         // client -> index into final_clusters
    double mean_balanced_accuracy = 0.0;
    long rounds_run = 0;
    int final_n_cl = 1;
};

/// Full recursive procedure: one root cluster, per-round train/update/split
/// over all live clusters (children join from the next round), periodic and
/// final per-cluster evaluation.
ExperimentLog run_experiment(const RunConfig& cfg, const Federation& federation);

/// Mean per-client balanced accuracy of this model over the given members.
double evaluate_cluster(const ModelSpec& spec, const ModelParams& model,
                        const Federation& federation, const std::vector<ClientId>& members);

}  // namespace fedgwc
