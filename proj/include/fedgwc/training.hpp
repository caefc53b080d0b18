#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedgwc/common.hpp"
#include "fedgwc/matrix.hpp"
#include "fedgwc/reward.hpp"

namespace fedgwc {

struct ClientDataset {
    Matrix features;          // n_k x d
    std::vector<int> labels;  // class indices in [0, C)
    std::size_t size() const { return labels.size(); }
};

/// Flat parameter vector; layout is defined by ModelSpec.
struct ModelParams {
    std::vector<double> values;
    bool operator==(const ModelParams&) const = default;
};

/// Softmax regression or a one-hidden-layer tanh MLP. Both consume d features
/// and emit C class logits; the clustering machinery only ever sees losses, so
/// these small models stand in for the full-scale networks.
struct ModelSpec {
    enum class Type { Softmax, Mlp };
    Type type = Type::Softmax;
    int features = 0;
    int classes = 0;
    int hidden = 16;  // MLP only

    std::size_t param_count() const;
};

ModelParams init_model(const ModelSpec& spec, std::uint64_t seed);

struct TrainerConfig {
    double learning_rate = 0.01;
    double weight_decay = 4e-4;
    int batch_size = 64;
    int local_epochs = 1;
    double prox_mu = 0.0;  // 0 disables the proximal term
};

/// Loss trace length for a dataset of n_k samples.
std::size_t trace_length(const TrainerConfig& cfg, std::size_t n_k);

/// Mean cross-entropy of the model on the given rows (no regularizers).
double evaluate_loss(const ModelSpec& spec, const ModelParams& params, const ClientDataset& data,
                     const std::vector<std::size_t>& rows);

/// Class predictions for every row of the dataset.
std::vector<int> predict(const ModelSpec& spec, const ModelParams& params,
                         const ClientDataset& data);

/// Objective value CE + (wd/2)||theta||^2 + (mu/2)||theta - anchor||^2 and its
/// analytic gradient; exposed so the gradient can be checked against finite
/// differences.
double objective_and_gradient(const ModelSpec& spec, const ModelParams& params,
                              const ClientDataset& data, const std::vector<std::size_t>& rows,
                              const TrainerConfig& cfg, const ModelParams& anchor,
                              std::vector<double>& grad);

struct LocalResult {
    ModelParams params;
    LossTrace trace;
};

/// Mini-batch SGD for local_epochs passes with per-round shuffling from the
/// seed. The batch cross-entropy is recorded before each step, so the first
/// entry reflects the broadcast model. The proximal term anchors to the start
/// (global) parameters. Throws DivergenceError on a non-finite loss.
LocalResult local_train(const ModelSpec& spec, const ModelParams& start,
                        const ClientDataset& data, const TrainerConfig& cfg, ClientId client,
                        std::uint64_t seed);

enum class AggMethod { FedAvg, FairAvg, FedAvgM, FedProx };

AggMethod agg_method_from_string(const std::string& name);
std::string to_string(AggMethod m);

struct WeightedParams {
    ModelParams params;
    double weight = 1.0;  // n_k for sample-weighted methods
};

/// Server-side aggregation state; FedAvgM keeps a velocity buffer.
struct ServerState {
    ModelParams current;   // model broadcast this round
    ModelParams velocity;  // FedAvgM momentum buffer
    double momentum = 0.0;
};

/// Combine client updates. FedAvg/FedProx: n_k-weighted mean. FairAvg:
/// unweighted mean. FedAvgM: velocity <- m*velocity + (current - fedavg),
/// returns current - velocity (== fedavg - m*velocity_old, so m = 0 reduces to
/// FedAvg bit-exactly). Means use an anchor form, so aggregating identical
/// models returns that model unchanged.
ModelParams aggregate(const std::vector<WeightedParams>& updates, AggMethod method,
                      ServerState& state);

}  // namespace fedgwc
