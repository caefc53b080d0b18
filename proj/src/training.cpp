#include "fedgwc/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace fedgwc {

namespace {

// Stable softmax of logits, in place; returns log-sum-exp for the CE value.
double softmax_inplace(std::vector<double>& z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return zmax + std::log(sum);
}

struct SoftmaxLayout {
    // W: C x d row-major at offset 0, bias: C at offset C*d
    int d, C;
    std::size_t w(int c, int j) const { return static_cast<std::size_t>(c) * d + j; }
    std::size_t b(int c) const { return static_cast<std::size_t>(C) * d + c; }
};

struct MlpLayout {
    // W1: H x d, b1: H, W2: C x H, b2: C
    int d, C, H;
    std::size_t w1(int h, int j) const { return static_cast<std::size_t>(h) * d + j; }
    std::size_t b1(int h) const { return static_cast<std::size_t>(H) * d + h; }
    std::size_t w2(int c, int h) const {
        return static_cast<std::size_t>(H) * (d + 1) + static_cast<std::size_t>(c) * H + h;
    }
    std::size_t b2(int c) const {
        return static_cast<std::size_t>(H) * (d + 1) + static_cast<std::size_t>(C) * H + c;
    }
};

// Mean CE over rows; when grad != nullptr also accumulates d(CE)/d(theta).
double cross_entropy(const ModelSpec& spec, const std::vector<double>& theta,
                     const ClientDataset& data, const std::vector<std::size_t>& rows,
                     std::vector<double>* grad) {
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    if (spec.type == ModelSpec::Type::Softmax) {
        const SoftmaxLayout L{spec.features, spec.classes};
        std::vector<double> z(spec.classes);
        for (std::size_t r : rows) {
            const double* x = data.features.row_data(r);
            for (int c = 0; c < spec.classes; ++c) {
                double acc = theta[L.b(c)];
                for (int j = 0; j < spec.features; ++j) acc += theta[L.w(c, j)] * x[j];
                z[c] = acc;
            }
            const int y = data.labels[r];
            const double logit_y = z[y];
            const double lse = softmax_inplace(z);
            loss += (lse - logit_y) * inv_n;
            if (grad) {
                for (int c = 0; c < spec.classes; ++c) {
                    const double g = (z[c] - (c == y ? 1.0 : 0.0)) * inv_n;
                    (*grad)[L.b(c)] += g;
                    for (int j = 0; j < spec.features; ++j) (*grad)[L.w(c, j)] += g * x[j];
                }
            }
        }
    } else {
        const MlpLayout L{spec.features, spec.classes, spec.hidden};
        std::vector<double> h(spec.hidden), z(spec.classes), dz(spec.classes), dh(spec.hidden);
        for (std::size_t r : rows) {
            const double* x = data.features.row_data(r);
            for (int i = 0; i < spec.hidden; ++i) {
                double acc = theta[L.b1(i)];
                for (int j = 0; j < spec.features; ++j) acc += theta[L.w1(i, j)] * x[j];
                h[i] = std::tanh(acc);
            }
            for (int c = 0; c < spec.classes; ++c) {
                double acc = theta[L.b2(c)];
                for (int i = 0; i < spec.hidden; ++i) acc += theta[L.w2(c, i)] * h[i];
                z[c] = acc;
            }
            const int y = data.labels[r];
            const double logit_y = z[y];
            const double lse = softmax_inplace(z);
            loss += (lse - logit_y) * inv_n;
            if (grad) {
                for (int c = 0; c < spec.classes; ++c) dz[c] = (z[c] - (c == y ? 1.0 : 0.0)) * inv_n;
                std::fill(dh.begin(), dh.end(), 0.0);
                for (int c = 0; c < spec.classes; ++c) {
                    (*grad)[L.b2(c)] += dz[c];
                    for (int i = 0; i < spec.hidden; ++i) {
                        (*grad)[L.w2(c, i)] += dz[c] * h[i];
                        dh[i] += dz[c] * theta[L.w2(c, i)];
                    }
                }
                for (int i = 0; i < spec.hidden; ++i) {
                    const double da = dh[i] * (1.0 - h[i] * h[i]);  // tanh'
                    (*grad)[L.b1(i)] += da;
                    for (int j = 0; j < spec.features; ++j) (*grad)[L.w1(i, j)] += da * x[j];
                }
            }
        }
    }
    return loss;
}

}  // namespace

std::size_t ModelSpec::param_count() const {
    if (type == Type::Softmax)
        return static_cast<std::size_t>(classes) * features + classes;
    return static_cast<std::size_t>(hidden) * (features + 1) +
           static_cast<std::size_t>(classes) * hidden + classes;
}

ModelParams init_model(const ModelSpec& spec, std::uint64_t seed) {
    ModelParams m;
    m.values.assign(spec.param_count(), 0.0);
    if (spec.type == ModelSpec::Type::Mlp) {
        // Small seeded normals break the hidden-layer symmetry.
        auto eng = make_engine(mix_seed({static_cast<std::uint64_t>(SeedDomain::ModelInit), seed}));
        std::normal_distribution<double> normal(0.0, 0.1);
        for (double& v : m.values) v = normal(eng);
    }
    return m;
}

std::size_t trace_length(const TrainerConfig& cfg, std::size_t n_k) {
    const std::size_t batches =
        (n_k + static_cast<std::size_t>(cfg.batch_size) - 1) / cfg.batch_size;
    return static_cast<std::size_t>(cfg.local_epochs) * batches;
}

double evaluate_loss(const ModelSpec& spec, const ModelParams& params, const ClientDataset& data,
                     const std::vector<std::size_t>& rows) {
    if (params.values.size() != spec.param_count())
        throw ShapeError("model parameter count does not match the architecture");
    return cross_entropy(spec, params.values, data, rows, nullptr);
}

std::vector<int> predict(const ModelSpec& spec, const ModelParams& params,
                         const ClientDataset& data) {
    if (params.values.size() != spec.param_count())
        throw ShapeError("model parameter count does not match the architecture");
    const auto& theta = params.values;
    std::vector<int> out(data.size());
    std::vector<double> z(spec.classes), h(spec.hidden);
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double* x = data.features.row_data(r);
        if (spec.type == ModelSpec::Type::Softmax) {
            const SoftmaxLayout L{spec.features, spec.classes};
            for (int c = 0; c < spec.classes; ++c) {
                double acc = theta[L.b(c)];
                for (int j = 0; j < spec.features; ++j) acc += theta[L.w(c, j)] * x[j];
                z[c] = acc;
            }
        } else {
            const MlpLayout L{spec.features, spec.classes, spec.hidden};
            for (int i = 0; i < spec.hidden; ++i) {
                double acc = theta[L.b1(i)];
                for (int j = 0; j < spec.features; ++j) acc += theta[L.w1(i, j)] * x[j];
                h[i] = std::tanh(acc);
            }
            for (int c = 0; c < spec.classes; ++c) {
                double acc = theta[L.b2(c)];
                for (int i = 0; i < spec.hidden; ++i) acc += theta[L.w2(c, i)] * h[i];
                z[c] = acc;
            }
        }
        out[r] = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    }
    return out;
}

double objective_and_gradient(const ModelSpec& spec, const ModelParams& params,
                              const ClientDataset& data, const std::vector<std::size_t>& rows,
                              const TrainerConfig& cfg, const ModelParams& anchor,
                              std::vector<double>& grad) {
    const auto& theta = params.values;
    grad.assign(theta.size(), 0.0);
    double loss = cross_entropy(spec, theta, data, rows, &grad);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        loss += 0.5 * cfg.weight_decay * theta[i] * theta[i];
        grad[i] += cfg.weight_decay * theta[i];
        if (cfg.prox_mu > 0.0) {
            const double diff = theta[i] - anchor.values[i];
            loss += 0.5 * cfg.prox_mu * diff * diff;
            grad[i] += cfg.prox_mu * diff;
        }
    }
    return loss;
}

LocalResult local_train(const ModelSpec& spec, const ModelParams& start,
                        const ClientDataset& data, const TrainerConfig& cfg, ClientId client,
                        std::uint64_t seed) {
    if (start.values.size() != spec.param_count())
        throw ShapeError("model parameter count does not match the architecture");
    if (data.size() == 0) throw ShapeError("cannot train on an empty dataset");
    if (cfg.batch_size < 1 || cfg.local_epochs < 1)
        throw ConfigError("batch size and local epochs must be positive");

    LocalResult res;
    res.params = start;
    res.trace.client_id = client;
    auto& theta = res.params.values;

    auto eng =
        make_engine(mix_seed({static_cast<std::uint64_t>(SeedDomain::Train), seed,
                              static_cast<std::uint64_t>(static_cast<std::int64_t>(client))}));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> grad(theta.size());
    std::vector<std::size_t> batch;
    for (int epoch = 0; epoch < cfg.local_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), eng);
        for (std::size_t at = 0; at < order.size(); at += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), at + cfg.batch_size);
            batch.assign(order.begin() + at, order.begin() + end);

            std::fill(grad.begin(), grad.end(), 0.0);
            const double batch_ce = cross_entropy(spec, theta, data, batch, &grad);
            if (!std::isfinite(batch_ce))
                throw DivergenceError("non-finite loss on client " + std::to_string(client));
            res.trace.values.push_back(batch_ce);  // loss before the step

            for (std::size_t i = 0; i < theta.size(); ++i) {
                double g = grad[i] + cfg.weight_decay * theta[i];
                if (cfg.prox_mu > 0.0) g += cfg.prox_mu * (theta[i] - start.values[i]);
                theta[i] -= cfg.learning_rate * g;
            }
        }
    }
    return res;
}

AggMethod agg_method_from_string(const std::string& name) {
    if (name == "fedavg") return AggMethod::FedAvg;
    if (name == "fairavg") return AggMethod::FairAvg;
    if (name == "fedavgm") return AggMethod::FedAvgM;
    if (name == "fedprox") return AggMethod::FedProx;
    throw ConfigError("unknown aggregator '" + name + "'");
}

std::string to_string(AggMethod m) {
    switch (m) {
        case AggMethod::FedAvg: return "fedavg";
        case AggMethod::FairAvg: return "fairavg";
        case AggMethod::FedAvgM: return "fedavgm";
        case AggMethod::FedProx: return "fedprox";
    }
    return "?";
}

ModelParams aggregate(const std::vector<WeightedParams>& updates, AggMethod method,
                      ServerState& state) {
    if (updates.empty()) throw ShapeError("cannot aggregate zero updates");
    const std::size_t dim = updates.front().params.values.size();
    double total = 0.0;
    for (const auto& u : updates) {
        if (u.params.values.size() != dim)
            throw ShapeError("client updates disagree on parameter dimension");
        total += method == AggMethod::FairAvg ? 1.0 : u.weight;
    }
    if (!(total > 0.0)) throw DomainError("aggregation weights must be positive");

    // Anchor form theta_0 + sum_k w_k (theta_k - theta_0): identical inputs
    // reproduce themselves bit-exactly.
    ModelParams mean = updates.front().params;
    for (std::size_t k = 1; k < updates.size(); ++k) {
        const double w = (method == AggMethod::FairAvg ? 1.0 : updates[k].weight) / total;
        const auto& vals = updates[k].params.values;
        for (std::size_t i = 0; i < dim; ++i)
            mean.values[i] += w * (vals[i] - updates.front().params.values[i]);
    }

    if (method != AggMethod::FedAvgM) return mean;

    if (state.current.values.size() != dim)
        throw ShapeError("server state dimension does not match client updates");
    if (state.velocity.values.empty()) state.velocity.values.assign(dim, 0.0);
    ModelParams next;
    next.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        // next = fedavg - m*v_old, then v <- m*v_old + (current - fedavg);
        // algebraically current - v_new, but exact at m = 0.
        next.values[i] = mean.values[i] - state.momentum * state.velocity.values[i];
        state.velocity.values[i] = state.momentum * state.velocity.values[i] +
                                   (state.current.values[i] - mean.values[i]);
    }
    return next;
}

}  // namespace fedgwc
