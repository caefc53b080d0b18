#include "fedgwc/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fedgwc/metrics.hpp"

namespace fedgwc {

std::size_t cohort_size(double rho, std::size_t members) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw ConfigError("participation rate must lie in (0,1], got " + std::to_string(rho));
    const auto target = static_cast<std::size_t>(
        std::ceil(rho * static_cast<double>(members)));
    return std::min(members, std::max<std::size_t>(target, 3));
}

std::vector<ClientId> sample_cohort(ClusterNode& node) {
    const std::size_t n = node.members.size();
    if (n < 3)
        throw CohortError("cluster " + std::to_string(node.id) +
                          " has fewer than 3 members and cannot be sampled");
    const std::size_t want = cohort_size(node.sampler.rho, n);

    // Strata of equal sample count, visited in ascending count order.
    std::map<long, std::vector<ClientId>> strata;
    for (ClientId id : node.members) {
        auto it = node.sampler.counts.find(id);
        strata[it == node.sampler.counts.end() ? 0 : it->second].push_back(id);
    }
    auto eng = make_engine(mix_seed({static_cast<std::uint64_t>(SeedDomain::Sampler),
                                     node.sampler.rng_seed,
                                     static_cast<std::uint64_t>(node.sampler.draws)}));
    std::vector<ClientId> cohort;
    cohort.reserve(want);
    for (auto& [count, ids] : strata) {
        std::shuffle(ids.begin(), ids.end(), eng);
        for (ClientId id : ids) {
            if (cohort.size() == want) break;
            cohort.push_back(id);
        }
        if (cohort.size() == want) break;
    }
    ++node.sampler.draws;
    for (ClientId id : cohort) ++node.sampler.counts[id];
    std::sort(cohort.begin(), cohort.end());
    return cohort;
}

RoundOutcome run_round(const ClusterNode& node, const LocalTrainer& trainer, AggMethod method,
                       double server_momentum, double alpha, std::uint64_t round_seed) {
    RoundOutcome out;
    ClusterNode work = node;
    out.cohort = sample_cohort(work);

    std::vector<LocalUpdate> updates;
    updates.reserve(out.cohort.size());
    try {
        for (ClientId client : out.cohort)
            updates.push_back(trainer(work.model, client, round_seed));
    } catch (const DivergenceError& e) {
        out.node = node;  // round aborted, state untouched
        out.aborted = true;
        out.abort_reason = e.what();
        return out;
    }

    std::vector<LossTrace> traces;
    traces.reserve(updates.size());
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const auto& u : updates) {
        for (double l : u.trace.values) {
            loss_sum += l;
            ++loss_count;
        }
        traces.push_back(u.trace);
    }
    out.mean_loss = loss_count == 0 ? 0.0 : loss_sum / static_cast<double>(loss_count);

    const RoundLossStats stats = compute_round_stats(traces);
    for (const auto& u : updates)
        out.omegas[u.trace.client_id] = average_reward(gaussian_rewards(u.trace, stats));

    ServerState server;
    server.current = work.model;
    server.velocity = work.velocity;
    server.momentum = server_momentum;
    std::vector<WeightedParams> weighted;
    weighted.reserve(updates.size());
    for (auto& u : updates) weighted.push_back({std::move(u.params), u.weight});
    work.model = aggregate(weighted, method, server);
    work.velocity = std::move(server.velocity);

    for (ClientId client : out.cohort) update_weight(work.weights, client, out.omegas[client], alpha);
    const std::set<ClientId> sampled(out.cohort.begin(), out.cohort.end());
    update_interaction(work.interaction, sampled, out.omegas);

    out.node = std::move(work);
    return out;
}

std::vector<ClusterNode> split_node(const ClusterNode& node, const std::map<ClientId, int>& labels,
                                    int n_cl, int& next_cluster_id) {
    std::vector<std::vector<ClientId>> members(n_cl);
    for (ClientId id : node.members) {
        auto it = labels.find(id);
        if (it == labels.end())
            throw DomainError("split labels missing client " + std::to_string(id));
        members.at(it->second).push_back(id);
    }
    std::vector<ClusterNode> children;
    children.reserve(n_cl);
    for (int c = 0; c < n_cl; ++c) {
        if (members[c].empty()) throw DomainError("split produced an empty cluster");
        ClusterNode child;
        child.id = next_cluster_id++;
        child.members = members[c];
        child.model = node.model;  // children start from the parent model
        child.interaction = filter_interaction_state(node.interaction, child.members);
        for (ClientId id : child.members) {
            auto g = node.weights.gamma.find(id);
            if (g != node.weights.gamma.end()) child.weights.gamma[id] = g->second;
            auto s = node.weights.sample_count.find(id);
            if (s != node.weights.sample_count.end()) child.weights.sample_count[id] = s->second;
        }
        child.sampler.rho = node.sampler.rho;
        child.sampler.rng_seed = mix_seed({node.sampler.rng_seed,
                                           static_cast<std::uint64_t>(child.id)});
        child.sampler.draws = 0;  // fresh counts
        child.velocity = node.velocity;
        children.push_back(std::move(child));
    }
    return children;
}

SplitOutcome maybe_split(const ClusterNode& node, const FedGwcParams& params, std::uint64_t seed,
                         int& next_cluster_id) {
    SplitOutcome out;
    if (!converged(node.interaction, params.epsilon)) return out;
    out.checked = true;
    out.clustering = fedgw_cluster(node.interaction, params.beta, params.n_max, seed, params.k_min);
    if (out.clustering.n_cl <= 1) return out;
    out.children = split_node(node, out.clustering.labels, out.clustering.n_cl, next_cluster_id);
    return out;
}

double evaluate_cluster(const ModelSpec& spec, const ModelParams& model,
                        const Federation& federation, const std::vector<ClientId>& members) {
    double total = 0.0;
    for (ClientId id : members) {
        const auto& client = federation.clients.at(static_cast<std::size_t>(id));
        const std::vector<int> preds = predict(spec, model, client.test);
        total += balanced_accuracy(preds, client.test.labels, spec.classes);
    }
    return total / static_cast<double>(members.size());
}

namespace {

void check_partition(const std::map<int, ClusterNode>& live, std::size_t federation_size) {
    std::set<ClientId> seen;
    for (const auto& [id, node] : live)
        for (ClientId c : node.members)
            if (!seen.insert(c).second) throw Error("client assigned to two live clusters");
    if (seen.size() != federation_size)
        throw Error("live clusters do not cover the federation");
}

}  // namespace

ExperimentLog run_experiment(const RunConfig& cfg, const Federation& federation) {
    if (cfg.rounds < 0) throw ConfigError("round count must be non-negative");
    if (federation.clients.size() < 3) throw ConfigError("federation needs at least 3 clients");
    if (cfg.model.features != federation.features || cfg.model.classes != federation.classes)
        throw ConfigError("model architecture does not match the federation's dimensions");
    if (cfg.expected_trace_len) {
        for (const auto& c : federation.clients) {
            const std::size_t s = trace_length(cfg.trainer, c.train.size());
            if (s != static_cast<std::size_t>(*cfg.expected_trace_len))
                throw ConfigError("configured S = " + std::to_string(*cfg.expected_trace_len) +
                                  " but client " + std::to_string(c.id) + " yields S = " +
                                  std::to_string(s));
        }
    }

    const LocalTrainer trainer = [&](const ModelParams& start, ClientId client,
                                     std::uint64_t seed) {
        const auto& data = federation.clients.at(static_cast<std::size_t>(client)).train;
        LocalResult r = local_train(cfg.model, start, data, cfg.trainer, client, seed);
        return LocalUpdate{std::move(r.params), std::move(r.trace),
                           static_cast<double>(data.size())};
    };

    ExperimentLog log;
    std::map<int, ClusterNode> live;
    int next_cluster_id = 0;
    {
        ClusterNode root;
        root.id = next_cluster_id++;
        root.members.resize(federation.clients.size());
        std::iota(root.members.begin(), root.members.end(), ClientId{0});
        root.model = init_model(cfg.model, cfg.seed);
        root.interaction = make_interaction_state(root.members, cfg.fedgwc.alpha);
        root.sampler.rho = cfg.fedgwc.rho;
        root.sampler.rng_seed = mix_seed({static_cast<std::uint64_t>(SeedDomain::Sampler),
                                          cfg.seed, static_cast<std::uint64_t>(root.id)});
        log.tree.push_back({root.id, -1, 0, -1, {}, root.members});
        live.emplace(root.id, std::move(root));
    }

    for (long t = 0; t < cfg.rounds; ++t) {
        const int n_cl_at_start = static_cast<int>(live.size());
        std::vector<int> ids;
        ids.reserve(live.size());
        for (const auto& [id, node] : live) ids.push_back(id);

        for (int id : ids) {
            ClusterNode& node = live.at(id);
            const std::uint64_t round_seed = mix_seed(
                {static_cast<std::uint64_t>(SeedDomain::Round), cfg.seed,
                 static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(t)});
            RoundOutcome ro =
                run_round(node, trainer, cfg.aggregator, cfg.server_momentum, cfg.fedgwc.alpha,
                          round_seed);
            if (ro.aborted) {
                log.aborts.push_back({t, id, ro.abort_reason});
                continue;
            }
            node = std::move(ro.node);
            log.rounds.push_back({t, id, ro.cohort, ro.mean_loss, n_cl_at_start});

            const std::uint64_t cluster_seed = mix_seed(
                {static_cast<std::uint64_t>(SeedDomain::Cluster), cfg.seed,
                 static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(t)});
            SplitOutcome sp = maybe_split(node, cfg.fedgwc, cluster_seed, next_cluster_id);
            if (sp.checked)
                log.checks.push_back({t, id, sp.clustering.db_scores, sp.clustering.n_cl});
            if (!sp.children.empty()) {
                SplitEvent ev;
                ev.round = t;
                ev.parent = id;
                for (const auto& child : sp.children) {
                    ev.children.push_back(child.id);
                    ev.members.push_back(child.members);
                }
                log.splits.push_back(ev);
                for (auto& tn : log.tree)
                    if (tn.id == id) {
                        tn.split_round = t;
                        tn.children = ev.children;
                    }
                for (auto& child : sp.children)
                    log.tree.push_back({child.id, id, t + 1, -1, {}, child.members});
                live.erase(id);
                for (auto& child : sp.children) {
                    const int cid = child.id;
                    live.emplace(cid, std::move(child));
                }
            }
        }
        check_partition(live, federation.clients.size());

        if (cfg.eval_every > 0 && (t + 1) % cfg.eval_every == 0) {
            for (const auto& [id, node] : live)
                log.evals.push_back(
                    {t, id, evaluate_cluster(cfg.model, node.model, federation, node.members)});
        }
    }

    log.rounds_run = cfg.rounds;
    log.final_n_cl = static_cast<int>(live.size());
    double acc_total = 0.0;
    int index = 0;
    for (const auto& [id, node] : live) {
        ClusterSummary s;
        s.id = id;
        s.members = node.members;
        s.balanced_accuracy = evaluate_cluster(cfg.model, node.model, federation, node.members);
        acc_total += s.balanced_accuracy * static_cast<double>(node.members.size());
        for (ClientId c : node.members) log.final_labels[c] = index;
        log.final_clusters.push_back(std::move(s));
        log.final_models.push_back(node.model);
        log.final_states.push_back(node.interaction);
        ++index;
    }
    log.mean_balanced_accuracy =
        acc_total / static_cast<double>(federation.clients.size());
    return log;
}

}  // namespace fedgwc
