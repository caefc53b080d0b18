#include "fedgwc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fedgwc {

Domain domain_from_string(const std::string& name) {
    if (name == "clean") return Domain::Clean;
    if (name == "noisy") return Domain::Noisy;
    if (name == "blurred") return Domain::Blurred;
    throw ConfigError("unknown domain '" + name + "' (expected clean, noisy, or blurred)");
}

std::string to_string(Domain d) {
    switch (d) {
        case Domain::Clean: return "clean";
        case Domain::Noisy: return "noisy";
        case Domain::Blurred: return "blurred";
    }
    return "?";
}

void validate(const FederationSpec& spec) {
    if (spec.clients < 1) throw ConfigError("federation needs at least one client");
    if (spec.classes < 2) throw ConfigError("federation needs at least two classes");
    if (spec.features < spec.classes)
        throw ConfigError("feature dimension must be >= class count (simplex class means)");
    if (spec.samples_per_client < 5)
        throw ConfigError("need at least 5 samples per client for an 80/20 split");
    if (spec.groups.empty()) throw ConfigError("federation needs at least one group");
    int total = 0;
    for (const auto& g : spec.groups) {
        if (g.size < 1) throw ConfigError("group sizes must be positive");
        if (g.dirichlet_alpha < 0.0) throw ConfigError("dirichlet alpha must be >= 0");
        total += g.size;
    }
    if (total != spec.clients)
        throw ConfigError("group sizes sum to " + std::to_string(total) + " but K = " +
                          std::to_string(spec.clients));
    if (spec.blur_width < 1) throw ConfigError("blur width must be positive");
    if (spec.noise_scale < 0.0) throw ConfigError("noise scale must be >= 0");
    if (spec.class_spread < 1.0) throw ConfigError("class spread must be >= 1");
}

ClassHistogram dirichlet_partition(double alpha, int classes, std::mt19937_64& rng) {
    if (alpha < 0.0) throw ConfigError("dirichlet alpha must be >= 0");
    ClassHistogram h;
    h.freqs.assign(classes, 0.0);
    if (alpha == 0.0) {
        std::uniform_int_distribution<int> uni(0, classes - 1);
        h.freqs[uni(rng)] = 1.0;
        return h;
    }
    std::gamma_distribution<double> gamma(alpha, 1.0);
    double sum = 0.0;
    for (double& f : h.freqs) {
        f = gamma(rng);
        sum += f;
    }
    if (sum <= 0.0) {
        // All gamma draws underflowed (tiny alpha); fall back to one-hot.
        std::uniform_int_distribution<int> uni(0, classes - 1);
        std::fill(h.freqs.begin(), h.freqs.end(), 0.0);
        h.freqs[uni(rng)] = 1.0;
        return h;
    }
    for (double& f : h.freqs) f /= sum;
    return h;
}

std::vector<int> Federation::ground_truth() const {
    std::vector<int> gt(clients.size());
    for (std::size_t i = 0; i < clients.size(); ++i) gt[i] = clients[i].group;
    return gt;
}

namespace {

int draw_class(const ClassHistogram& h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double r = uni(rng);
    double acc = 0.0;
    for (std::size_t c = 0; c < h.freqs.size(); ++c) {
        acc += h.freqs[c];
        if (r < acc) return static_cast<int>(c);
    }
    return static_cast<int>(h.freqs.size()) - 1;
}

void apply_domain(Matrix& features, Domain domain, const FederationSpec& spec,
                  std::mt19937_64& rng) {
    if (domain == Domain::Noisy) {
        std::normal_distribution<double> noise(0.0, spec.noise_scale);
        for (double& v : features.values()) v += noise(rng);
    } else if (domain == Domain::Blurred) {
        // Moving average across adjacent feature dimensions, clamped at edges.
        const int w = spec.blur_width;
        const int half = w / 2;
        std::vector<double> row(features.cols());
        for (std::size_t i = 0; i < features.rows(); ++i) {
            for (std::size_t j = 0; j < features.cols(); ++j) {
                double acc = 0.0;
                int cnt = 0;
                for (int o = -half; o <= half; ++o) {
                    const long jj = static_cast<long>(j) + o;
                    if (jj < 0 || jj >= static_cast<long>(features.cols())) continue;
                    acc += features(i, static_cast<std::size_t>(jj));
                    ++cnt;
                }
                row[j] = acc / cnt;
            }
            for (std::size_t j = 0; j < features.cols(); ++j) features(i, j) = row[j];
        }
    }
}

}  // namespace

Federation make_federation(const FederationSpec& spec) {
    validate(spec);
    Federation fed;
    fed.classes = spec.classes;
    fed.features = spec.features;
    fed.groups = spec.groups;
    fed.seed = spec.seed;
    fed.clients.reserve(spec.clients);

    ClientId next_id = 0;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const GroupSpec& group = spec.groups[g];
        for (int m = 0; m < group.size; ++m, ++next_id) {
            // Independent per-client stream so clients are order-insensitive.
            auto rng = make_engine(mix_seed({static_cast<std::uint64_t>(SeedDomain::Datagen),
                                             spec.seed,
                                             static_cast<std::uint64_t>(next_id)}));
            FederationClient client;
            client.id = next_id;
            client.group = static_cast<int>(g);
            client.domain = group.domain;
            client.histogram = dirichlet_partition(group.dirichlet_alpha, spec.classes, rng);

            const int n = spec.samples_per_client;
            Matrix features(static_cast<std::size_t>(n), static_cast<std::size_t>(spec.features));
            std::vector<int> labels(n);
            std::normal_distribution<double> unit(0.0, 1.0);
            for (int i = 0; i < n; ++i) {
                const int cls = draw_class(client.histogram, rng);
                labels[i] = cls;
                const double sigma =
                    1.0 + (spec.class_spread - 1.0) *
                              (spec.classes > 1
                                   ? static_cast<double>(cls) / (spec.classes - 1)
                                   : 0.0);
                for (int j = 0; j < spec.features; ++j) {
                    const double mean = (j == cls) ? spec.feature_scale : 0.0;
                    features(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                        mean + sigma * unit(rng);
                }
            }
            apply_domain(features, group.domain, spec, rng);

            const int n_train = (n * 4) / 5;
            client.train.features =
                Matrix(static_cast<std::size_t>(n_train), static_cast<std::size_t>(spec.features));
            client.train.labels.assign(labels.begin(), labels.begin() + n_train);
            client.test.features = Matrix(static_cast<std::size_t>(n - n_train),
                                          static_cast<std::size_t>(spec.features));
            client.test.labels.assign(labels.begin() + n_train, labels.end());
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < spec.features; ++j) {
                    if (i < n_train)
                        client.train.features(i, j) = features(i, j);
                    else
                        client.test.features(i - n_train, j) = features(i, j);
                }

            fed.clients.push_back(std::move(client));
        }
    }
    return fed;
}

ClassHistogram empirical_histogram(const ClientDataset& data, int classes) {
    ClassHistogram h;
    h.freqs.assign(classes, 0.0);
    if (data.size() == 0) return h;
    for (int y : data.labels) h.freqs.at(y) += 1.0;
    for (double& f : h.freqs) f /= static_cast<double>(data.size());
    return h;
}

}  // namespace fedgwc
