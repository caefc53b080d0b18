#include "fedgwc/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fedgwc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

namespace {

std::string client_file_name(ClientId id, const char* kind) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "client_%04d.%s.tsv", static_cast<int>(id), kind);
    return std::string(buf);
}

std::string dataset_to_tsv(const ClientDataset& data) {
    std::string out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        out += std::to_string(data.labels[i]);
        for (std::size_t j = 0; j < data.features.cols(); ++j) {
            out += '\t';
            out += format_double(data.features(i, j));
        }
        out += '\n';
    }
    return out;
}

ClientDataset dataset_from_tsv(const std::string& text, int features, const fs::path& where) {
    std::vector<int> labels;
    std::vector<double> values;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int label;
        if (!(row >> label)) throw IoError("bad label line in " + where.string());
        labels.push_back(label);
        for (int j = 0; j < features; ++j) {
            double v;
            if (!(row >> v)) throw IoError("short feature row in " + where.string());
            values.push_back(v);
        }
    }
    ClientDataset data;
    data.labels = std::move(labels);
    data.features = Matrix(data.labels.size(), static_cast<std::size_t>(features));
    data.features.values() = std::move(values);
    return data;
}

}  // namespace

void write_federation(const fs::path& dir, const Federation& fed, const json& config_snapshot) {
    fs::create_directories(dir);
    json manifest;
    manifest["version"] = std::string(kVersion);
    manifest["classes"] = fed.classes;
    manifest["features"] = fed.features;
    manifest["seed"] = fed.seed;
    if (fed.has_ground_truth()) {
        json groups = json::array();
        for (const auto& g : fed.groups)
            groups.push_back({{"size", g.size},
                              {"alpha", g.dirichlet_alpha},
                              {"domain", to_string(g.domain)}});
        manifest["groups"] = groups;
    }
    if (!config_snapshot.is_null()) manifest["config"] = config_snapshot;

    json clients = json::array();
    std::vector<std::string> files;
    for (const auto& c : fed.clients) {
        const std::string train_name = client_file_name(c.id, "train");
        const std::string test_name = client_file_name(c.id, "test");
        write_text_file(dir / train_name, dataset_to_tsv(c.train));
        write_text_file(dir / test_name, dataset_to_tsv(c.test));
        files.push_back(train_name);
        files.push_back(test_name);
        json jc;
        jc["id"] = c.id;
        jc["group"] = c.group;
        jc["domain"] = to_string(c.domain);
        jc["histogram"] = c.histogram.freqs;
        jc["train"] = train_name;
        jc["test"] = test_name;
        clients.push_back(jc);
    }
    manifest["clients"] = clients;
    json hashes;
    for (const auto& f : files) hashes[f] = hash_file(dir / f);
    manifest["hashes"] = hashes;
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Federation load_federation(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path))
        throw IoError("no federation manifest at " + manifest_path.string());
    const json manifest = read_json_file(manifest_path);

    Federation fed;
    fed.classes = manifest.at("classes").get<int>();
    fed.features = manifest.at("features").get<int>();
    fed.seed = manifest.value("seed", std::uint64_t{0});
    if (manifest.contains("groups")) {
        for (const auto& g : manifest.at("groups")) {
            GroupSpec spec;
            spec.size = g.at("size").get<int>();
            spec.dirichlet_alpha = g.at("alpha").get<double>();
            spec.domain = domain_from_string(g.at("domain").get<std::string>());
            fed.groups.push_back(spec);
        }
    }
    for (const auto& jc : manifest.at("clients")) {
        FederationClient c;
        c.id = jc.at("id").get<ClientId>();
        c.group = jc.value("group", 0);
        c.domain = domain_from_string(jc.value("domain", std::string("clean")));
        c.histogram.freqs = jc.at("histogram").get<std::vector<double>>();
        c.train = dataset_from_tsv(read_text_file(dir / jc.at("train").get<std::string>()),
                                   fed.features, dir / jc.at("train").get<std::string>());
        c.test = dataset_from_tsv(read_text_file(dir / jc.at("test").get<std::string>()),
                                  fed.features, dir / jc.at("test").get<std::string>());
        fed.clients.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < fed.clients.size(); ++i)
        if (fed.clients[i].id != static_cast<ClientId>(i))
            throw IoError("federation manifest clients must be listed by id");
    return fed;
}

void write_matrix_text(const fs::path& path, const std::string& name, const Matrix& m,
                       const std::vector<ClientId>& ids) {
    std::string out = "fedgwc-matrix " + name + "\n";
    out += "K " + std::to_string(m.rows()) + "\n";
    out += "ids";
    for (ClientId id : ids) out += " " + std::to_string(id);
    out += "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ' ';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

json interaction_to_json(const InteractionState& state) {
    json doc;
    doc["clients"] = state.clients;
    doc["alpha"] = state.alpha;
    doc["round"] = state.round;
    doc["mse_signal"] = state.mse_signal;
    doc["P"] = state.P.values();
    doc["initial"] = state.initial.values();
    return doc;
}

InteractionState interaction_from_json(const json& doc) {
    InteractionState s;
    s.clients = doc.at("clients").get<std::vector<ClientId>>();
    s.alpha = doc.at("alpha").get<double>();
    s.round = doc.at("round").get<long>();
    s.mse_signal = doc.at("mse_signal").get<double>();
    const std::size_t n = s.clients.size();
    s.P = Matrix(n, n);
    s.P.values() = doc.at("P").get<std::vector<double>>();
    s.initial = Matrix(n, n);
    s.initial.values() = doc.at("initial").get<std::vector<double>>();
    if (s.P.values().size() != n * n || s.initial.values().size() != n * n)
        throw IoError("interaction state matrix size mismatch");
    return s;
}

namespace {

json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

json db_map_to_json(const std::map<int, double>& db) {
    json out = json::object();
    for (const auto& [n, v] : db) out[std::to_string(n)] = finite_or_string(v);
    return out;
}

}  // namespace

void write_log_jsonl(const fs::path& path, const ExperimentLog& log) {
    std::string out;
    std::size_t ir = 0, ic = 0, is = 0, ia = 0, ie = 0;
    // All vectors are chronological; merge them round by round.
    for (long t = 0; t <= log.rounds_run; ++t) {
        while (ir < log.rounds.size() && log.rounds[ir].round == t) {
            const auto& r = log.rounds[ir++];
            json line{{"type", "round"}, {"round", r.round},      {"cluster", r.cluster},
                      {"cohort", r.cohort}, {"mean_loss", r.mean_loss}, {"n_cl", r.n_cl}};
            out += line.dump() + "\n";
        }
        while (ia < log.aborts.size() && log.aborts[ia].round == t) {
            const auto& a = log.aborts[ia++];
            json line{{"type", "abort"}, {"round", a.round}, {"cluster", a.cluster},
                      {"reason", a.reason}};
            out += line.dump() + "\n";
        }
        while (ic < log.checks.size() && log.checks[ic].round == t) {
            const auto& c = log.checks[ic++];
            json line{{"type", "check"},
                      {"round", c.round},
                      {"cluster", c.cluster},
                      {"db", db_map_to_json(c.db_scores)},
                      {"n_cl", c.n_cl}};
            out += line.dump() + "\n";
        }
        while (is < log.splits.size() && log.splits[is].round == t) {
            const auto& s = log.splits[is++];
            json line{{"type", "split"},
                      {"round", s.round},
                      {"parent", s.parent},
                      {"children", s.children},
                      {"members", s.members}};
            out += line.dump() + "\n";
        }
        while (ie < log.evals.size() && log.evals[ie].round == t) {
            const auto& e = log.evals[ie++];
            json line{{"type", "eval"}, {"round", e.round}, {"cluster", e.cluster},
                      {"balanced_accuracy", e.balanced_accuracy}};
            out += line.dump() + "\n";
        }
    }
    json summary{{"type", "summary"},
                 {"rounds", log.rounds_run},
                 {"n_cl", log.final_n_cl},
                 {"mean_balanced_accuracy", log.mean_balanced_accuracy}};
    out += summary.dump() + "\n";
    write_text_file(path, out);
}

json tree_to_json(const ExperimentLog& log) {
    json nodes = json::array();
    for (const auto& n : log.tree)
        nodes.push_back({{"id", n.id},
                         {"parent", n.parent},
                         {"created_round", n.created_round},
                         {"split_round", n.split_round},
                         {"children", n.children},
                         {"members", n.members}});
    return json{{"version", std::string(kVersion)}, {"nodes", nodes}};
}

json labeling_to_json(const ExperimentLog& log) {
    json clusters = json::array();
    for (std::size_t i = 0; i < log.final_clusters.size(); ++i)
        clusters.push_back({{"index", i},
                            {"cluster_id", log.final_clusters[i].id},
                            {"members", log.final_clusters[i].members}});
    std::vector<int> labels(log.final_labels.size(), 0);
    for (const auto& [client, idx] : log.final_labels)
        labels.at(static_cast<std::size_t>(client)) = idx;
    return json{{"version", std::string(kVersion)},
                {"n_cl", log.final_n_cl},
                {"clusters", clusters},
                {"labels", labels}};
}

json metrics_to_json(const ExperimentLog& log) {
    json clusters = json::array();
    for (std::size_t i = 0; i < log.final_clusters.size(); ++i) {
        const auto& c = log.final_clusters[i];
        clusters.push_back({{"index", i},
                            {"cluster_id", c.id},
                            {"size", c.members.size()},
                            {"balanced_accuracy", c.balanced_accuracy}});
    }
    return json{{"version", std::string(kVersion)},
                {"mean_balanced_accuracy", log.mean_balanced_accuracy},
                {"n_cl", log.final_n_cl},
                {"clusters", clusters}};
}

void write_model_text(const fs::path& path, const ModelParams& model) {
    std::string out = "n " + std::to_string(model.values.size()) + "\n";
    for (double v : model.values) out += format_double(v) + "\n";
    write_text_file(path, out);
}

std::string hash_file(const fs::path& path) {
    const std::string bytes = read_text_file(path);
    return to_hex(fnv1a(bytes.data(), bytes.size()));
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config_snapshot,
                    std::uint64_t seed, const std::vector<std::string>& outputs) {
    json manifest;
    manifest["version"] = std::string(kVersion);
    manifest["command"] = command;
    manifest["seed"] = seed;
    manifest["config"] = config_snapshot;
    manifest["outputs"] = outputs;
    json hashes;
    for (const auto& rel : outputs) {
        const fs::path p = dir / rel;
        if (!fs::exists(p)) throw IoError("manifest references missing artifact " + p.string());
        hashes[rel] = hash_file(p);
    }
    manifest["hashes"] = hashes;
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace fedgwc
