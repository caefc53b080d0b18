#include "fedgwc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "fedgwc/config.hpp"
#include "fedgwc/io.hpp"
#include "fedgwc/metrics.hpp"

namespace fedgwc {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve_out_dir(const std::string& arg) {
    const char* root = std::getenv("FEDGWC_OUT");
    if (arg.empty()) {
        if (!root || !*root)
            throw ConfigError("no output directory given and FEDGWC_OUT is not set");
        return fs::path(root);
    }
    fs::path p(arg);
    if (p.is_relative() && root && *root) return fs::path(root) / p;
    return p;
}

namespace {

Config load_config_with_overrides(const std::string& config_path,
                                  const std::vector<std::string>& overrides, json* raw_out) {
    json doc = load_config_json(config_path);
    for (const auto& o : overrides) apply_override(doc, o);
    Config cfg = parse_config(doc);
    if (!overrides.empty()) cfg.snapshot["overrides"] = overrides;
    if (raw_out) *raw_out = doc;
    return cfg;
}

std::string cluster_file(const char* stem, int id, const char* ext) {
    return std::string(stem) + "_" + std::to_string(id) + ext;
}

}  // namespace

void cmd_generate(const std::string& config_path, const std::string& out_dir,
                  const std::vector<std::string>& overrides) {
    const Config cfg = load_config_with_overrides(config_path, overrides, nullptr);
    const fs::path dir = resolve_out_dir(out_dir);
    const Federation fed = make_federation(cfg.federation);
    write_federation(dir, fed, cfg.snapshot);
    std::cout << "generated " << fed.clients.size() << " clients in " << dir.string() << "\n";
}

void cmd_run(const std::string& config_path, const std::string& federation_dir,
             const std::string& out_dir, const std::vector<std::string>& overrides) {
    const Config cfg = load_config_with_overrides(config_path, overrides, nullptr);
    const fs::path fed_dir = resolve_out_dir(federation_dir);
    const Federation fed = load_federation(fed_dir);
    if (static_cast<int>(fed.clients.size()) != cfg.federation.clients)
        throw ConfigError("federation has " + std::to_string(fed.clients.size()) +
                          " clients but config says K = " +
                          std::to_string(cfg.federation.clients));
    if (fed.classes != cfg.federation.classes || fed.features != cfg.federation.features)
        throw ConfigError("federation dimensions do not match the config");

    const RunConfig rc = to_run_config(cfg);
    const ExperimentLog log = run_experiment(rc, fed);

    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    fs::create_directories(dir / "models");
    fs::create_directories(dir / "state");

    std::vector<std::string> outputs;
    write_log_jsonl(dir / "log.jsonl", log);
    outputs.push_back("log.jsonl");
    write_text_file(dir / "cluster_tree.json", tree_to_json(log).dump(2) + "\n");
    outputs.push_back("cluster_tree.json");
    write_text_file(dir / "labeling.json", labeling_to_json(log).dump(2) + "\n");
    outputs.push_back("labeling.json");
    write_text_file(dir / "metrics.json", metrics_to_json(log).dump(2) + "\n");
    outputs.push_back("metrics.json");
    for (std::size_t i = 0; i < log.final_clusters.size(); ++i) {
        const int id = log.final_clusters[i].id;
        const std::string model_rel = "models/" + cluster_file("cluster", id, ".txt");
        write_model_text(dir / model_rel, log.final_models[i]);
        outputs.push_back(model_rel);
        const std::string state_rel = "state/" + cluster_file("cluster", id, ".json");
        write_text_file(dir / state_rel, interaction_to_json(log.final_states[i]).dump() + "\n");
        outputs.push_back(state_rel);
    }
    write_manifest(dir, "run", cfg.snapshot, rc.seed, outputs);

    std::cout << "run complete: " << log.final_n_cl << " cluster(s), mean balanced accuracy "
              << log.mean_balanced_accuracy << ", log at " << (dir / "log.jsonl").string() << "\n";
}

void cmd_eval(const std::string& federation_dir, const std::string& run_dir) {
    const fs::path fed_dir = resolve_out_dir(federation_dir);
    const fs::path dir = resolve_out_dir(run_dir);
    const fs::path labeling_path = dir / "labeling.json";
    if (!fs::exists(labeling_path))
        throw IoError("no labeling record at " + labeling_path.string());
    const Federation fed = load_federation(fed_dir);
    const json labeling = read_json_file(labeling_path);
    const std::vector<int> labels = labeling.at("labels").get<std::vector<int>>();
    if (labels.size() != fed.clients.size())
        throw ConfigError("labeling covers " + std::to_string(labels.size()) +
                          " clients, federation has " + std::to_string(fed.clients.size()));
    const int n_cl = labeling.at("n_cl").get<int>();

    std::vector<ClassHistogram> histograms;
    histograms.reserve(fed.clients.size());
    for (const auto& c : fed.clients) histograms.push_back(c.histogram);

    json result;
    result["version"] = std::string(kVersion);
    result["n_cl"] = n_cl;
    if (n_cl >= 2) {
        result["was"] = was_score(histograms, labels);
        result["wadb"] = [&] {
            const double v = wadb_score(histograms, labels);
            return std::isfinite(v) ? json(v) : json("inf");
        }();
    }
    if (fed.has_ground_truth()) result["rand"] = rand_index(labels, fed.ground_truth());
    write_text_file(dir / "eval.json", result.dump(2) + "\n");
    std::cout << result.dump(2) << "\n";
}

void cmd_report(const std::string& run_dir) {
    const fs::path dir = resolve_out_dir(run_dir);
    const fs::path log_path = dir / "log.jsonl";
    if (!fs::exists(dir) || !fs::exists(log_path))
        throw IoError("no completed run at " + dir.string());
    const fs::path out = dir / "report";
    fs::create_directories(out);

    std::string accuracy = "round\tcluster\tbalanced_accuracy\n";
    std::string nclusters = "round\tn_cl\n";
    std::string db = "round\tcluster\tn\tdb\n";
    std::string splits = "round\tparent\tchildren\n";
    long last_ncl_round = -1;

    std::istringstream in(read_text_file(log_path));
    std::string line;
    json summary;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json rec = json::parse(line);
        const std::string type = rec.at("type").get<std::string>();
        if (type == "round") {
            const long round = rec.at("round").get<long>();
            if (round != last_ncl_round) {
                nclusters += std::to_string(round) + "\t" +
                             std::to_string(rec.at("n_cl").get<int>()) + "\n";
                last_ncl_round = round;
            }
        } else if (type == "eval") {
            accuracy += std::to_string(rec.at("round").get<long>()) + "\t" +
                        std::to_string(rec.at("cluster").get<int>()) + "\t" +
                        format_double(rec.at("balanced_accuracy").get<double>()) + "\n";
        } else if (type == "check") {
            for (const auto& [n, v] : rec.at("db").items()) {
                db += std::to_string(rec.at("round").get<long>()) + "\t" +
                      std::to_string(rec.at("cluster").get<int>()) + "\t" + n + "\t" +
                      (v.is_number() ? format_double(v.get<double>()) : v.get<std::string>()) +
                      "\n";
            }
        } else if (type == "split") {
            std::string kids;
            for (const auto& c : rec.at("children")) {
                if (!kids.empty()) kids += ",";
                kids += std::to_string(c.get<int>());
            }
            splits += std::to_string(rec.at("round").get<long>()) + "\t" +
                      std::to_string(rec.at("parent").get<int>()) + "\t" + kids + "\n";
        } else if (type == "summary") {
            summary = rec;
        }
    }
    if (summary.is_null()) throw IoError("log has no summary record; run did not complete");

    std::string metrics = "metric\tvalue\n";
    metrics += "rounds\t" + std::to_string(summary.at("rounds").get<long>()) + "\n";
    metrics += "n_cl\t" + std::to_string(summary.at("n_cl").get<int>()) + "\n";
    metrics += "mean_balanced_accuracy\t" +
               format_double(summary.at("mean_balanced_accuracy").get<double>()) + "\n";
    const fs::path eval_path = dir / "eval.json";
    if (fs::exists(eval_path)) {
        const json ev = read_json_file(eval_path);
        if (ev.contains("was")) metrics += "was\t" + format_double(ev.at("was").get<double>()) + "\n";
        if (ev.contains("wadb"))
            metrics += "wadb\t" + (ev.at("wadb").is_number()
                                       ? format_double(ev.at("wadb").get<double>())
                                       : ev.at("wadb").get<std::string>()) + "\n";
        if (ev.contains("rand"))
            metrics += "rand\t" + format_double(ev.at("rand").get<double>()) + "\n";
    }

    write_text_file(out / "accuracy_vs_round.tsv", accuracy);
    write_text_file(out / "nclusters_vs_round.tsv", nclusters);
    write_text_file(out / "db_candidates.tsv", db);
    write_text_file(out / "splits.tsv", splits);
    write_text_file(out / "metrics_summary.tsv", metrics);
    std::cout << "report written to " << out.string() << "\n";
}

void cmd_dump_state(const std::string& run_dir, int cluster_id, std::optional<double> beta) {
    const fs::path dir = resolve_out_dir(run_dir);
    const fs::path state_dir = dir / "state";
    if (!fs::exists(state_dir)) throw IoError("no state directory at " + state_dir.string());

    double beta_value = beta.value_or(0.0);
    if (!beta) {
        const fs::path manifest_path = dir / "manifest.json";
        if (!fs::exists(manifest_path))
            throw IoError("no manifest at " + manifest_path.string() + " (pass --beta)");
        const json manifest = read_json_file(manifest_path);
        beta_value = manifest.at("config").at("fedgwc").at("beta").get<double>();
    }

    const fs::path out = dir / "dump";
    fs::create_directories(out);
    std::vector<fs::path> state_files;
    for (const auto& entry : fs::directory_iterator(state_dir))
        if (entry.path().extension() == ".json") state_files.push_back(entry.path());
    std::sort(state_files.begin(), state_files.end());

    bool any = false;
    for (const auto& path : state_files) {
        const InteractionState state = interaction_from_json(read_json_file(path));
        const std::string stem = path.stem().string();  // cluster_<id>
        const int id = std::stoi(stem.substr(stem.rfind('_') + 1));
        if (cluster_id >= 0 && id != cluster_id) continue;
        any = true;
        write_matrix_text(out / ("P_" + std::to_string(id) + ".txt"), "P", state.P,
                          state.clients);
        if (state.size() >= 3) {
            const AffinityMatrix aff = build_affinity(state, beta_value);
            write_matrix_text(out / ("W_" + std::to_string(id) + ".txt"), "W", aff.W,
                              state.clients);
        }
        std::cout << "cluster " << id << ": K=" << state.size() << " round=" << state.round
                  << " mse=" << state.mse_signal << "\n";
    }
    if (!any) throw IoError("no matching cluster state in " + state_dir.string());
    std::cout << "matrices written to " << out.string() << "\n";
}

}  // namespace fedgwc
