#include "fedgwc/config.hpp"

#include <cmath>
#include <fstream>

namespace fedgwc {

using nlohmann::json;

namespace {

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    try {
        return v->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
    const json* v = find(obj, key);
    if (!v) throw ConfigError("missing required key " + where + "." + key);
    try {
        return v->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

}  // namespace

json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        // e.byte is the offset of the failure; report it with the file name.
        throw ConfigError("config " + path + ": " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    std::string pointer = "/";
    for (char c : key) pointer += (c == '.') ? '/' : c;
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // plain string value
    }
    doc[json::json_pointer(pointer)] = parsed;
}

Config parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    Config cfg;

    const json* fed = find(doc, "federation");
    if (!fed) throw ConfigError("missing required section 'federation'");
    cfg.federation.clients = require<int>(*fed, "K", "federation");
    cfg.federation.seed = get_or<std::uint64_t>(*fed, "seed", 0, "federation");
    const json* part = find(*fed, "partition");
    if (!part) throw ConfigError("missing required section 'federation.partition'");
    cfg.federation.classes = require<int>(*part, "classes", "federation.partition");
    cfg.federation.features = require<int>(*part, "features", "federation.partition");
    cfg.federation.samples_per_client =
        require<int>(*part, "samples_per_client", "federation.partition");
    cfg.federation.feature_scale =
        get_or<double>(*part, "feature_scale", 3.0, "federation.partition");
    cfg.federation.noise_scale =
        get_or<double>(*part, "noise_scale", 2.0, "federation.partition");
    cfg.federation.blur_width = get_or<int>(*part, "blur_width", 3, "federation.partition");
    cfg.federation.class_spread =
        get_or<double>(*part, "class_spread", 1.0, "federation.partition");
    const json* groups = find(*part, "groups");
    if (!groups || !groups->is_array() || groups->empty())
        throw ConfigError("federation.partition.groups must be a non-empty array");
    for (std::size_t i = 0; i < groups->size(); ++i) {
        const json& g = (*groups)[i];
        const std::string where = "federation.partition.groups[" + std::to_string(i) + "]";
        GroupSpec spec;
        spec.size = require<int>(g, "size", where);
        spec.dirichlet_alpha = require<double>(g, "alpha", where);
        spec.domain = domain_from_string(get_or<std::string>(g, "domain", "clean", where));
        cfg.federation.groups.push_back(spec);
    }
    validate(cfg.federation);

    const json* train = find(doc, "training");
    if (!train) throw ConfigError("missing required section 'training'");
    cfg.training.rounds = require<long>(*train, "T", "training");
    if (const json* s = find(*train, "S")) cfg.training.trace_len = s->get<int>();
    cfg.training.learning_rate = get_or<double>(*train, "lr", 0.01, "training");
    cfg.training.weight_decay = get_or<double>(*train, "weight_decay", 4e-4, "training");
    cfg.training.batch_size = get_or<int>(*train, "batch_size", 64, "training");
    cfg.training.local_epochs = get_or<int>(*train, "local_epochs", 1, "training");
    cfg.training.aggregator = get_or<std::string>(*train, "aggregator", "fedavg", "training");
    cfg.training.prox_mu = get_or<double>(*train, "prox_mu", 0.0, "training");
    cfg.training.server_momentum = get_or<double>(*train, "server_momentum", 0.0, "training");
    cfg.training.model = get_or<std::string>(*train, "model", "softmax", "training");
    cfg.training.hidden = get_or<int>(*train, "hidden", 16, "training");
    cfg.training.eval_every = get_or<long>(*train, "eval_every", 10, "training");
    if (cfg.training.rounds < 0) throw ConfigError("training.T must be >= 0");
    if (cfg.training.batch_size < 1) throw ConfigError("training.batch_size must be positive");
    if (cfg.training.local_epochs < 1) throw ConfigError("training.local_epochs must be positive");
    if (cfg.training.prox_mu < 0.0) throw ConfigError("training.prox_mu must be >= 0");
    if (cfg.training.model != "softmax" && cfg.training.model != "mlp")
        throw ConfigError("training.model must be 'softmax' or 'mlp'");
    if (cfg.training.model == "mlp" && cfg.training.hidden < 1)
        throw ConfigError("training.hidden must be positive");
    agg_method_from_string(cfg.training.aggregator);

    const json* fg = find(doc, "fedgwc");
    if (!fg) throw ConfigError("missing required section 'fedgwc'");
    cfg.fedgwc.rho = get_or<double>(*fg, "rho", 0.1, "fedgwc");
    cfg.fedgwc.alpha = get_or<double>(*fg, "alpha", cfg.fedgwc.rho, "fedgwc");
    cfg.fedgwc.epsilon = get_or<double>(*fg, "epsilon", 1e-5, "fedgwc");
    cfg.fedgwc.beta = get_or<double>(*fg, "beta", 0.5, "fedgwc");
    cfg.fedgwc.n_max = get_or<int>(*fg, "n_max", 5, "fedgwc");
    const int default_k_min = static_cast<int>(std::ceil(3.0 / cfg.fedgwc.rho));
    cfg.fedgwc.k_min = get_or<int>(*fg, "k_min", default_k_min, "fedgwc");
    if (!(cfg.fedgwc.rho > 0.0 && cfg.fedgwc.rho <= 1.0))
        throw ConfigError("fedgwc.rho must lie in (0,1]");
    if (!(cfg.fedgwc.alpha > 0.0 && cfg.fedgwc.alpha < 1.0))
        throw ConfigError("fedgwc.alpha must lie in (0,1)");
    if (!(cfg.fedgwc.epsilon > 0.0)) throw ConfigError("fedgwc.epsilon must be positive");
    if (!(cfg.fedgwc.beta > 0.0)) throw ConfigError("fedgwc.beta must be positive");
    if (cfg.fedgwc.n_max < 2) throw ConfigError("fedgwc.n_max must be at least 2");
    if (cfg.fedgwc.k_min < 1) throw ConfigError("fedgwc.k_min must be at least 1");

    // Resolved snapshot (defaults filled in) recorded by manifests.
    json snap = doc;
    snap["fedgwc"]["alpha"] = cfg.fedgwc.alpha;
    snap["fedgwc"]["epsilon"] = cfg.fedgwc.epsilon;
    snap["fedgwc"]["beta"] = cfg.fedgwc.beta;
    snap["fedgwc"]["n_max"] = cfg.fedgwc.n_max;
    snap["fedgwc"]["k_min"] = cfg.fedgwc.k_min;
    snap["fedgwc"]["rho"] = cfg.fedgwc.rho;
    cfg.snapshot = snap;
    return cfg;
}

ModelSpec model_spec_of(const Config& cfg) {
    ModelSpec spec;
    spec.type = cfg.training.model == "mlp" ? ModelSpec::Type::Mlp : ModelSpec::Type::Softmax;
    spec.features = cfg.federation.features;
    spec.classes = cfg.federation.classes;
    spec.hidden = cfg.training.hidden;
    return spec;
}

RunConfig to_run_config(const Config& cfg) {
    RunConfig rc;
    rc.rounds = cfg.training.rounds;
    rc.model = model_spec_of(cfg);
    rc.trainer.learning_rate = cfg.training.learning_rate;
    rc.trainer.weight_decay = cfg.training.weight_decay;
    rc.trainer.batch_size = cfg.training.batch_size;
    rc.trainer.local_epochs = cfg.training.local_epochs;
    rc.trainer.prox_mu = cfg.training.prox_mu;
    rc.aggregator = agg_method_from_string(cfg.training.aggregator);
    rc.server_momentum = cfg.training.server_momentum;
    rc.fedgwc = cfg.fedgwc;
    rc.seed = cfg.federation.seed;
    rc.eval_every = cfg.training.eval_every;
    if (cfg.training.trace_len) rc.expected_trace_len = *cfg.training.trace_len;
    return rc;
}

}  // namespace fedgwc
