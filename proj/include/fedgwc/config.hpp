#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedgwc/datagen.hpp"
#include "fedgwc/orchestrator.hpp"

namespace fedgwc {

/// One config file drives every pipeline stage. Sections: federation
/// (size, seed, partition recipe), training (rounds, optimizer, aggregator,
/// model), fedgwc (step size, tolerance, kernel spread, split guards).
struct Config {
    FederationSpec federation;

    struct Training {
        long rounds = 0;                 // T
        std::optional<int> trace_len;    // optional S cross-check
        double learning_rate = 0.01;
        double weight_decay = 4e-4;
        int batch_size = 64;
        int local_epochs = 1;
        std::string aggregator = "fedavg";
        double prox_mu = 0.0;
        double server_momentum = 0.0;
        std::string model = "softmax";
        int hidden = 16;
        long eval_every = 10;
    } training;

    FedGwcParams fedgwc;

    nlohmann::json snapshot;  // resolved values, written into manifests
};

/// Parse and validate a config JSON document. Missing fedgwc.k_min defaults
/// to ceil(3 / rho).
Config parse_config(const nlohmann::json& doc);

/// Load a config file; parse errors carry the file name and byte position.
nlohmann::json load_config_json(const std::string& path);

/// Apply a `section.key=value` override onto the raw document; the value is
/// parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Runtime view of the config for run_experiment.
RunConfig to_run_config(const Config& cfg);

/// Model architecture implied by the config and federation dimensions.
ModelSpec model_spec_of(const Config& cfg);

}  // namespace fedgwc
