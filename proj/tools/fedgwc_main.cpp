#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedgwc/commands.hpp"

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const fedgwc::DivergenceError*>(&e)) return 3;
    if (dynamic_cast<const fedgwc::IoError*>(&e)) return 4;
    if (dynamic_cast<const fedgwc::ConfigError*>(&e) ||
        dynamic_cast<const fedgwc::ShapeError*>(&e) ||
        dynamic_cast<const fedgwc::DomainError*>(&e) ||
        dynamic_cast<const fedgwc::CohortError*>(&e))
        return 2;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedgwc: deterministic clustered federated-learning simulator"};
    app.require_subcommand(1);

    std::string config_path, federation_dir, run_dir, out_dir;
    std::vector<std::string> overrides;
    int cluster_id = -1;
    std::optional<double> beta;

    auto* generate = app.add_subcommand("generate", "Generate a synthetic federation");
    generate->add_option("--config", config_path, "Config file")->required();
    generate->add_option("--out", out_dir, "Output federation directory");
    generate->add_option("--set", overrides, "Override config keys (section.key=value)");

    auto* run = app.add_subcommand("run", "Run the clustered training procedure");
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--federation", federation_dir, "Generated federation directory")->required();
    run->add_option("--out", out_dir, "Output run directory");
    run->add_option("--set", overrides, "Override config keys (section.key=value)");

    auto* eval = app.add_subcommand("eval", "Score a run's labeling against the federation");
    eval->add_option("--federation", federation_dir, "Federation directory")->required();
    eval->add_option("--run", run_dir, "Run directory")->required();

    auto* report = app.add_subcommand("report", "Emit plot-ready tables for a run");
    report->add_option("--run", run_dir, "Run directory")->required();

    auto* dump = app.add_subcommand("dump-state", "Write P and W matrices as text");
    dump->add_option("--run", run_dir, "Run directory")->required();
    dump->add_option("--cluster", cluster_id, "Cluster id (default: all)");
    double beta_arg = -1.0;
    auto* beta_opt = dump->add_option("--beta", beta_arg, "RBF spread for W (default: from manifest)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) fedgwc::cmd_generate(config_path, out_dir, overrides);
        if (*run) fedgwc::cmd_run(config_path, federation_dir, out_dir, overrides);
        if (*eval) fedgwc::cmd_eval(federation_dir, run_dir);
        if (*report) fedgwc::cmd_report(run_dir);
        if (*dump) {
            if (beta_opt->count() > 0) beta = beta_arg;
            fedgwc::cmd_dump_state(run_dir, cluster_id, beta);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
