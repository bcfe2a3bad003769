#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "homeguard/commands.hpp"

namespace {

using homeguard::ChainConfig;
using homeguard::ChainMode;
using homeguard::Config;

Config load_or_default(const std::string& path) {
    return path.empty() ? homeguard::default_config() : homeguard::load_config_file(path);
}

std::string strip_known_extension(std::string stem) {
    for (const char* ext : {".csv", ".json"}) {
        const std::string suffix(ext);
        if (stem.size() > suffix.size() &&
            stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0)
            return stem.substr(0, stem.size() - suffix.size());
    }
    return stem;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smart-home access layer: permissioned ledger, RSSI filtering, localization"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> trials_override;
    std::optional<unsigned> difficulty_override;

    auto add_common = [&](CLI::App* cmd, bool with_seed) {
        cmd->add_option("--config", config_path, "deployment config JSON file");
        if (with_seed)
            cmd->add_option("--seed", seed_override, "override the experiment seed");
    };

    auto* sim = app.add_subcommand("simulate-rssi",
                                   "sweep RSSI sampling and filtering, report RMSE");
    std::string sim_out = "rssi_samples";
    std::string sim_format;
    add_common(sim, true);
    sim->add_option("--out", sim_out, "output stem; writes <stem>.csv and <stem>.json");
    sim->add_option("--format", sim_format, "restrict output to one artifact")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* bench = app.add_subcommand("bench-chain",
                                     "measure private append vs public mining latency");
    std::string bench_out = "chain_latency.json";
    add_common(bench, true);
    bench->add_option("--out", bench_out, "latency report JSON file");
    bench->add_option("--trials", trials_override, "override the trial count");
    bench->add_option("--difficulty", difficulty_override, "override the mining difficulty");

    auto* run = app.add_subcommand("run-access", "process admission requests onto a chain");
    std::string requests_path;
    std::string run_out = "chain_dump.json";
    add_common(run, true);
    run->add_option("requests", requests_path, "JSON array of {device_id, x, y}")->required();
    run->add_option("--out", run_out, "chain dump JSON file");

    auto* verify = app.add_subcommand("verify-chain", "check a chain dump for tampering");
    std::string chain_path;
    add_common(verify, false);
    verify->add_option("chain", chain_path, "chain dump JSON file")->required();
    verify->add_option("--difficulty", difficulty_override,
                       "also require proof-of-work at this difficulty");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            Config config = load_or_default(config_path);
            if (seed_override) config.experiment.seed = *seed_override;
            const std::string stem = strip_known_extension(sim_out);
            const std::string out_csv = sim_format == "json" ? "" : stem + ".csv";
            const std::string out_json = sim_format == "csv" ? "" : stem + ".json";
            return homeguard::cmd_simulate_rssi(config, out_csv, out_json, std::cout, std::cerr);
        }
        if (bench->parsed()) {
            Config config = load_or_default(config_path);
            if (seed_override) config.experiment.seed = *seed_override;
            if (trials_override) config.experiment.trials = *trials_override;
            if (difficulty_override) config.chain.difficulty = *difficulty_override;
            return homeguard::cmd_bench_chain(config, bench_out, std::cout, std::cerr);
        }
        if (run->parsed()) {
            Config config = load_or_default(config_path);
            if (seed_override) config.experiment.seed = *seed_override;
            return homeguard::cmd_run_access(config, requests_path, run_out, std::cout,
                                             std::cerr);
        }
        if (verify->parsed()) {
            std::optional<ChainConfig> chain_config;
            if (difficulty_override)
                chain_config = ChainConfig{ChainMode::Public, *difficulty_override};
            else if (!config_path.empty())
                chain_config = load_or_default(config_path).chain;
            return homeguard::cmd_verify_chain(chain_path, std::cout, std::cerr, chain_config);
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 1;
}
