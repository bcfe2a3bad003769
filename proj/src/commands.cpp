#include "homeguard/commands.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "homeguard/access.hpp"
#include "homeguard/bench.hpp"
#include "homeguard/util.hpp"

namespace homeguard {

namespace {

bool write_text_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "cannot open \"" << path << "\" for writing\n";
        return false;
    }
    out << text;
    out.flush();
    if (!out) {
        err << "failed while writing \"" << path << "\"\n";
        return false;
    }
    return true;
}

RssiExperiment experiment_from_config(const Config& config) {
    RssiExperiment exp;
    if (config.profile_is_custom)
        exp.profiles = {config.profile};
    else
        exp.profiles = builtin_profiles();
    exp.distances_m = config.experiment.distances_m;
    exp.n_samples = config.experiment.n_samples;
    exp.kalman = config.kalman.model;
    exp.x0_policy = config.kalman.x0_policy;
    exp.initial_covariance = config.kalman.initial_covariance;
    exp.seed = config.experiment.seed;
    return exp;
}

Deployment::Options deployment_options(const Config& config) {
    Deployment::Options opt;
    opt.workspace = config.workspace;
    opt.anchors = config.anchors;
    opt.profile = config.profile;
    for (const auto& id : config.trust) opt.trust.entries.insert(id);
    opt.chain = config.chain;
    opt.kalman = config.kalman.model;
    opt.x0_policy = config.kalman.x0_policy;
    opt.initial_covariance = config.kalman.initial_covariance;
    opt.samples_per_request = config.experiment.n_samples;
    return opt;
}

struct AccessRequest {
    std::string device_id;
    double x = 0.0;
    double y = 0.0;
};

std::vector<AccessRequest> parse_requests(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("requests: ") + e.what());
    }
    if (!root.is_array()) throw std::runtime_error("requests: top level must be a JSON array");
    std::vector<AccessRequest> requests;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const std::string where = "requests[" + std::to_string(i) + "]";
        const auto& jr = root[i];
        if (!jr.is_object()) throw std::runtime_error(where + " must be an object");
        for (const auto& [key, _] : jr.items())
            if (key != "device_id" && key != "x" && key != "y")
                throw std::runtime_error(where + ": unknown key \"" + key + "\"");
        if (!jr.contains("device_id") || !jr.at("device_id").is_string())
            throw std::runtime_error(where + ": \"device_id\" must be a string");
        AccessRequest req;
        req.device_id = jr.at("device_id").get<std::string>();
        if (req.device_id.empty())
            throw std::runtime_error(where + ": \"device_id\" must be nonempty");
        if (!jr.contains("x") || !jr.at("x").is_number())
            throw std::runtime_error(where + ": \"x\" must be a number");
        if (!jr.contains("y") || !jr.at("y").is_number())
            throw std::runtime_error(where + ": \"y\" must be a number");
        req.x = jr.at("x").get<double>();
        req.y = jr.at("y").get<double>();
        requests.push_back(std::move(req));
    }
    return requests;
}

}  // namespace

int cmd_simulate_rssi(const Config& config, const std::string& out_csv,
                      const std::string& out_json, std::ostream& out, std::ostream& err) {
    try {
        const auto result = run_rssi_experiment(experiment_from_config(config));

        if (!out_csv.empty()) {
            std::ostringstream csv;
            write_sample_csv(csv, result.rows);
            if (!write_text_file(out_csv, csv.str(), err)) return 1;
        }
        if (!out_json.empty()) {
            if (!write_text_file(out_json, rmse_reports_to_json(result.reports) + "\n", err))
                return 1;
        }
        for (const auto& r : result.reports) {
            out << r.technology << " d=" << format_fixed(r.distance_m, 2)
                << " m: rmse_raw=" << format_fixed(r.rmse_raw, 6)
                << " rmse_filtered=" << format_fixed(r.rmse_filtered, 6)
                << " (n=" << r.n_samples << ")\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "simulate-rssi: " << e.what() << "\n";
        return 1;
    }
}

int cmd_bench_chain(const Config& config, const std::string& out_json, std::ostream& out,
                    std::ostream& err) {
    try {
        auto payloads = make_bench_payload_source(config.experiment.seed);
        const auto [private_report, public_report] = run_latency_experiment(
            config.experiment.trials, config.chain.difficulty, payloads);
        if (!out_json.empty()) {
            const auto text = latency_reports_to_json(private_report, public_report);
            if (!write_text_file(out_json, text + "\n", err)) return 1;
        }
        for (const auto* r : {&private_report, &public_report}) {
            out << to_string(r->mode);
            if (r->mode == ChainMode::Public) out << " (difficulty " << r->difficulty << ")";
            out << ": mean=" << format_fixed(r->mean_seconds, 9)
                << " min=" << format_fixed(r->min_seconds, 9)
                << " max=" << format_fixed(r->max_seconds, 9) << " s over " << r->trials
                << " trials\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "bench-chain: " << e.what() << "\n";
        return 1;
    }
}

int cmd_run_access(const Config& config, const std::string& requests_path,
                   const std::string& out_chain_json, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(requests_path);
        if (!in) {
            err << "run-access: cannot open \"" << requests_path << "\"\n";
            return 1;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto requests = parse_requests(buf.str());

        Deployment deployment(deployment_options(config));
        std::mt19937_64 rng(config.experiment.seed);
        for (const auto& req : requests) {
            const auto decision =
                deployment.request_admission(DeviceIdentity{req.device_id, req.x, req.y}, rng);
            out << req.device_id << (decision.granted ? " granted " : " denied ")
                << to_string(decision.reason) << "\n";
        }
        if (!out_chain_json.empty()) {
            if (!write_text_file(out_chain_json, dump_chain(deployment.chain()) + "\n", err))
                return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "run-access: " << e.what() << "\n";
        return 1;
    }
}

int cmd_verify_chain(const std::string& chain_path, std::ostream& out, std::ostream& err,
                     const std::optional<ChainConfig>& chain_config) {
    try {
        std::ifstream in(chain_path);
        if (!in) {
            err << "verify-chain: cannot open \"" << chain_path << "\"\n";
            return 1;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto chain = load_chain(buf.str(), chain_config.value_or(ChainConfig{}));
        const auto result = chain.verify();
        if (result.ok) {
            out << "chain OK: " << chain.size() << " blocks\n";
            return 0;
        }
        out << "chain INVALID at block " << *result.first_bad_index << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "verify-chain: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace homeguard
