#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homeguard/access.hpp"
#include "homeguard/kalman.hpp"
#include "homeguard/ledger.hpp"
#include "homeguard/localization.hpp"
#include "homeguard/radio.hpp"

namespace homeguard {

struct KalmanSettings {
    KalmanModel model{};
    InitialEstimatePolicy x0_policy = InitialEstimatePolicy::FirstMeasurement;
    double initial_covariance = 4.0;  // P0; defaults to R when a config omits it
};

struct ExperimentSettings {
    std::vector<double> distances_m{0.25, 0.5, 1.0};
    int n_samples = 100;
    int trials = 20;
    std::uint64_t seed = 0;
};

// Full deployment + experiment configuration. A config file must spell out
// every top-level section; unknown keys anywhere are rejected.
struct Config {
    Workspace workspace{};
    std::vector<Anchor> anchors;
    RadioProfile profile = wifi_profile();
    bool profile_is_custom = false;  // true when the file gave a full profile object
    std::vector<std::string> trust;
    ChainConfig chain{};
    KalmanSettings kalman{};
    ExperimentSettings experiment{};
};

// Stock testbed defaults: 4x3 m workspace, corner anchors, WiFi channel,
// private chain (difficulty 4 kept for the public-mode benchmark), distances
// {0.25, 0.5, 1} m, 100 samples, 20 trials.
Config default_config();

// Strict parse: every top-level key required, unknown keys rejected, embedded
// type invariants enforced. Errors carry the offending key or JSON location.
Config parse_config(const std::string& json_text);
Config load_config_file(const std::string& path);

// Canonical serialization; parse(serialize(c)) == c and re-serializing is
// byte-identical.
std::string config_to_json(const Config& config);

const char* to_string(InitialEstimatePolicy policy);
InitialEstimatePolicy x0_policy_from_string(const std::string& s);

}  // namespace homeguard
