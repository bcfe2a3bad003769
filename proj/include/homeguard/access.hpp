#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "homeguard/kalman.hpp"
#include "homeguard/ledger.hpp"
#include "homeguard/localization.hpp"
#include "homeguard/radio.hpp"

namespace homeguard {

enum class AdmissionReason { Trusted, UntrustedIdentity, OutOfBounds };

const char* to_string(AdmissionReason reason);
AdmissionReason admission_reason_from_string(const std::string& s);

// A device asking for access. The position is simulation ground truth used
// only to synthesize channel samples; the decision path never reads it.
struct DeviceIdentity {
    std::string device_id;
    double x = 0.0;
    double y = 0.0;
};

struct AdmissionDecision {
    bool granted = false;
    AdmissionReason reason = AdmissionReason::UntrustedIdentity;
    std::optional<PositionEstimate> position;  // absent for untrusted denials
    std::string diagnostic;                    // set when localization could not run
};

// Contract handler that turns an RssiReport body into a PositionRecord.
// Reports naming fewer than 3 known anchors yield no follow-up.
ContractHandler make_localization_contract(std::vector<Anchor> anchors, RadioProfile profile);

// One admission domain: workspace, anchors, radio channel, trust list and the
// ledger every decision is chained to. Requests are processed sequentially;
// the deployment owns its chain.
class Deployment {
public:
    struct Options {
        Workspace workspace{};
        std::vector<Anchor> anchors;  // empty selects the corner default
        RadioProfile profile = wifi_profile();
        TrustList trust{};
        ChainConfig chain{};
        KalmanModel kalman{};
        InitialEstimatePolicy x0_policy = InitialEstimatePolicy::FirstMeasurement;
        double initial_covariance = 4.0;  // P0
        int samples_per_request = 100;
        double bounds_margin_m = 0.5;  // slack beyond the workspace rectangle
    };

    explicit Deployment(Options opts);

    // Full admission cycle: sample the channel per anchor, chain the filtered
    // RssiReport (the localization contract appends a PositionRecord), check
    // trust, check bounds, chain the decision. Three blocks per request.
    AdmissionDecision request_admission(const DeviceIdentity& device, std::mt19937_64& rng);

    const Chain& chain() const { return chain_; }
    Chain& chain() { return chain_; }
    const Options& options() const { return opts_; }

private:
    Options opts_;
    Chain chain_;
};

struct AuditEntry {
    std::string device_id;
    bool granted = false;
    AdmissionReason reason = AdmissionReason::UntrustedIdentity;
    // Position disclosed in the decision body itself, when present.
    std::optional<std::pair<double, double>> decision_position;
    // Paired PositionRecord chained by the localization contract.
    std::optional<std::pair<double, double>> recorded_position;
};

// All admission decisions in chain order with their paired position records.
// Refuses to audit a chain that fails verification.
std::vector<AuditEntry> audit_trail(const Chain& chain);

}  // namespace homeguard
