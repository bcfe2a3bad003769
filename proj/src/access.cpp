#include "homeguard/access.hpp"

#include <cmath>
#include <stdexcept>

#include "homeguard/util.hpp"

namespace homeguard {

namespace {

// Pulls the per-anchor RSSI map out of a report body, keeping only anchors the
// deployment knows. Returns nullopt when the body has no usable "rssi" map.
std::optional<std::map<std::string, double>> rssi_map_from_body(
    const TxBody& body, const std::vector<Anchor>& anchors) {
    auto it = body.find("rssi");
    if (it == body.end()) return std::nullopt;
    const auto* entries = std::get_if<BodyMap>(&it->second);
    if (!entries) return std::nullopt;

    std::map<std::string, double> out;
    for (const auto& [anchor_id, text] : *entries) {
        bool known = false;
        for (const auto& a : anchors)
            if (a.id == anchor_id) {
                known = true;
                break;
            }
        if (!known) return std::nullopt;
        try {
            out[anchor_id] = parse_double(text);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return out;
}

}  // namespace

const char* to_string(AdmissionReason reason) {
    switch (reason) {
        case AdmissionReason::Trusted: return "Trusted";
        case AdmissionReason::UntrustedIdentity: return "UntrustedIdentity";
        case AdmissionReason::OutOfBounds: return "OutOfBounds";
    }
    throw std::logic_error("unreachable AdmissionReason");
}

AdmissionReason admission_reason_from_string(const std::string& s) {
    if (s == "Trusted") return AdmissionReason::Trusted;
    if (s == "UntrustedIdentity") return AdmissionReason::UntrustedIdentity;
    if (s == "OutOfBounds") return AdmissionReason::OutOfBounds;
    throw std::invalid_argument("unknown admission reason: \"" + s + "\"");
}

ContractHandler make_localization_contract(std::vector<Anchor> anchors, RadioProfile profile) {
    return [anchors = std::move(anchors),
            profile = std::move(profile)](const Transaction& tx) -> std::optional<Transaction> {
        auto rssi = rssi_map_from_body(tx.body, anchors);
        if (!rssi || rssi->size() < 3) return std::nullopt;
        PositionEstimate est;
        try {
            est = localize_device(*rssi, anchors, profile);
        } catch (const std::exception&) {
            return std::nullopt;  // degenerate geometry, nothing to record
        }
        return Transaction{TxKind::PositionRecord, tx.device_id,
                           {{"x", format_fixed(est.x)}, {"y", format_fixed(est.y)}}};
    };
}

Deployment::Deployment(Options opts) : opts_(std::move(opts)), chain_(opts_.chain) {
    if (opts_.anchors.empty()) opts_.anchors = corner_anchors(opts_.workspace);
    for (const auto& a : opts_.anchors)
        if (!opts_.workspace.contains(a.x, a.y))
            throw std::invalid_argument("deployment: anchor \"" + a.id +
                                        "\" lies outside the workspace");
    for (std::size_t i = 0; i < opts_.anchors.size(); ++i)
        for (std::size_t j = i + 1; j < opts_.anchors.size(); ++j)
            if (opts_.anchors[i].id == opts_.anchors[j].id)
                throw std::invalid_argument("deployment: duplicate anchor id \"" +
                                            opts_.anchors[i].id + "\"");
    if (opts_.samples_per_request < 1)
        throw std::invalid_argument("deployment: samples_per_request must be >= 1");
    chain_.register_contract(TxKind::RssiReport,
                             make_localization_contract(opts_.anchors, opts_.profile));
}

AdmissionDecision Deployment::request_admission(const DeviceIdentity& device,
                                                std::mt19937_64& rng) {
    if (device.device_id.empty())
        throw std::invalid_argument("request_admission: empty device_id");

    // Channel sampling and per-anchor smoothing. The report carries the
    // terminal filter estimate, rounded exactly as it will be chained.
    BodyMap filtered_text;
    for (const Anchor& a : opts_.anchors) {
        const double dist = std::hypot(device.x - a.x, device.y - a.y);
        std::vector<double> samples(static_cast<std::size_t>(opts_.samples_per_request));
        for (double& s : samples) s = sample_rssi(opts_.profile, dist, rng);
        const auto filtered =
            filter_series(samples, opts_.kalman, initial_estimate(opts_.x0_policy, samples),
                          opts_.initial_covariance);
        filtered_text[a.id] = format_fixed(filtered.back());
    }

    chain_.submit(Transaction{TxKind::RssiReport, device.device_id,
                              {{"rssi", filtered_text}}});

    // Localize from the same rounded values the contract saw, so the decision
    // and the chained PositionRecord always agree.
    std::optional<PositionEstimate> estimate;
    std::string diagnostic;
    try {
        std::map<std::string, double> rssi;
        for (const auto& [id, text] : filtered_text) rssi[id] = parse_double(text);
        estimate = localize_device(rssi, opts_.anchors, opts_.profile);
    } catch (const std::exception& e) {
        diagnostic = e.what();
    }

    AdmissionDecision decision;
    if (!opts_.trust.contains(device.device_id)) {
        // Trust is gated first; an untrusted device learns nothing about the
        // position estimate.
        decision = {false, AdmissionReason::UntrustedIdentity, std::nullopt, ""};
    } else if (!estimate) {
        decision = {false, AdmissionReason::OutOfBounds, std::nullopt, diagnostic};
    } else if (!opts_.workspace.contains(estimate->x, estimate->y, opts_.bounds_margin_m)) {
        decision = {false, AdmissionReason::OutOfBounds, estimate, ""};
    } else {
        decision = {true, AdmissionReason::Trusted, estimate, ""};
    }

    TxBody body{{"granted", std::string(decision.granted ? "true" : "false")},
                {"reason", std::string(to_string(decision.reason))}};
    if (decision.position) {
        body["x"] = format_fixed(decision.position->x);
        body["y"] = format_fixed(decision.position->y);
    }
    chain_.submit(Transaction{TxKind::AdmissionDecision, device.device_id, body});
    return decision;
}

std::vector<AuditEntry> audit_trail(const Chain& chain) {
    const VerifyResult v = chain.verify();
    if (!v.ok)
        throw std::runtime_error(
            "audit_trail: chain fails verification at block " +
            std::to_string(v.first_bad_index.value_or(0)));

    const auto& blocks = chain.blocks();
    std::vector<AuditEntry> out;
    std::size_t window_start = 1;  // genesis carries the constant marker payload
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        const Transaction& tx = blocks[i].payload;
        if (tx.kind != TxKind::AdmissionDecision) continue;

        AuditEntry entry;
        entry.device_id = tx.device_id;
        if (auto it = tx.body.find("granted"); it != tx.body.end())
            if (const auto* s = std::get_if<std::string>(&it->second))
                entry.granted = (*s == "true");
        if (auto it = tx.body.find("reason"); it != tx.body.end())
            if (const auto* s = std::get_if<std::string>(&it->second))
                entry.reason = admission_reason_from_string(*s);

        const auto text_at = [&tx](const char* key) -> std::optional<double> {
            auto it = tx.body.find(key);
            if (it == tx.body.end()) return std::nullopt;
            const auto* s = std::get_if<std::string>(&it->second);
            if (!s) return std::nullopt;
            return parse_double(*s);
        };
        if (auto x = text_at("x"))
            if (auto y = text_at("y")) entry.decision_position = {{*x, *y}};

        // Pair with the nearest preceding PositionRecord for the same device
        // since the previous decision.
        for (std::size_t j = i; j-- > window_start;) {
            const Transaction& prev = blocks[j].payload;
            if (prev.kind == TxKind::PositionRecord && prev.device_id == tx.device_id) {
                const auto get = [&prev](const char* key) -> std::optional<double> {
                    auto it = prev.body.find(key);
                    if (it == prev.body.end()) return std::nullopt;
                    const auto* s = std::get_if<std::string>(&it->second);
                    if (!s) return std::nullopt;
                    return parse_double(*s);
                };
                auto x = get("x");
                auto y = get("y");
                if (x && y) entry.recorded_position = {{*x, *y}};
                break;
            }
        }

        out.push_back(std::move(entry));
        window_start = i + 1;
    }
    return out;
}

}  // namespace homeguard
