#include "homeguard/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace homeguard {

const RadioProfile& wifi_profile() {
    static const RadioProfile p{"WiFi", -45.0, 2.00, 2.0, 0.5};
    return p;
}

const RadioProfile& ble_profile() {
    static const RadioProfile p{"BLE", -56.0, 2.00, 4.0, 1.0};
    return p;
}

const RadioProfile& xbee_profile() {
    static const RadioProfile p{"XBee", 18.0, 2.00, 1.0, 3.0};
    return p;
}

const std::vector<RadioProfile>& builtin_profiles() {
    static const std::vector<RadioProfile> all{wifi_profile(), xbee_profile(), ble_profile()};
    return all;
}

std::optional<RadioProfile> profile_by_name(const std::string& name) {
    for (const auto& p : builtin_profiles())
        if (p.name == name) return p;
    return std::nullopt;
}

double expected_rssi(const RadioProfile& profile, double distance_m) {
    if (!(distance_m > 0.0))
        throw std::invalid_argument("expected_rssi: distance must be positive");
    return profile.ref_rssi_dbm - 10.0 * profile.path_loss_exponent * std::log10(distance_m);
}

double distance_from_rssi(const RadioProfile& profile, double rssi_dbm) {
    return std::pow(10.0, (profile.ref_rssi_dbm - rssi_dbm) /
                              (10.0 * profile.path_loss_exponent));
}

double noise_sigma(const RadioProfile& profile, double distance_m) {
    return profile.sigma0_db + profile.sigma_slope_db_per_m * distance_m;
}

double sample_rssi(const RadioProfile& profile, double distance_m, std::mt19937_64& rng) {
    const double mean = expected_rssi(profile, distance_m);
    const double sigma = noise_sigma(profile, distance_m);
    if (sigma == 0.0) return mean;
    std::normal_distribution<double> noise(0.0, sigma);
    return mean + noise(rng);
}

}  // namespace homeguard
