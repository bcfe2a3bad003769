#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace homeguard {

// Log-distance path-loss calibration for one wireless technology. The
// reference RSSI is the expected reading at 1 m; noise grows linearly with
// distance as sigma0 + sigma_slope * d.
struct RadioProfile {
    std::string name;
    double ref_rssi_dbm = -45.0;        // system loss constant
    double path_loss_exponent = 2.0;
    double sigma0_db = 0.0;
    double sigma_slope_db_per_m = 0.0;
};

// Built-in calibrations. Reference constants: WiFi -45, BLE -56, XBee +18,
// path-loss exponent 2.00 for all three. The noise levels are simulation
// parameters, not measured values.
const RadioProfile& wifi_profile();
const RadioProfile& ble_profile();
const RadioProfile& xbee_profile();

// Sweep order used by the RSSI experiment: WiFi, XBee, BLE.
const std::vector<RadioProfile>& builtin_profiles();

std::optional<RadioProfile> profile_by_name(const std::string& name);

// Expected RSSI at distance d: ref - 10*n*log10(d). Throws when d <= 0.
double expected_rssi(const RadioProfile& profile, double distance_m);

// Exact inverse of expected_rssi: 10^((ref - rssi) / (10*n)).
double distance_from_rssi(const RadioProfile& profile, double rssi_dbm);

double noise_sigma(const RadioProfile& profile, double distance_m);

// Expected RSSI plus Gaussian channel noise from the caller's generator.
double sample_rssi(const RadioProfile& profile, double distance_m, std::mt19937_64& rng);

}  // namespace homeguard
