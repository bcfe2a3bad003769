#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homeguard/kalman.hpp"
#include "homeguard/ledger.hpp"
#include "homeguard/radio.hpp"

namespace homeguard {

// Root mean squared error between two equally long, nonempty sequences.
double rmse(std::span<const double> predicted, std::span<const double> observed);

struct RmseReport {
    std::string technology;
    double distance_m = 0.0;
    double rmse_raw = 0.0;       // raw channel samples vs the model prediction
    double rmse_filtered = 0.0;  // filtered sequence vs the model prediction
    int n_samples = 0;
};

struct SampleRow {
    int sample_index = 0;
    std::string technology;
    double true_distance_m = 0.0;
    double raw_rssi_dbm = 0.0;
    double filtered_rssi_dbm = 0.0;
    double est_distance_m = 0.0;  // inverse model applied to the filtered value
};

struct RssiExperiment {
    std::vector<RadioProfile> profiles;
    std::vector<double> distances_m{0.25, 0.5, 1.0};
    int n_samples = 100;
    KalmanModel kalman{};
    InitialEstimatePolicy x0_policy = InitialEstimatePolicy::FirstMeasurement;
    double initial_covariance = 4.0;
    std::uint64_t seed = 0;
};

struct RssiExperimentResult {
    std::vector<RmseReport> reports;   // one per (profile, distance) cell
    std::vector<SampleRow> rows;       // every drawn sample, cell order
};

// Runs each (profile, distance) cell against the constant model prediction at
// the true distance. Cell generators derive from the master seed by
// seed XOR cell_index, cells enumerated profile-major; results only depend on
// the seed.
RssiExperimentResult run_rssi_experiment(const RssiExperiment& experiment);

struct LatencyReport {
    ChainMode mode = ChainMode::Private;
    unsigned difficulty = 0;  // meaningful for Public only
    int trials = 0;
    double mean_seconds = 0.0;
    double min_seconds = 0.0;
    double max_seconds = 0.0;
};

using PayloadSource = std::function<Transaction(int trial)>;
using NowFn = std::function<std::chrono::nanoseconds()>;

// Wall-clock cost of one admission consultation per trial: a trust-list
// lookup plus an append (Private) or a proof-of-work mine (Public). Each
// public trial mines a fresh payload so attempt counts stay independent.
std::pair<LatencyReport, LatencyReport> run_latency_experiment(int trials, unsigned difficulty,
                                                               const PayloadSource& payloads,
                                                               NowFn now = {});

// Deterministic payload stream for latency runs: admission requests with
// seed-derived device ids and RSSI bodies.
PayloadSource make_bench_payload_source(std::uint64_t seed);

// CSV: header row then one row per sample, 6-decimal fixed point.
void write_sample_csv(std::ostream& out, const std::vector<SampleRow>& rows);

std::string rmse_reports_to_json(const std::vector<RmseReport>& reports);
std::string latency_reports_to_json(const LatencyReport& private_report,
                                    const LatencyReport& public_report);

}  // namespace homeguard
