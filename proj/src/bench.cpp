#include "homeguard/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "homeguard/util.hpp"
#include "json.hpp"

namespace homeguard {

double rmse(std::span<const double> predicted, std::span<const double> observed) {
    if (predicted.size() != observed.size())
        throw std::invalid_argument("rmse: sequence lengths differ (" +
                                    std::to_string(predicted.size()) + " vs " +
                                    std::to_string(observed.size()) + ")");
    if (predicted.empty()) throw std::invalid_argument("rmse: empty sequences");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double diff = predicted[i] - observed[i];
        sum += diff * diff;
    }
    return std::sqrt(sum / static_cast<double>(predicted.size()));
}

RssiExperimentResult run_rssi_experiment(const RssiExperiment& experiment) {
    if (experiment.n_samples < 1)
        throw std::invalid_argument("rssi experiment: n_samples must be >= 1");
    for (double d : experiment.distances_m)
        if (!(d > 0.0))
            throw std::invalid_argument("rssi experiment: distances must be positive");

    RssiExperimentResult result;
    std::uint64_t cell_index = 0;
    for (const auto& profile : experiment.profiles) {
        for (double distance : experiment.distances_m) {
            std::mt19937_64 rng(experiment.seed ^ cell_index);
            ++cell_index;

            const std::size_t n = static_cast<std::size_t>(experiment.n_samples);
            std::vector<double> raw(n);
            for (double& s : raw) s = sample_rssi(profile, distance, rng);

            const auto filtered = filter_series(
                raw, experiment.kalman, initial_estimate(experiment.x0_policy, raw),
                experiment.initial_covariance);

            const std::vector<double> predicted(n, expected_rssi(profile, distance));

            RmseReport report;
            report.technology = profile.name;
            report.distance_m = distance;
            report.rmse_raw = rmse(predicted, raw);
            report.rmse_filtered = rmse(predicted, filtered);
            report.n_samples = experiment.n_samples;
            result.reports.push_back(std::move(report));

            for (std::size_t i = 0; i < n; ++i) {
                SampleRow row;
                row.sample_index = static_cast<int>(i);
                row.technology = profile.name;
                row.true_distance_m = distance;
                row.raw_rssi_dbm = raw[i];
                row.filtered_rssi_dbm = filtered[i];
                row.est_distance_m = distance_from_rssi(profile, filtered[i]);
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

std::pair<LatencyReport, LatencyReport> run_latency_experiment(int trials, unsigned difficulty,
                                                               const PayloadSource& payloads,
                                                               NowFn now) {
    if (trials < 1) throw std::invalid_argument("latency experiment: trials must be >= 1");
    if (difficulty > kMaxDifficulty)
        throw std::invalid_argument("latency experiment: difficulty out of range");
    if (!now)
        now = [] {
            return std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::steady_clock::now().time_since_epoch());
        };

    // Preloaded membership, as the anchors would hold it.
    TrustList trust;
    for (int i = 0; i < 16; ++i) trust.entries.insert("device-" + std::to_string(i));

    const auto summarize = [trials](ChainMode mode, unsigned diff,
                                    const std::vector<double>& seconds) {
        LatencyReport r;
        r.mode = mode;
        r.difficulty = diff;
        r.trials = trials;
        r.min_seconds = *std::min_element(seconds.begin(), seconds.end());
        r.max_seconds = *std::max_element(seconds.begin(), seconds.end());
        double sum = 0.0;
        for (double s : seconds) sum += s;
        r.mean_seconds = sum / static_cast<double>(seconds.size());
        return r;
    };

    volatile bool sink = false;  // keeps the trust lookup observable

    Chain private_chain{{ChainMode::Private, 0}};
    std::vector<double> private_seconds;
    private_seconds.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        Transaction payload = payloads(t);
        const auto t0 = now();
        sink = trust.contains(payload.device_id);
        private_chain.append_private(std::move(payload));
        const auto t1 = now();
        private_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }

    Chain public_chain{{ChainMode::Public, difficulty}};
    std::vector<double> public_seconds;
    public_seconds.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        Transaction payload = payloads(trials + t);
        const auto t0 = now();
        sink = trust.contains(payload.device_id);
        public_chain.mine_block(std::move(payload), difficulty);
        const auto t1 = now();
        public_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    (void)sink;

    return {summarize(ChainMode::Private, 0, private_seconds),
            summarize(ChainMode::Public, difficulty, public_seconds)};
}

PayloadSource make_bench_payload_source(std::uint64_t seed) {
    return [seed](int trial) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
        std::uniform_real_distribution<double> rssi(-90.0, -30.0);
        BodyMap readings;
        for (int a = 0; a < 4; ++a)
            readings["a" + std::to_string(a)] = format_fixed(rssi(rng));
        return Transaction{TxKind::AdmissionRequest,
                           "device-" + std::to_string(trial % 16),
                           {{"rssi", readings}}};
    };
}

void write_sample_csv(std::ostream& out, const std::vector<SampleRow>& rows) {
    out << "sample_index,technology,true_distance_m,raw_rssi_dbm,filtered_rssi_dbm,"
           "est_distance_m\n";
    for (const auto& row : rows) {
        out << row.sample_index << ',' << row.technology << ','
            << format_fixed(row.true_distance_m) << ',' << format_fixed(row.raw_rssi_dbm)
            << ',' << format_fixed(row.filtered_rssi_dbm) << ','
            << format_fixed(row.est_distance_m) << '\n';
    }
}

std::string rmse_reports_to_json(const std::vector<RmseReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json jr;
        jr["technology"] = r.technology;
        jr["distance"] = r.distance_m;
        jr["rmse_raw"] = r.rmse_raw;
        jr["rmse_filtered"] = r.rmse_filtered;
        jr["n_samples"] = r.n_samples;
        arr.push_back(std::move(jr));
    }
    return arr.dump(2);
}

std::string latency_reports_to_json(const LatencyReport& private_report,
                                    const LatencyReport& public_report) {
    const auto to_json = [](const LatencyReport& r) {
        nlohmann::ordered_json jr;
        jr["mode"] = to_string(r.mode);
        if (r.mode == ChainMode::Public) jr["difficulty"] = r.difficulty;
        jr["trials"] = r.trials;
        jr["mean_seconds"] = r.mean_seconds;
        jr["min_seconds"] = r.min_seconds;
        jr["max_seconds"] = r.max_seconds;
        return jr;
    };
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    arr.push_back(to_json(private_report));
    arr.push_back(to_json(public_report));
    return arr.dump(2);
}

}  // namespace homeguard
