#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace homeguard {

// Scalar filter parameters. External configs address these by the customary
// single-letter names (A, B, u, Q, H, R); defaults model a quasi-static RSSI
// stream on a channel with sigma = 2 dB.
struct KalmanModel {
    double state_transition = 1.0;   // A
    double control_gain = 0.0;       // B
    double control_input = 0.0;      // u
    double process_noise = 0.01;     // Q, dBm^2
    double measurement_gain = 1.0;   // H
    double measurement_noise = 4.0;  // R, dBm^2
};

struct KalmanState {
    double estimate = 0.0;    // dBm
    double covariance = 0.0;  // dBm^2, never negative
    std::uint64_t step = 0;
};

// Prediction: estimate' = A*estimate + B*u, covariance' = A*covariance*A + Q.
KalmanState predict(const KalmanState& state, const KalmanModel& model);

// K = P*H / (H*P*H + R) for a predicted covariance P. Throws
// std::invalid_argument when the denominator is not positive.
double gain(double predicted_covariance, const KalmanModel& model);

// Folds in a measurement using the Joseph-form covariance update:
// P = (1-K*H)*P*(1-K*H) + K*R*K. Increments the step counter.
KalmanState update(const KalmanState& predicted, double gain, double measurement,
                   const KalmanModel& model);

// One predict + gain + update cycle.
KalmanState step(const KalmanState& state, const KalmanModel& model, double measurement);

// Runs the recursion over a sample sequence starting from (x0, P0); output i
// is the posterior estimate after consuming samples[0..i]. Throws on empty
// input.
std::vector<double> filter_series(std::span<const double> samples, const KalmanModel& model,
                                  double initial_estimate, double initial_covariance);

// How filter consumers seed x0 from a sample stream.
enum class InitialEstimatePolicy { FirstMeasurement, Zero };

double initial_estimate(InitialEstimatePolicy policy, std::span<const double> samples);

}  // namespace homeguard
