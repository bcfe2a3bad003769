#include "homeguard/kalman.hpp"

#include <stdexcept>

namespace homeguard {

KalmanState predict(const KalmanState& state, const KalmanModel& model) {
    KalmanState out = state;
    out.estimate = model.state_transition * state.estimate +
                   model.control_gain * model.control_input;
    out.covariance = model.state_transition * state.covariance * model.state_transition +
                     model.process_noise;
    return out;
}

double gain(double predicted_covariance, const KalmanModel& model) {
    const double h = model.measurement_gain;
    const double denom = h * predicted_covariance * h + model.measurement_noise;
    if (denom <= 0.0)
        throw std::invalid_argument("kalman gain: H*P*H + R must be positive");
    return predicted_covariance * h / denom;
}

KalmanState update(const KalmanState& predicted, double gain, double measurement,
                   const KalmanModel& model) {
    const double h = model.measurement_gain;
    KalmanState out;
    out.estimate = predicted.estimate + gain * (measurement - h * predicted.estimate);
    const double residual_gain = 1.0 - gain * h;
    out.covariance = residual_gain * predicted.covariance * residual_gain +
                     gain * model.measurement_noise * gain;
    out.step = predicted.step + 1;
    return out;
}

KalmanState step(const KalmanState& state, const KalmanModel& model, double measurement) {
    const KalmanState prior = predict(state, model);
    const double k = gain(prior.covariance, model);
    return update(prior, k, measurement, model);
}

std::vector<double> filter_series(std::span<const double> samples, const KalmanModel& model,
                                  double initial_estimate, double initial_covariance) {
    if (samples.empty())
        throw std::invalid_argument("filter_series: empty sample sequence");
    std::vector<double> out;
    out.reserve(samples.size());
    KalmanState state{initial_estimate, initial_covariance, 0};
    for (double z : samples) {
        state = step(state, model, z);
        out.push_back(state.estimate);
    }
    return out;
}

double initial_estimate(InitialEstimatePolicy policy, std::span<const double> samples) {
    if (policy == InitialEstimatePolicy::Zero) return 0.0;
    if (samples.empty())
        throw std::invalid_argument("initial_estimate: empty sample sequence");
    return samples.front();
}

}  // namespace homeguard
