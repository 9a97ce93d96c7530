#include <algorithm>
#include <cmath>

#include "ri/ctrl/controllers.hpp"

namespace ri::ctrl {

double min_front(const std::vector<double>& scan, const LidarShape& shape) {
    if (scan.empty()) throw std::invalid_argument("min_front of an empty scan");
    const int n = static_cast<int>(scan.size());
    if (n == 1) return scan[0];
    const double spacing = shape.fov_deg / (n - 1);
    const int half = static_cast<int>(std::floor(shape.front_sector_deg / 2.0 / spacing));
    const int center = (n - 1) / 2;
    const int lo = std::max(0, center - half);
    const int hi = std::min(n - 1, center + half);
    return *std::min_element(scan.begin() + lo, scan.begin() + hi + 1);
}

double kin(double distance, double speed, double safety_factor) {
    if (distance <= 0.0)
        throw NonPositiveDistance("kin requires a positive distance, got " +
                                  std::to_string(distance));
    return safety_factor * speed * speed / (2.0 * distance);
}

double SteerGeometric::step(const CtrlInput& in) {
    const auto& scan = *in.scan;
    const size_t n = scan.size();
    const size_t center = (n - 1) / 2;
    double left = 0.0;
    double right = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (i < center) left += scan[i];
        else if (i > center) right += scan[i];
    }
    const double total = left + right;
    double d = total > 0.0 ? params_.gain * (right - left) / total : 0.0;
    // Balanced halves with a blocked nose: commit to one side.
    if (scan[center] < params_.block_dist && std::abs(d) < params_.kick)
        d = right >= left ? params_.kick : -params_.kick;
    return std::clamp(d, -1.0, 1.0);
}

double SwerveHeuristic::step(const CtrlInput& in) {
    const auto& scan = *in.scan;
    const int n = static_cast<int>(scan.size());
    const int center = (n - 1) / 2;
    const double spacing = n > 1 ? params_.lidar.fov_deg / (n - 1) : params_.lidar.fov_deg;
    const int half =
        n > 1 ? static_cast<int>(std::floor(params_.lidar.front_sector_deg / 2.0 / spacing)) : 0;
    const int lo = std::max(0, center - half);
    const int hi = std::min(n - 1, center + half);

    // Each near reading pushes the steering toward the opposite side;
    // symmetric scenes cancel.
    double push = 0.0;
    for (int i = lo; i <= hi; ++i) {
        if (scan[i] >= params_.threshold) continue;
        const double prox = (params_.threshold - scan[i]) / params_.threshold;
        const double side = i < center ? 1.0 : (i > center ? -1.0 : 0.0);
        push += side * prox * prox;
    }
    double d = params_.gain * push;
    if (scan[center] < params_.threshold && std::abs(d) < 0.05) d = -1.0;
    return std::clamp(d, -1.0, 1.0);
}

double brake_linear(double speed, const BrakeParams& p) {
    if (speed <= 0.0) return 0.0;
    double mag = std::min(p.r_max, speed / p.dt_stop_target);
    if (p.dt > 0.0) mag = std::min(mag, speed / p.dt);  // never reverse within a tick
    return -mag;
}

std::pair<PidState, double> distance_pid(const PidState& state, const PidGains& gains,
                                         double gap, double dt) {
    PidState next = state;
    const double error = gap - gains.target_gap;
    next.integral = std::clamp(state.integral + error * dt, -gains.windup, gains.windup);
    const double deriv = (state.has_prev && dt > 0.0) ? (error - state.prev_error) / dt : 0.0;
    next.prev_error = error;
    next.has_prev = true;
    const double a = gains.kp * error + gains.ki * next.integral + gains.kd * deriv;
    return {next, std::clamp(a, -gains.a_max, gains.a_max)};
}

double DistancePid::step(const CtrlInput& in) {
    const double gap = min_front(*in.scan, lidar_);
    auto [next, a] = distance_pid(state_, gains_, gap, dt_);
    state_ = next;
    return a;
}

double MlpSteer::step(const CtrlInput& in) {
    auto out = mlp_infer(model_, *in.scan);
    return std::clamp(out.empty() ? 0.0 : out[0], -1.0, 1.0);
}

}  // namespace ri::ctrl
