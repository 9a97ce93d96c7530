#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ri/ctrl/mlp.hpp"

namespace ri::ctrl {

struct LidarShape {
    double fov_deg = 230.0;
    double front_sector_deg = 41.5;
};

// Minimum reading over the centered front sector of a scan. Ray i bears
// +fov/2 - i*spacing relative to the heading: index 0 is the leftmost
// ray, the middle index points straight ahead.
double min_front(const std::vector<double>& scan, const LidarShape& shape = {});

class NonPositiveDistance : public std::runtime_error {
public:
    explicit NonPositiveDistance(const std::string& msg) : std::runtime_error(msg) {}
};

// Minimum constant deceleration that stops a vehicle moving at `speed`
// within `distance` (v^2 / 2d), scaled by an optional safety factor.
double kin(double distance, double speed, double safety_factor = 1.0);

// Per-tick controller input: the scan plus the measured speed.
struct CtrlInput {
    const std::vector<double>* scan = nullptr;
    double speed = 0.0;
};

// Black-box stateful controller stepped once per non-suspended tick.
// A controller that is not stepped must retain its state exactly.
class Controller {
public:
    virtual ~Controller() = default;
    virtual void reset() {}
    virtual double step(const CtrlInput& in) = 0;
};

// Steering from the left/right clearance balance: integrates each half
// of the scan and steers toward the larger clearance (d < 0 steers
// left). A blocked center ray with balanced halves kicks left so the
// vehicle never freezes pointing at an obstacle.
struct SteerParams {
    double gain = 2.2;
    double block_dist = 1.1;
    double kick = 0.85;
};

class SteerGeometric : public Controller {
public:
    explicit SteerGeometric(SteerParams p = {}) : params_(p) {}
    double step(const CtrlInput& in) override;

private:
    SteerParams params_;
};

// Steering away from the nearest reading in the front sector, saturating
// at full lock as the obstacle closes in.
struct SwerveParams {
    LidarShape lidar;
    double threshold = 1.2;
    double gain = 3.0;
};

class SwerveHeuristic : public Controller {
public:
    explicit SwerveHeuristic(SwerveParams p = {}) : params_(p) {}
    double step(const CtrlInput& in) override;

private:
    SwerveParams params_;
};

// a = -min(r_max, v / dt_stop_target), floored so one tick never drives
// the speed negative.
struct BrakeParams {
    double r_max = 4.0;
    double dt_stop_target = 0.5;
    double dt = 0.05;
};

double brake_linear(double speed, const BrakeParams& p = {});

class BrakeLinear : public Controller {
public:
    explicit BrakeLinear(BrakeParams p = {}) : params_(p) {}
    double step(const CtrlInput& in) override { return brake_linear(in.speed, params_); }

private:
    BrakeParams params_;
};

class FullThrottle : public Controller {
public:
    explicit FullThrottle(double a_max = 2.0) : a_max_(a_max) {}
    double step(const CtrlInput&) override { return a_max_; }

private:
    double a_max_;
};

struct PidGains {
    double kp = 1.5;
    double ki = 0.3;
    double kd = 0.0;
    double target_gap = 0.9;
    double windup = 2.0;
    double a_max = 2.0;
};

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool has_prev = false;

    bool operator==(const PidState&) const = default;
};

// One discrete PI(D) update on the gap error; returns the advanced state
// and the clamped acceleration command.
std::pair<PidState, double> distance_pid(const PidState& state, const PidGains& gains,
                                         double gap, double dt);

// Car-following controller: the gap is the front-sector minimum.
class DistancePid : public Controller {
public:
    DistancePid(PidGains gains, LidarShape lidar, double dt)
        : gains_(gains), lidar_(lidar), dt_(dt) {}

    void reset() override { state_ = PidState{}; }
    double step(const CtrlInput& in) override;
    const PidState& state() const { return state_; }

private:
    PidGains gains_;
    LidarShape lidar_;
    double dt_;
    PidState state_;
};

class MlpSteer : public Controller {
public:
    explicit MlpSteer(MlpModel model) : model_(std::move(model)) {}
    double step(const CtrlInput& in) override;

private:
    MlpModel model_;
};

}  // namespace ri::ctrl
