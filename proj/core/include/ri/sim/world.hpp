#pragma once

#include <cstdint>
#include <span>

#include "ri/sim/geometry.hpp"

namespace ri::sim {

struct VehicleParams {
    double v_max = 2.4;
    double radius = 0.3;
    double k_steer = 2.0;  // full lock turn radius = 1 / k_steer
};

struct VehicleState {
    Vec2 pos;
    double heading = 0.0;
    double speed = 0.0;
    double steer_cmd = 0.0;
    double accel_cmd = 0.0;
    uint64_t spawn_tick = 0;
    bool active = false;
    bool crashed = false;  // sticky
};

// Unicycle update. Steering convention: d in [-1, 1], d < 0 turns left
// (heading increases); turn radius at constant command is
// 1 / (k_steer * |d|).
void step_vehicle(VehicleState& state, double d, double a, double dt, const VehicleParams& p);

struct LidarConfig {
    double fov_deg = 230.0;
    int ray_count = 61;  // odd, so one ray points straight ahead
    double max_range = 5.0;
};

struct Pedestrian {
    Vec2 pos;
    double radius = 0.2;
    uint64_t spawn_tick = 0;
    uint64_t leave_tick = 0;
};

// Distances to the nearest wall, other-car disc or pedestrian disc along
// ray_count bearings evenly spanning the field of view, clamped to
// max_range. Ray 0 is the leftmost bearing (+fov/2 off the heading).
std::vector<double> raycast(std::span<const Segment> walls,
                            std::span<const VehicleState> vehicles,
                            std::span<const Pedestrian> pedestrians, const Vec2& pos,
                            double heading, const LidarConfig& cfg, int self_index = -1,
                            double car_radius = 0.3);

enum class CrashCause { None, Wall, Car, HitPedestrian, PedestrianWalkedIn };

// Marks cars whose disc touches a wall, another car or a pedestrian;
// crashes stay sticky with their first cause. A collision on the tick a
// pedestrian appeared counts as the pedestrian walking into the car.
void detect_collisions(std::span<const Segment> walls, std::span<VehicleState> vehicles,
                       std::span<const Pedestrian> pedestrians, double car_radius,
                       uint64_t current_tick, std::vector<CrashCause>& causes);

}  // namespace ri::sim
