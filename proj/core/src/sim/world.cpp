#include <algorithm>

#include "ri/sim/world.hpp"

namespace ri::sim {

void step_vehicle(VehicleState& state, double d, double a, double dt, const VehicleParams& p) {
    state.steer_cmd = std::clamp(d, -1.0, 1.0);
    state.accel_cmd = a;
    state.heading -= p.k_steer * state.steer_cmd * state.speed * dt;
    state.speed = std::clamp(state.speed + a * dt, 0.0, p.v_max);
    state.pos = state.pos + heading_dir(state.heading) * (state.speed * dt);
}

std::vector<double> raycast(std::span<const Segment> walls,
                            std::span<const VehicleState> vehicles,
                            std::span<const Pedestrian> pedestrians, const Vec2& pos,
                            double heading, const LidarConfig& cfg, int self_index,
                            double car_radius) {
    std::vector<double> scan(cfg.ray_count, cfg.max_range);
    const double fov = cfg.fov_deg * M_PI / 180.0;
    const double spacing = cfg.ray_count > 1 ? fov / (cfg.ray_count - 1) : 0.0;
    for (int i = 0; i < cfg.ray_count; ++i) {
        const double bearing = heading + fov / 2.0 - i * spacing;
        const Vec2 dir = heading_dir(bearing);
        double best = cfg.max_range;
        for (const auto& s : walls) best = std::min(best, ray_segment(pos, dir, s));
        for (size_t v = 0; v < vehicles.size(); ++v) {
            if (static_cast<int>(v) == self_index || !vehicles[v].active) continue;
            best = std::min(best, ray_disc(pos, dir, {vehicles[v].pos, car_radius}));
        }
        for (const auto& ped : pedestrians)
            best = std::min(best, ray_disc(pos, dir, {ped.pos, ped.radius}));
        scan[i] = std::max(0.0, std::min(best, cfg.max_range));
    }
    return scan;
}

void detect_collisions(std::span<const Segment> walls, std::span<VehicleState> vehicles,
                       std::span<const Pedestrian> pedestrians, double car_radius,
                       uint64_t current_tick, std::vector<CrashCause>& causes) {
    causes.assign(vehicles.size(), CrashCause::None);
    for (size_t i = 0; i < vehicles.size(); ++i) {
        auto& car = vehicles[i];
        if (!car.active || car.crashed) continue;
        CrashCause cause = CrashCause::None;
        for (const auto& s : walls) {
            if (point_segment_distance(car.pos, s) < car_radius) {
                cause = CrashCause::Wall;
                break;
            }
        }
        if (cause == CrashCause::None) {
            for (size_t j = 0; j < vehicles.size(); ++j) {
                if (j == i || !vehicles[j].active) continue;
                if ((car.pos - vehicles[j].pos).norm() < 2.0 * car_radius) {
                    cause = CrashCause::Car;
                    break;
                }
            }
        }
        if (cause == CrashCause::None) {
            for (const auto& ped : pedestrians) {
                if ((car.pos - ped.pos).norm() < car_radius + ped.radius) {
                    cause = current_tick == ped.spawn_tick ? CrashCause::PedestrianWalkedIn
                                                           : CrashCause::HitPedestrian;
                    break;
                }
            }
        }
        if (cause != CrashCause::None) {
            car.crashed = true;
            causes[i] = cause;
        }
    }
}

}  // namespace ri::sim
