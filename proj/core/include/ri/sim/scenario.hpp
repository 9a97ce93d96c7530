#pragma once

#include "ri/ctrl/bank.hpp"
#include "ri/sim/config.hpp"
#include "ri/sim/world.hpp"

namespace ri::sim {

enum class ControlMode { Bare, Ri };

// Complete, self-contained description of one simulation run; the same
// scenario (seed included) always reproduces the same result bits.
struct Scenario {
    uint64_t seed = 1;
    uint64_t max_ticks = 600;
    double dt = 0.05;
    ControlMode mode = ControlMode::Ri;

    TrackMap track;
    VehicleParams vehicle;
    LidarConfig lidar;

    int car_count = 1;
    std::vector<double> car_spawn_seconds = {0.0, 15.0, 30.0};

    int ped_cap = 0;
    double ped_spawn_prob = 0.008;       // per tick, while below the cap
    double ped_dwell_mean_ticks = 80.0;  // geometric dwell
    double ped_radius = 0.2;
    double ped_min_spawn_gap = 3.0;  // metres from every car
    bool ped_drift = false;
    double ped_drift_speed = 0.2;

    ctrl::F110BankConfig bank;
    rim::SelectionPolicy selection = rim::SelectionPolicy::prefer_last();
    double kin_safety_factor = 1.0;
};

// Scenario plus the elaborated policies and group wiring, shared
// immutably across trials and worker threads. policies[i] governs
// wiring[i]; the two line up by index. A bank_factory overrides the
// stock controller set (stub or weighted banks for timing studies);
// it must wire the same group list.
struct SimSetup {
    Scenario scenario;
    std::vector<std::shared_ptr<const vdta::Vdta>> policies;
    std::vector<ctrl::GroupWiring> wiring;
    std::function<ctrl::ControllerBank()> bank_factory;
};

// Loads a scenario config file (docs/formats.md); policy paths are
// resolved relative to the config file's directory.
SimSetup load_setup(const std::string& config_path);
SimSetup load_setup(const ConfigFile& cfg, const std::string& base_dir);

// The stock three-mode setup over the shipped policy texts; used by
// tests and as the fallback when no config is given.
SimSetup default_setup(const Scenario& scenario, const std::string& policy_dir);

}  // namespace ri::sim
