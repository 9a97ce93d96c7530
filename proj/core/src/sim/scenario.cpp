#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ri/dsl/parser.hpp"
#include "ri/sim/scenario.hpp"

namespace ri::sim {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::shared_ptr<const vdta::Vdta> load_policy(const std::string& path,
                                              const Scenario& scenario) {
    auto registry = vdta::BuiltinRegistry::standard(
        {scenario.lidar.fov_deg, scenario.bank.lidar.front_sector_deg,
         scenario.kin_safety_factor});
    auto ast = dsl::parse_policy(read_file(path));
    return std::make_shared<const vdta::Vdta>(vdta::elaborate(ast, registry));
}

}  // namespace

SimSetup load_setup(const std::string& config_path) {
    auto cfg = ConfigFile::parse_file(config_path);
    return load_setup(cfg, std::filesystem::path(config_path).parent_path().string());
}

SimSetup load_setup(const ConfigFile& cfg, const std::string& base_dir) {
    Scenario s;
    s.seed = cfg.integer("scenario", "seed", 1);
    s.max_ticks = cfg.integer("scenario", "max_ticks", 600);
    s.dt = cfg.number("scenario", "dt", 0.05);
    const std::string mode = cfg.str("scenario", "mode", "ri");
    if (mode == "ri") s.mode = ControlMode::Ri;
    else if (mode == "bare") s.mode = ControlMode::Bare;
    else throw std::runtime_error("scenario.mode must be 'ri' or 'bare'");

    s.track.outer_width = cfg.number("track", "outer_width", 20.0);
    s.track.outer_height = cfg.number("track", "outer_height", 10.0);
    s.track.corridor_width = cfg.number("track", "corridor_width", 1.5);

    s.vehicle.v_max = cfg.number("vehicle", "v_max", 2.4);
    s.vehicle.radius = cfg.number("vehicle", "radius", 0.3);
    s.vehicle.k_steer = cfg.number("vehicle", "k_steer", 2.0);

    s.lidar.fov_deg = cfg.number("lidar", "fov_deg", 230.0);
    s.lidar.ray_count = static_cast<int>(cfg.integer("lidar", "rays", 61));
    s.lidar.max_range = cfg.number("lidar", "max_range", 5.0);

    s.car_count = static_cast<int>(cfg.integer("cars", "count", 1));
    s.car_spawn_seconds = cfg.number_list("cars", "spawn_seconds", {0.0, 15.0, 30.0});

    s.ped_cap = static_cast<int>(cfg.integer("pedestrians", "count", 0));
    s.ped_spawn_prob = cfg.number("pedestrians", "spawn_prob", 0.008);
    s.ped_dwell_mean_ticks = cfg.number("pedestrians", "dwell_mean_ticks", 80.0);
    s.ped_radius = cfg.number("pedestrians", "radius", 0.2);
    s.ped_min_spawn_gap = cfg.number("pedestrians", "min_spawn_gap", 3.0);
    s.ped_drift = cfg.boolean("pedestrians", "drift", false);
    s.ped_drift_speed = cfg.number("pedestrians", "drift_speed", 0.2);

    s.bank.lidar.fov_deg = s.lidar.fov_deg;
    s.bank.lidar.front_sector_deg = cfg.number("lidar", "front_sector_deg", 41.5);
    s.bank.dt = s.dt;
    s.bank.steer.gain = cfg.number("controllers", "steer_gain", s.bank.steer.gain);
    s.bank.steer.block_dist = cfg.number("controllers", "steer_block_dist", s.bank.steer.block_dist);
    s.bank.steer.kick = cfg.number("controllers", "steer_kick", s.bank.steer.kick);
    s.bank.swerve.lidar = s.bank.lidar;
    s.bank.swerve.threshold = cfg.number("controllers", "swerve_threshold", 1.2);
    s.bank.swerve.gain = cfg.number("controllers", "swerve_gain", 3.0);
    s.bank.brake.r_max = cfg.number("controllers", "r_max", 4.0);
    s.bank.brake.dt_stop_target = cfg.number("controllers", "dt_stop_target", 0.5);
    s.bank.brake.dt = s.dt;
    s.bank.pid.kp = cfg.number("controllers", "pid_kp", 1.5);
    s.bank.pid.ki = cfg.number("controllers", "pid_ki", 0.3);
    s.bank.pid.kd = cfg.number("controllers", "pid_kd", 0.0);
    s.bank.pid.target_gap = cfg.number("controllers", "pid_target_gap", 0.9);
    s.bank.pid.windup = cfg.number("controllers", "pid_windup", 2.0);
    s.bank.pid.a_max = cfg.number("controllers", "pid_a_max", 2.0);
    s.bank.a_max = cfg.number("controllers", "a_max", 2.0);
    const std::string weights = cfg.str("controllers", "steer_mlp_weights", "");
    if (!weights.empty()) {
        auto path = std::filesystem::path(base_dir) / weights;
        s.bank.steer_mlp = ctrl::load_mlp_json(path.string());
    }

    const std::string selection = cfg.str("manager", "selection", "prefer_last");
    if (selection == "prefer_last") s.selection = rim::SelectionPolicy::prefer_last();
    else if (selection == "lowest_index") s.selection = rim::SelectionPolicy::lowest_index();
    else if (selection == "seeded_random")
        s.selection = rim::SelectionPolicy::seeded_random(
            cfg.integer("manager", "selection_seed", 7));
    else throw std::runtime_error("manager.selection must be prefer_last/lowest_index/seeded_random");
    s.kin_safety_factor = cfg.number("manager", "kin_safety_factor", 1.0);

    SimSetup setup;
    setup.scenario = s;

    const auto group_names =
        cfg.str_list("groups", "order", {"normal", "cautious", "stopping"});
    const std::map<std::string, std::pair<std::string, std::string>> default_wiring{
        {"normal", {"steer", "throttle"}},
        {"cautious", {"steer", "pid"}},
        {"stopping", {"swerve", "brake"}},
    };
    for (const auto& name : group_names) {
        auto def = default_wiring.count(name) ? default_wiring.at(name)
                                              : std::pair<std::string, std::string>{"steer",
                                                                                    "throttle"};
        ctrl::GroupWiring w;
        w.name = name;
        w.steer_source = cfg.str("groups", name + "_steer", def.first);
        w.accel_source = cfg.str("groups", name + "_accel", def.second);
        setup.wiring.push_back(w);

        const std::string policy_path =
            cfg.str("groups", name + "_policy", "policies/" + name + ".vdta");
        auto full = std::filesystem::path(base_dir) / policy_path;
        setup.policies.push_back(load_policy(full.string(), s));
    }
    return setup;
}

SimSetup default_setup(const Scenario& scenario, const std::string& policy_dir) {
    SimSetup setup;
    setup.scenario = scenario;
    setup.wiring = {{"normal", "steer", "throttle"},
                    {"cautious", "steer", "pid"},
                    {"stopping", "swerve", "brake"}};
    for (const auto& name : {"normal", "cautious", "stopping"}) {
        auto path = std::filesystem::path(policy_dir) / (std::string(name) + ".vdta");
        setup.policies.push_back(load_policy(path.string(), scenario));
    }
    return setup;
}

}  // namespace ri::sim
