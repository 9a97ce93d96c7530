#pragma once

#include <string>

#include "ri/ctrl/controllers.hpp"
#include "ri/rim/manager.hpp"

namespace ri::ctrl {

// Static wiring of named controllers into groups. Every group's
// assembler pairs one member output per system channel (d, a), so each
// group emits a complete valuation whenever it is not suspended.
struct GroupWiring {
    std::string name;
    std::string steer_source;  // controller producing d
    std::string accel_source;  // controller producing a
};

class ControllerBank {
public:
    void add_controller(const std::string& name, std::unique_ptr<Controller> ctrl);
    void add_group(GroupWiring wiring);

    size_t group_count() const { return groups_.size(); }
    const std::string& group_name(size_t i) const { return groups_[i].name; }
    Controller* controller(const std::string& name);
    const Controller* controller(const std::string& name) const;

    void reset();

    // Steps each controller used by at least one non-suspended group
    // exactly once (shared members are shared state), then assembles one
    // (d, a) valuation per non-suspended group; suspended groups hand
    // back bottom.
    rim::GroupOutputs step(const vdta::Valuation& input, const rim::SuspensionMask& mask);

private:
    struct GroupSlots {
        std::string name;
        size_t steer_idx = 0;
        size_t accel_idx = 0;
    };

    std::vector<std::pair<std::string, std::unique_ptr<Controller>>> controllers_;
    std::vector<GroupSlots> groups_;
    std::vector<double> outputs_;   // scratch, per controller
    std::vector<char> must_step_;   // scratch, per controller
};

// The case-study bank: normal = (steer, full throttle), cautious =
// (steer, distance PID), stopping = (swerve, linear braking). The steer
// slot runs the network model when one is supplied.
struct F110BankConfig {
    LidarShape lidar;
    double dt = 0.05;
    SteerParams steer;
    SwerveParams swerve;
    BrakeParams brake;
    PidGains pid;
    double a_max = 2.0;
    std::optional<MlpModel> steer_mlp;
};

// Registers the five case-study controllers (steer, throttle, swerve,
// brake, pid) without any group wiring.
void add_f110_controllers(ControllerBank& bank, const F110BankConfig& cfg);

ControllerBank make_f110_bank(const F110BankConfig& cfg);

}  // namespace ri::ctrl
