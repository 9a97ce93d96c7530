#include <algorithm>
#include <stdexcept>

#include "ri/ctrl/bank.hpp"

namespace ri::ctrl {

void ControllerBank::add_controller(const std::string& name, std::unique_ptr<Controller> ctrl) {
    controllers_.emplace_back(name, std::move(ctrl));
}

void ControllerBank::add_group(GroupWiring wiring) {
    auto index_of = [&](const std::string& name) -> size_t {
        for (size_t i = 0; i < controllers_.size(); ++i)
            if (controllers_[i].first == name) return i;
        throw std::invalid_argument("group '" + wiring.name + "' wires unknown controller '" +
                                    name + "'");
    };
    GroupSlots slots;
    slots.name = wiring.name;
    slots.steer_idx = index_of(wiring.steer_source);
    slots.accel_idx = index_of(wiring.accel_source);
    groups_.push_back(std::move(slots));
}

Controller* ControllerBank::controller(const std::string& name) {
    for (auto& [n, c] : controllers_)
        if (n == name) return c.get();
    return nullptr;
}

const Controller* ControllerBank::controller(const std::string& name) const {
    for (const auto& [n, c] : controllers_)
        if (n == name) return c.get();
    return nullptr;
}

void ControllerBank::reset() {
    for (auto& [n, c] : controllers_) c->reset();
}

rim::GroupOutputs ControllerBank::step(const vdta::Valuation& input,
                                       const rim::SuspensionMask& mask) {
    if (mask.size() != groups_.size())
        throw std::invalid_argument("mask size does not match group count");

    CtrlInput in;
    in.scan = &std::get<std::vector<double>>(input.at(0));
    in.speed = std::get<double>(input.at(1));

    // A controller runs iff some non-suspended group consumes it; a
    // fully suspended controller keeps its state frozen.
    must_step_.assign(controllers_.size(), 0);
    for (size_t g = 0; g < groups_.size(); ++g) {
        if (!mask[g]) continue;
        must_step_[groups_[g].steer_idx] = 1;
        must_step_[groups_[g].accel_idx] = 1;
    }
    outputs_.assign(controllers_.size(), 0.0);
    for (size_t c = 0; c < controllers_.size(); ++c)
        if (must_step_[c]) outputs_[c] = controllers_[c].second->step(in);

    rim::GroupOutputs out(groups_.size());
    for (size_t g = 0; g < groups_.size(); ++g) {
        if (!mask[g]) continue;
        out[g] = vdta::Valuation{outputs_[groups_[g].steer_idx], outputs_[groups_[g].accel_idx]};
    }
    return out;
}

void add_f110_controllers(ControllerBank& bank, const F110BankConfig& cfg) {
    if (cfg.steer_mlp)
        bank.add_controller("steer", std::make_unique<MlpSteer>(*cfg.steer_mlp));
    else
        bank.add_controller("steer", std::make_unique<SteerGeometric>(cfg.steer));
    bank.add_controller("throttle", std::make_unique<FullThrottle>(cfg.a_max));
    bank.add_controller("swerve", std::make_unique<SwerveHeuristic>(cfg.swerve));
    bank.add_controller("brake", std::make_unique<BrakeLinear>(cfg.brake));
    bank.add_controller("pid", std::make_unique<DistancePid>(cfg.pid, cfg.lidar, cfg.dt));
}

ControllerBank make_f110_bank(const F110BankConfig& cfg) {
    ControllerBank bank;
    add_f110_controllers(bank, cfg);
    bank.add_group({"normal", "steer", "throttle"});
    bank.add_group({"cautious", "steer", "pid"});
    bank.add_group({"stopping", "swerve", "brake"});
    return bank;
}

}  // namespace ri::ctrl
