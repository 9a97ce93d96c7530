#include <cassert>
#include <map>

#include "ri/rim/manager.hpp"

namespace ri::rim {

RiManager::RiManager(std::vector<std::shared_ptr<const vdta::Vdta>> policies, Config cfg)
    : cfg_(cfg), rng_(cfg.selection.seed) {
    if (policies.empty()) throw std::invalid_argument("RiManager needs at least one policy");
    if (cfg_.last_resort_group && *cfg_.last_resort_group >= policies.size())
        throw std::invalid_argument("last-resort group index out of range");

    // Clones of the same automaton (scaling experiments) share one
    // projection and one trap mask.
    std::map<const vdta::Vdta*, std::shared_ptr<const vdta::InputVdta>> projections;

    const auto& ref = *policies.front();
    for (auto& p : policies) {
        if (p->inputs != ref.inputs || p->outputs != ref.outputs)
            throw std::invalid_argument(
                "all policies of one manager must declare identical channels");
        PolicyRuntime rt;
        rt.vdta = p;
        auto it = projections.find(p.get());
        if (it == projections.end()) {
            it = projections
                     .emplace(p.get(),
                              std::make_shared<const vdta::InputVdta>(vdta::project_input(*p)))
                     .first;
        }
        rt.input = it->second;
        rt.traps = vdta::trap_mask(*p);
        rt.state = vdta::initial_state(*p);
        rt.state_set = {rt.state};
        policies_.push_back(std::move(rt));
    }
}

void RiManager::reset() {
    for (auto& p : policies_) {
        p.state = vdta::initial_state(*p.vdta);
        p.state_set = {p.state};
        p.staged = false;
    }
    tick_ = 0;
    in_tick_ = false;
    last_selected_.reset();
    released_ = {};
    outcome_ = {};
    rng_.seed(cfg_.selection.seed);
}

SuspensionMask RiManager::begin_tick(const vdta::Valuation& input) {
    if (in_tick_)
        throw TickError(TickErrorKind::OutOfOrder, tick_,
                        "begin_tick called twice without end_tick");
    pending_mask_.assign(policies_.size(), false);
    for (size_t i = 0; i < policies_.size(); ++i) {
        const auto& p = policies_[i];
        pending_mask_[i] = vdta::can_avoid_trap(*p.input, p.state_set, input, p.traps);
    }
    pending_input_ = input;
    in_tick_ = true;
    return pending_mask_;
}

size_t RiManager::select(const std::vector<bool>& valid) {
    if (cfg_.selection.kind == SelectionKind::PreferLast && last_selected_ &&
        valid[*last_selected_])
        return *last_selected_;
    if (cfg_.selection.kind == SelectionKind::SeededRandom) {
        std::vector<size_t> candidates;
        for (size_t i = 0; i < valid.size(); ++i)
            if (valid[i]) candidates.push_back(i);
        return candidates[rng_() % candidates.size()];
    }
    for (size_t i = 0; i < valid.size(); ++i)
        if (valid[i]) return i;
    assert(false && "select requires a non-empty valid set");
    return 0;
}

vdta::IoEvent RiManager::end_tick(const GroupOutputs& outputs) {
    if (!in_tick_)
        throw TickError(TickErrorKind::OutOfOrder, tick_, "end_tick called before begin_tick");
    if (outputs.size() != policies_.size())
        throw std::invalid_argument("one output per controller group required");

    std::vector<bool> b_prime(policies_.size(), false);
    bool any_valid = false;
    for (size_t i = 0; i < policies_.size(); ++i) {
        auto& p = policies_[i];
        p.staged = false;
        if (!pending_mask_[i]) {
            if (outputs[i].has_value())
                throw TickError(TickErrorKind::MaskViolation, tick_,
                                "suspended group " + std::to_string(i) +
                                    " produced a non-bottom output");
            continue;
        }
        if (!outputs[i].has_value()) continue;  // voluntary bottom: invalid this tick
        // Lookahead on a copy so validation never mutates live state.
        vdta::IoEvent ev{pending_input_, outputs[i]};
        auto res = vdta::step(*p.vdta, p.state, ev);
        p.staged_state = std::move(res.state);
        p.staged = true;
        b_prime[i] = res.accepting;
        any_valid = any_valid || res.accepting;
    }

    size_t selected;
    if (any_valid) {
        selected = select(b_prime);
    } else if (cfg_.last_resort_group && outputs[*cfg_.last_resort_group].has_value()) {
        selected = *cfg_.last_resort_group;
    } else {
        throw TickError(TickErrorKind::PolicyDeadlock, tick_,
                        "no controller group produced a policy-accepting output at tick " +
                            std::to_string(tick_));
    }

    // Commit: suspended or bottom groups stay frozen (the implicit
    // (x, bottom) self-loop), everything else advances on its own
    // output; the tracked input-automaton state follows the policy
    // state, which Algorithm-style joint bookkeeping requires.
    for (auto& p : policies_) {
        if (!p.staged) continue;
        p.state = std::move(p.staged_state);
        p.state_set.assign(1, p.state);
        p.staged = false;
    }

    vdta::IoEvent released{pending_input_, outputs[selected]};
    released_.append(released);
    outcome_ = TickOutcome{pending_mask_, std::move(b_prime), selected};
    last_selected_ = selected;
    ++tick_;
    in_tick_ = false;
    assert(released_.size() == tick_);
    return released;
}

vdta::Trace run_word(RiManager& mgr, const std::vector<vdta::Valuation>& inputs,
                     const ControllerBank& bank) {
    if (mgr.tick_count() != 0)
        throw std::invalid_argument("run_word requires a fresh manager");
    for (size_t t = 0; t < inputs.size(); ++t) {
        try {
            SuspensionMask mask = mgr.begin_tick(inputs[t]);
            GroupOutputs outputs = bank(inputs[t], mask);
            mgr.end_tick(outputs);
        } catch (const vdta::StepError& e) {
            throw std::runtime_error("tick " + std::to_string(t) + ": " + e.what());
        }
    }
    return mgr.released();
}

}  // namespace ri::rim
