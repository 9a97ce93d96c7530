#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>

#include "ri/vdta/engine.hpp"

namespace ri::rim {

using SuspensionMask = std::vector<bool>;

// Per-group output for one tick; nullopt is the bottom sentinel emitted
// by suspended groups.
using GroupOutput = std::optional<vdta::Valuation>;
using GroupOutputs = std::vector<GroupOutput>;

enum class SelectionKind { PreferLast, LowestIndex, SeededRandom };

// Resolves the choice among valid group outputs. PreferLast keeps the
// previously selected group while it stays valid, which bounds the mode
// change rate by the rate of valid-set changes.
struct SelectionPolicy {
    SelectionKind kind = SelectionKind::PreferLast;
    uint64_t seed = 0;

    static SelectionPolicy prefer_last() { return {SelectionKind::PreferLast, 0}; }
    static SelectionPolicy lowest_index() { return {SelectionKind::LowestIndex, 0}; }
    static SelectionPolicy seeded_random(uint64_t seed) {
        return {SelectionKind::SeededRandom, seed};
    }
};

enum class TickErrorKind { OutOfOrder, MaskViolation, PolicyDeadlock };

class TickError : public std::runtime_error {
public:
    TickError(TickErrorKind k, uint64_t tick, const std::string& msg)
        : std::runtime_error(msg), kind(k), tick(tick) {}
    TickErrorKind kind;
    uint64_t tick;
};

// Runtime-interchange manager: per tick, computes the suspension mask
// from the new input (kappa), validates group outputs against their
// policies (gamma), releases exactly one valid output and advances all
// policy states. Two-phase so real controllers can run between the
// phases and each phase can be timed separately.
class RiManager {
public:
    struct Config {
        SelectionPolicy selection = SelectionPolicy::prefer_last();
        // Off by default: releasing an invalid output would break
        // soundness, so deadlock is normally a hard error.
        std::optional<size_t> last_resort_group;
    };

    explicit RiManager(std::vector<std::shared_ptr<const vdta::Vdta>> policies, Config cfg);
    explicit RiManager(std::vector<std::shared_ptr<const vdta::Vdta>> policies)
        : RiManager(std::move(policies), Config{}) {}

    size_t policy_count() const { return policies_.size(); }
    const vdta::Vdta& policy(size_t i) const { return *policies_[i].vdta; }
    const vdta::InputVdta& input_policy(size_t i) const { return *policies_[i].input; }
    const std::vector<bool>& traps(size_t i) const { return policies_[i].traps; }
    const vdta::VdtaState& policy_state(size_t i) const { return policies_[i].state; }
    const vdta::StateSet& policy_state_set(size_t i) const { return policies_[i].state_set; }

    uint64_t tick_count() const { return tick_; }
    const vdta::Trace& released() const { return released_; }
    std::optional<size_t> last_selected() const { return last_selected_; }

    // Kappa: one suspension flag per group for this tick's input.
    SuspensionMask begin_tick(const vdta::Valuation& input);

    // Gamma: validates outputs (suspended groups must hand in bottom),
    // selects one valid output, releases it, advances every policy.
    vdta::IoEvent end_tick(const GroupOutputs& outputs);

    struct TickOutcome {
        SuspensionMask mask;
        std::vector<bool> b_prime;
        size_t selected = 0;
    };
    const TickOutcome& last_outcome() const { return outcome_; }

    void reset();

private:
    struct PolicyRuntime {
        std::shared_ptr<const vdta::Vdta> vdta;
        std::shared_ptr<const vdta::InputVdta> input;
        std::vector<bool> traps;
        vdta::VdtaState state;
        vdta::StateSet state_set;
        // Lookahead result staged during gamma, committed after selection.
        vdta::VdtaState staged_state;
        bool staged = false;
    };

    size_t select(const std::vector<bool>& valid);

    std::vector<PolicyRuntime> policies_;
    Config cfg_;
    std::mt19937_64 rng_;
    uint64_t tick_ = 0;
    bool in_tick_ = false;
    vdta::Valuation pending_input_;
    SuspensionMask pending_mask_;
    std::optional<size_t> last_selected_;
    vdta::Trace released_;
    TickOutcome outcome_;
};

// Controller bank callback: given the tick input and the suspension
// mask, produce one output (or bottom) per group.
using ControllerBank =
    std::function<GroupOutputs(const vdta::Valuation&, const SuspensionMask&)>;

// Folds begin_tick / controllers / end_tick over an input word starting
// from a fresh manager; the released trace has one event per input.
vdta::Trace run_word(RiManager& mgr, const std::vector<vdta::Valuation>& inputs,
                     const ControllerBank& bank);

}  // namespace ri::rim
