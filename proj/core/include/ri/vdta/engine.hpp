#pragma once

#include <set>
#include <stdexcept>

#include "ri/vdta/vdta.hpp"

namespace ri::vdta {

enum class ElaborateErrorKind {
    ClockAtomMalformed,
    UnknownBuiltin,
    ArityMismatch,
    ArrayOutsideCall,
};

class ElaborateError : public std::runtime_error {
public:
    ElaborateError(ElaborateErrorKind k, const std::string& msg)
        : std::runtime_error(msg), kind(k) {}
    ElaborateErrorKind kind;
};

// Lowers a validated AST to an executable automaton: deterministic
// numbering of locations/clocks/channels (declaration order), guard
// atoms split into input / clock / output classes, builtin names
// resolved against the registry.
Vdta elaborate(const dsl::PolicyAst& ast, std::shared_ptr<const BuiltinRegistry> builtins);

enum class StepErrorKind { NonDeterministic, Incomplete, EvalError };

class StepError : public std::runtime_error {
public:
    StepError(StepErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    StepErrorKind kind;
};

struct StepResult {
    VdtaState state;
    bool accepting = false;
};

// One synchronous tick: clocks advance by one, the unique enabled
// transition fires, reset clocks return to zero. Requires a complete
// output valuation; determinism and completeness are enforced per step.
StepResult step(const Vdta& vdta, const VdtaState& state, const IoEvent& event);

// In-place variant used by the tick loop; returns acceptance.
bool step_into(const Vdta& vdta, VdtaState& state, const IoEvent& event);

// Suspended tick: the implicit (input, bottom) self-loop. Location and
// clock values are untouched.
VdtaState step_suspended(const Vdta& vdta, const VdtaState& state);

InputVdta project_input(const Vdta& vdta);

// All successor states of every member under every enabled projected
// transition. Empty result means no transition is enabled anywhere.
StateSet step_input(const InputVdta& ivdta, const StateSet& states, const Valuation& input);

// All successor states of every member under every transition whose
// full guard is enabled on the event; non-deterministic exploration for
// trace auditing.
StateSet step_all(const Vdta& vdta, const StateSet& states, const IoEvent& event);

// Locations with no guard-free path to any accepting location.
std::vector<bool> trap_mask(const Vdta& vdta);
std::set<uint32_t> trap_locations(const Vdta& vdta);

// True iff some successor under the projected step avoids the traps;
// the computable stand-in for the existential extension check.
bool can_avoid_trap(const InputVdta& ivdta, const StateSet& states, const Valuation& input,
                    const std::vector<bool>& traps);

// Best-effort determinism lint: flags location-local transition pairs
// that no shared atom provably separates. Overlap warnings, not errors.
std::vector<std::string> lint_determinism(const Vdta& vdta);

// Graphviz rendering of the automaton (locations, guards, resets).
std::string to_dot(const Vdta& vdta);

}  // namespace ri::vdta
