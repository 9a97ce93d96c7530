#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ri/dsl/ast.hpp"

namespace ri::vdta {

// Channel values are finite scalars or fixed-length arrays of finite
// scalars (e.g. a LiDAR scan).
using ChannelValue = std::variant<double, std::vector<double>>;
using Valuation = std::vector<ChannelValue>;

inline bool is_array(const ChannelValue& v) { return v.index() == 1; }

// One tick's input valuation paired with an output valuation or the
// bottom sentinel (suspended group; no output this tick).
struct IoEvent {
    Valuation input;
    std::optional<Valuation> output;  // nullopt encodes bottom

    bool is_bottom() const { return !output.has_value(); }

    static IoEvent bottom(Valuation in) { return IoEvent{std::move(in), std::nullopt}; }
};

// Append-only event sequence.
class Trace {
public:
    void append(IoEvent ev) { events_.push_back(std::move(ev)); }

    size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    const IoEvent& operator[](size_t i) const { return events_[i]; }
    const std::vector<IoEvent>& events() const { return events_; }

private:
    std::vector<IoEvent> events_;
};

// Builtin guard functions. Arguments are evaluated scalars or borrowed
// array channels; builtins must be pure and total over finite inputs.
struct ArgValue {
    double scalar = 0.0;
    const std::vector<double>* array = nullptr;

    bool is_array() const { return array != nullptr; }
};

class BuiltinRegistry {
public:
    using Fn = double (*)(const std::vector<ArgValue>&, const void* env);

    struct Entry {
        std::string name;
        int arity;
        Fn fn;
        std::shared_ptr<const void> env;
    };

    uint32_t add(std::string name, int arity, Fn fn, std::shared_ptr<const void> env = nullptr);
    std::optional<uint32_t> find(const std::string& name) const;
    const Entry& entry(uint32_t idx) const { return entries_[idx]; }
    size_t size() const { return entries_.size(); }

    // Registry with the closed builtin set used by the shipped policies:
    //   min_front(scan)  minimum reading over the centered front sector
    //   kin(dist, speed) minimum deceleration that stops within dist
    struct StandardConfig {
        double fov_deg = 230.0;
        double front_sector_deg = 41.5;
        double kin_safety_factor = 1.0;
    };
    static std::shared_ptr<const BuiltinRegistry> standard(StandardConfig cfg);
    static std::shared_ptr<const BuiltinRegistry> standard() { return standard(StandardConfig{}); }

private:
    std::vector<Entry> entries_;
};

// Elaborated guard term over numbered channels, clocks and builtins.
struct Term {
    enum class Kind : uint8_t { Const, Input, Output, Clock, Call };

    Kind kind = Kind::Const;
    double value = 0.0;     // Const
    uint32_t index = 0;     // channel / clock / builtin index
    std::vector<Term> args; // Call
};

enum class AtomClass : uint8_t { Input, Output, Clock };

struct Atom {
    Term lhs;
    dsl::CmpOp op = dsl::CmpOp::Lt;
    Term rhs;
    AtomClass cls = AtomClass::Input;
};

// Guards are stored split by atom class so the input projection and the
// two evaluation phases need no re-classification at runtime.
struct Transition {
    uint32_t from = 0;
    uint32_t to = 0;
    std::vector<Atom> input_atoms;   // over inputs only
    std::vector<Atom> clock_atoms;   // clock on the left, per the atom form
    std::vector<Atom> output_atoms;  // mention at least one output
    std::vector<uint32_t> resets;    // clock indices
};

struct Vdta {
    std::string name;
    std::vector<std::string> locations;
    std::vector<bool> accepting;
    uint32_t initial = 0;
    std::vector<std::string> clocks;
    std::vector<dsl::ChannelDecl> inputs;
    std::vector<dsl::ChannelDecl> outputs;
    std::vector<Transition> transitions;
    std::vector<std::vector<uint32_t>> out_edges;  // per-location indices into transitions
    std::shared_ptr<const BuiltinRegistry> builtins;

    size_t location_count() const { return locations.size(); }
};

// Same structure as the source automaton with output-dependent guard
// atoms removed; runs on inputs alone and may be non-deterministic.
struct InputVdta {
    Vdta automaton;
};

// Runtime state q = (location, clock valuation).
struct VdtaState {
    uint32_t location = 0;
    std::vector<uint64_t> clocks;

    bool operator==(const VdtaState&) const = default;
};

using StateSet = std::vector<VdtaState>;

inline VdtaState initial_state(const Vdta& v) {
    return VdtaState{v.initial, std::vector<uint64_t>(v.clocks.size(), 0)};
}

}  // namespace ri::vdta
