#pragma once

#include <string>

#include "ri/rim/manager.hpp"

namespace ri::rim {

// One logged tick: everything the manager knew and decided. Serialized
// one JSON object per line; see docs/formats.md.
struct TraceRow {
    uint64_t tick = 0;
    vdta::Valuation input;
    std::vector<bool> mask;
    GroupOutputs group_outputs;
    std::vector<bool> b_prime;
    size_t selected = 0;
    vdta::IoEvent released;
};

std::string trace_row_to_json(const TraceRow& row, const vdta::Vdta& shape);
TraceRow trace_row_from_json(const std::string& line, const vdta::Vdta& shape);

struct ConstraintReport {
    bool pass = true;
    long long first_violation_tick = -1;
    std::string detail;
};

// Offline audit of a released trace against the managed policies. The
// soundness witness is searched in the input automaton extended with a
// stay option (the bottom self-loop), which the causality check over
// each group's actual history implies for manager-produced traces; both
// readings are reported.
struct TraceReport {
    ConstraintReport soundness;       // released outputs defined + witness word exists
    ConstraintReport monotonicity;    // rows form a dense append-only tick chain
    ConstraintReport instantaneity;   // one released event per input event
    ConstraintReport causality;       // some group's own history accepts each release

    bool all_pass() const {
        return soundness.pass && monotonicity.pass && instantaneity.pass && causality.pass;
    }
    std::string summary() const;
};

TraceReport check_trace(const std::vector<std::shared_ptr<const vdta::Vdta>>& policies,
                        const std::vector<TraceRow>& rows);

}  // namespace ri::rim
