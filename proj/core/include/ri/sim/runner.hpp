#pragma once

#include <iosfwd>

#include "ri/rim/checker.hpp"
#include "ri/sim/scenario.hpp"

namespace ri::sim {

struct CarStats {
    bool spawned = false;
    bool crashed = false;
    CrashCause cause = CrashCause::None;
    uint64_t crash_tick = 0;
    uint64_t controlled_ticks = 0;
    std::vector<uint64_t> mode_ticks;  // per group, ri mode only
    uint64_t mode_changes = 0;
};

struct PhaseTiming {
    uint64_t kappa_ns = 0;       // begin_tick
    uint64_t controller_ns = 0;  // bank execution
    uint64_t gamma_ns = 0;       // end_tick (validation, selection, commit)
    uint64_t ticks = 0;
};

struct AuditResult {
    bool ran = false;
    bool trace_ok = true;            // Snd/Mono/Inst/Ca on every car's trace
    bool trap_free = true;           // no policy ever occupies a trap location
    bool suspension_frozen = true;   // PID state bit-identical across suspended ticks
    std::string detail;
};

struct ScenarioResult {
    std::vector<CarStats> cars;
    uint64_t ticks = 0;
    uint64_t peds_spawned = 0;
    PhaseTiming timing;
    AuditResult audit;

    size_t crashed_cars() const;
    bool any_crash() const { return crashed_cars() > 0; }
};

struct RunOptions {
    bool time_phases = false;
    bool audit = false;              // Def-4 trace audit + suspension checks
    std::ostream* trace_out = nullptr;
    int trace_car = 0;
};

ScenarioResult run_scenario(const SimSetup& setup, const RunOptions& opts = {});
ScenarioResult run_scenario(const SimSetup& setup, uint64_t seed_override,
                            const RunOptions& opts = {});

}  // namespace ri::sim
