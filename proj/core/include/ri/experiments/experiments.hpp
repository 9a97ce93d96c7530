#pragma once

#include "ri/sim/runner.hpp"

namespace ri::experiments {

// Grid of (cars, peds) x control mode cells, each run for a fixed trial
// count with per-trial seeds derived from base_seed + cell + trial.
struct ExperimentPlan {
    std::vector<int> car_counts = {1, 2, 3};
    std::vector<int> ped_counts = {0, 1, 2};
    std::vector<sim::ControlMode> modes = {sim::ControlMode::Bare, sim::ControlMode::Ri};
    int trials = 200;
    int full_scale_trials = 1000;
    bool full_scale = false;
    uint64_t base_seed = 20240001;
    std::string out_dir = "results";
    std::string scenario_config;  // empty selects the built-in defaults
    int workers = 0;              // 0 = hardware concurrency

    int effective_trials() const { return full_scale ? full_scale_trials : trials; }
};

ExperimentPlan plan_from_config(const std::string& path);

uint64_t trial_seed(uint64_t base_seed, uint64_t cell_index, uint64_t trial_index);

struct CellResult {
    sim::ControlMode mode = sim::ControlMode::Bare;
    int cars = 1;
    int peds = 0;
    int trials = 0;
    double crash_rate_pct = 0.0;      // crashed cars / all cars (the paper's metric)
    double any_crash_rate_pct = 0.0;  // trials with at least one crash
    double crash_ci_low_pct = 0.0;    // Wilson 95% on the per-car rate
    double crash_ci_high_pct = 0.0;
    std::vector<double> mode_pct;     // occupancy per group, ri only
    double change_rate_pct = 0.0;
    bool audit_pass = true;           // every ri trial passed the trace audit
};

struct TablesResult {
    std::vector<CellResult> cells;
    std::vector<std::string> group_names;

    const CellResult* find(sim::ControlMode mode, int cars, int peds) const;
};

TablesResult run_tables(const ExperimentPlan& plan, const sim::SimSetup& base);

// table1.csv (bare crash rates), table2.csv (ri mode occupancy and crash
// rates) and summary.csv (fixed 8-column layout; docs/formats.md).
void write_csvs(const TablesResult& tables, const std::string& out_dir);

struct OverheadReport {
    double manager_ns_per_tick = 0.0;     // kappa + gamma
    double controller_ns_per_tick = 0.0;  // controller bank execution
    double ratio = 0.0;                   // manager / controller
    bool stub_flagged = false;            // denominator too small to be a real bank
    uint64_t ticks = 0;
};

OverheadReport measure_overhead(const sim::SimSetup& setup, int trials, uint64_t base_seed);

struct ScalingPoint {
    int copies = 0;  // copies of the policy set
    size_t policies = 0;
    double ns_per_tick = 0.0;
    double ratio_vs_first = 0.0;
};

struct ScalingResult {
    std::vector<ScalingPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Duplicates the policy set `count` times, reruns the scenario, and fits
// wall time per tick against the duplication count.
ScalingResult run_scaling(const sim::SimSetup& base, const std::vector<int>& counts,
                          uint64_t seed);

}  // namespace ri::experiments
