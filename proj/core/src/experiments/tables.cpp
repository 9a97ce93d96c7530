#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "ri/experiments/experiments.hpp"

namespace ri::experiments {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

uint64_t trial_seed(uint64_t base_seed, uint64_t cell_index, uint64_t trial_index) {
    return splitmix64(splitmix64(base_seed ^ (cell_index * 0x51ed270b7a4cf0adULL)) ^
                      trial_index);
}

ExperimentPlan plan_from_config(const std::string& path) {
    auto cfg = sim::ConfigFile::parse_file(path);
    ExperimentPlan plan;
    plan.trials = static_cast<int>(cfg.integer("plan", "trials", plan.trials));
    plan.full_scale_trials =
        static_cast<int>(cfg.integer("plan", "full_scale_trials", plan.full_scale_trials));
    plan.base_seed = cfg.integer("plan", "base_seed", plan.base_seed);
    plan.out_dir = cfg.str("plan", "out_dir", plan.out_dir);
    auto cars = cfg.number_list("plan", "cars", {1, 2, 3});
    auto peds = cfg.number_list("plan", "peds", {0, 1, 2});
    plan.car_counts.assign(cars.begin(), cars.end());
    plan.ped_counts.assign(peds.begin(), peds.end());
    plan.modes.clear();
    for (const auto& m : cfg.str_list("plan", "modes", {"bare", "ri"})) {
        if (m == "bare") plan.modes.push_back(sim::ControlMode::Bare);
        else if (m == "ri") plan.modes.push_back(sim::ControlMode::Ri);
        else throw std::runtime_error("plan.modes entries must be 'bare' or 'ri'");
    }
    plan.workers = static_cast<int>(cfg.integer("plan", "workers", 0));
    const std::string scenario = cfg.str("plan", "scenario", "");
    if (!scenario.empty()) {
        auto base = std::filesystem::path(path).parent_path();
        plan.scenario_config = (base / scenario).string();
    }
    return plan;
}

const CellResult* TablesResult::find(sim::ControlMode mode, int cars, int peds) const {
    for (const auto& c : cells)
        if (c.mode == mode && c.cars == cars && c.peds == peds) return &c;
    return nullptr;
}

namespace {

struct TrialOutcome {
    int cars_total = 0;
    int cars_crashed = 0;
    bool any_crash = false;
    std::vector<uint64_t> mode_ticks;
    uint64_t changes = 0;
    uint64_t controlled_ticks = 0;
    bool audit_pass = true;
};

CellResult reduce_cell(const ExperimentPlan& plan, sim::ControlMode mode, int cars, int peds,
                       const std::vector<TrialOutcome>& outcomes, size_t groups) {
    CellResult cell;
    cell.mode = mode;
    cell.cars = cars;
    cell.peds = peds;
    cell.trials = static_cast<int>(outcomes.size());
    long long total_cars = 0;
    long long crashed = 0;
    long long any = 0;
    std::vector<uint64_t> mode_ticks(groups, 0);
    uint64_t changes = 0;
    uint64_t controlled = 0;
    for (const auto& o : outcomes) {
        total_cars += o.cars_total;
        crashed += o.cars_crashed;
        any += o.any_crash ? 1 : 0;
        for (size_t g = 0; g < groups && g < o.mode_ticks.size(); ++g)
            mode_ticks[g] += o.mode_ticks[g];
        changes += o.changes;
        controlled += o.controlled_ticks;
        cell.audit_pass = cell.audit_pass && o.audit_pass;
    }
    const double n = static_cast<double>(std::max<long long>(1, total_cars));
    const double p = static_cast<double>(crashed) / n;
    cell.crash_rate_pct = 100.0 * p;
    cell.any_crash_rate_pct = 100.0 * static_cast<double>(any) / std::max(1, cell.trials);
    // Wilson interval, z = 1.96.
    const double z = 1.96;
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / denom;
    const double margin = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    cell.crash_ci_low_pct = 100.0 * std::max(0.0, center - margin);
    cell.crash_ci_high_pct = 100.0 * std::min(1.0, center + margin);

    cell.mode_pct.assign(groups, 0.0);
    if (controlled > 0) {
        for (size_t g = 0; g < groups; ++g)
            cell.mode_pct[g] = 100.0 * static_cast<double>(mode_ticks[g]) /
                               static_cast<double>(controlled);
        cell.change_rate_pct =
            100.0 * static_cast<double>(changes) / static_cast<double>(controlled);
    }
    return cell;
}

}  // namespace

TablesResult run_tables(const ExperimentPlan& plan, const sim::SimSetup& base) {
    TablesResult result;
    for (const auto& w : base.wiring) result.group_names.push_back(w.name);

    const int trials = plan.effective_trials();
    int workers = plan.workers > 0 ? plan.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;

    uint64_t cell_index = 0;
    for (auto mode : plan.modes) {
        for (int cars : plan.car_counts) {
            for (int peds : plan.ped_counts) {
                sim::SimSetup setup = base;
                setup.scenario.mode = mode;
                setup.scenario.car_count = cars;
                setup.scenario.ped_cap = peds;

                std::vector<TrialOutcome> outcomes(trials);
                std::atomic<int> next{0};
                auto work = [&]() {
                    for (int trial = next.fetch_add(1); trial < trials;
                         trial = next.fetch_add(1)) {
                        sim::RunOptions opts;
                        opts.audit = mode == sim::ControlMode::Ri;
                        auto res = sim::run_scenario(
                            setup, trial_seed(plan.base_seed, cell_index, trial), opts);
                        TrialOutcome& o = outcomes[trial];
                        o.mode_ticks.assign(base.wiring.size(), 0);
                        for (const auto& car : res.cars) {
                            if (!car.spawned) continue;
                            ++o.cars_total;
                            o.cars_crashed += car.crashed ? 1 : 0;
                            o.any_crash = o.any_crash || car.crashed;
                            o.changes += car.mode_changes;
                            o.controlled_ticks += car.controlled_ticks;
                            for (size_t g = 0; g < car.mode_ticks.size(); ++g)
                                o.mode_ticks[g] += car.mode_ticks[g];
                        }
                        o.audit_pass = !res.audit.ran ||
                                       (res.audit.trace_ok && res.audit.trap_free &&
                                        res.audit.suspension_frozen);
                    }
                };
                std::vector<std::thread> pool;
                for (int w = 1; w < workers; ++w) pool.emplace_back(work);
                work();
                for (auto& th : pool) th.join();

                result.cells.push_back(
                    reduce_cell(plan, mode, cars, peds, outcomes, base.wiring.size()));
                ++cell_index;
            }
        }
    }
    return result;
}

namespace {

double named_pct(const CellResult& cell, const std::vector<std::string>& names,
                 const std::string& wanted) {
    for (size_t g = 0; g < names.size() && g < cell.mode_pct.size(); ++g)
        if (names[g] == wanted) return cell.mode_pct[g];
    return 0.0;
}

}  // namespace

void write_csvs(const TablesResult& tables, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto& names = tables.group_names;

    std::ofstream t1(std::filesystem::path(out_dir) / "table1.csv");
    t1 << "cars,peds,trials,crash_rate_pct,any_crash_rate_pct,crash_ci_low_pct,crash_ci_high_pct\n";
    std::ofstream t2(std::filesystem::path(out_dir) / "table2.csv");
    t2 << "cars,peds,trials,normal_pct,stopping_pct,cautious_pct,change_rate_pct,"
          "crash_rate_pct,any_crash_rate_pct,audit_pass\n";
    std::ofstream sm(std::filesystem::path(out_dir) / "summary.csv");
    sm << "scenario,cars,peds,crash_rate,normal_pct,stopping_pct,cautious_pct,change_rate\n";

    for (const auto& c : tables.cells) {
        const char* scen = c.mode == sim::ControlMode::Bare ? "bare" : "ri";
        char buf[512];
        if (c.mode == sim::ControlMode::Bare) {
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%.3f,%.3f,%.3f,%.3f\n", c.cars, c.peds,
                          c.trials, c.crash_rate_pct, c.any_crash_rate_pct, c.crash_ci_low_pct,
                          c.crash_ci_high_pct);
            t1 << buf;
        } else {
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%d\n",
                          c.cars, c.peds, c.trials, named_pct(c, names, "normal"),
                          named_pct(c, names, "stopping"), named_pct(c, names, "cautious"),
                          c.change_rate_pct, c.crash_rate_pct, c.any_crash_rate_pct,
                          c.audit_pass ? 1 : 0);
            t2 << buf;
        }
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.3f,%.3f,%.3f,%.3f,%.3f\n", scen, c.cars,
                      c.peds, c.crash_rate_pct, named_pct(c, names, "normal"),
                      named_pct(c, names, "stopping"), named_pct(c, names, "cautious"),
                      c.change_rate_pct);
        sm << buf;
    }
}

}  // namespace ri::experiments
