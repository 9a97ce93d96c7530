#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

#include "ri/sim/runner.hpp"

namespace ri::sim {

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

uint64_t sample_geometric(std::mt19937_64& rng, double mean_ticks) {
    const double p = 1.0 / std::max(1.0, mean_ticks);
    const double u = uniform01(rng);
    return 1 + static_cast<uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

struct CarRuntime {
    VehicleState veh;
    uint64_t due_tick = 0;
    std::unique_ptr<rim::RiManager> mgr;
    std::unique_ptr<ctrl::ControllerBank> bank;
    int last_mode = -1;
    std::vector<rim::TraceRow> rows;
    bool collect_rows = false;
    double pending_d = 0.0;
    double pending_a = 0.0;
    bool controlled_this_tick = false;
};

ctrl::ControllerBank make_bank(const SimSetup& setup) {
    ctrl::ControllerBank bank;
    ctrl::add_f110_controllers(bank, setup.scenario.bank);
    for (const auto& w : setup.wiring) bank.add_group(w);
    return bank;
}

uint64_t now_ns() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

}  // namespace

size_t ScenarioResult::crashed_cars() const {
    size_t n = 0;
    for (const auto& c : cars) n += c.crashed ? 1 : 0;
    return n;
}

ScenarioResult run_scenario(const SimSetup& setup, const RunOptions& opts) {
    return run_scenario(setup, setup.scenario.seed, opts);
}

ScenarioResult run_scenario(const SimSetup& setup, uint64_t seed, const RunOptions& opts) {
    const Scenario& sc = setup.scenario;
    const bool ri = sc.mode == ControlMode::Ri;
    std::mt19937_64 rng(seed);
    const auto walls = sc.track.walls();

    ScenarioResult result;
    result.cars.resize(sc.car_count);

    std::vector<CarRuntime> cars(sc.car_count);
    for (int i = 0; i < sc.car_count; ++i) {
        double spawn_s = i < static_cast<int>(sc.car_spawn_seconds.size())
                             ? sc.car_spawn_seconds[i]
                             : sc.car_spawn_seconds.back() +
                                   15.0 * (i + 1 - sc.car_spawn_seconds.size());
        cars[i].due_tick = static_cast<uint64_t>(std::llround(spawn_s / sc.dt));
        cars[i].bank = std::make_unique<ctrl::ControllerBank>(
            setup.bank_factory ? setup.bank_factory() : make_bank(setup));
        if (ri)
            cars[i].mgr = std::make_unique<rim::RiManager>(
                setup.policies, rim::RiManager::Config{sc.selection, std::nullopt});
        cars[i].collect_rows =
            opts.audit || (opts.trace_out && i == opts.trace_car);
        result.cars[i].mode_ticks.assign(setup.wiring.size(), 0);
    }

    // The pid-driven groups matter for the suspension-freeze audit.
    std::vector<size_t> pid_groups;
    for (size_t g = 0; g < setup.wiring.size(); ++g)
        if (setup.wiring[g].accel_source == "pid") pid_groups.push_back(g);

    std::vector<Pedestrian> peds;
    std::vector<VehicleState> positions(sc.car_count);  // tick-start snapshot
    std::vector<CrashCause> causes;

    AuditResult& audit = result.audit;
    audit.ran = opts.audit;

    for (uint64_t t = 0; t < sc.max_ticks; ++t) {
        // Pedestrian departures, then at most one spawn attempt.
        std::erase_if(peds, [&](const Pedestrian& p) { return p.leave_tick <= t; });
        if (static_cast<int>(peds.size()) < sc.ped_cap && uniform01(rng) < sc.ped_spawn_prob) {
            for (int attempt = 0; attempt < 20; ++attempt) {
                const double s = uniform01(rng) * sc.track.centerline_perimeter();
                const Vec2 pos = sc.track.centerline_point(s);
                bool clear = true;
                for (const auto& car : cars)
                    if (car.veh.active && (car.veh.pos - pos).norm() < sc.ped_min_spawn_gap)
                        clear = false;
                for (const auto& p : peds)
                    if ((p.pos - pos).norm() < 2.0 * sc.ped_radius + 0.1) clear = false;
                if (!clear) continue;
                Pedestrian p;
                p.pos = pos;
                p.radius = sc.ped_radius;
                p.spawn_tick = t;
                p.leave_tick = t + sample_geometric(rng, sc.ped_dwell_mean_ticks);
                peds.push_back(p);
                ++result.peds_spawned;
                break;
            }
        }

        // Car spawns, delayed while the start area is occupied.
        for (int i = 0; i < sc.car_count; ++i) {
            auto& car = cars[i];
            if (car.veh.active || t < car.due_tick) continue;
            const Vec2 start = sc.track.start_point();
            bool clear = true;
            for (const auto& other : cars)
                if (other.veh.active &&
                    (other.veh.pos - start).norm() < 4.0 * sc.vehicle.radius)
                    clear = false;
            if (!clear) continue;
            car.veh.active = true;
            car.veh.pos = start;
            car.veh.heading = sc.track.start_heading();
            car.veh.speed = 0.0;
            car.veh.spawn_tick = t;
            result.cars[i].spawned = true;
        }

        for (int i = 0; i < sc.car_count; ++i) positions[i] = cars[i].veh;

        // Control phase against the tick-start snapshot.
        for (int i = 0; i < sc.car_count; ++i) {
            auto& car = cars[i];
            car.controlled_this_tick = car.veh.active && !car.veh.crashed;
            if (!car.controlled_this_tick) continue;

            auto scan = raycast(walls, positions, peds, car.veh.pos, car.veh.heading, sc.lidar,
                                i, sc.vehicle.radius);
            const double speed = car.veh.speed;

            if (!ri) {
                ctrl::CtrlInput in{&scan, speed};
                car.pending_d = car.bank->controller("steer")->step(in);
                car.pending_a = sc.bank.a_max;
                ++result.cars[i].controlled_ticks;
                continue;
            }

            vdta::Valuation input{std::move(scan), speed};

            ctrl::PidState pid_before;
            const auto* pid =
                static_cast<const ctrl::DistancePid*>(car.bank->controller("pid"));
            if (opts.audit && pid) pid_before = pid->state();

            uint64_t t0 = 0, t1 = 0, t2 = 0, t3 = 0;
            if (opts.time_phases) t0 = now_ns();
            rim::SuspensionMask mask = car.mgr->begin_tick(input);
            if (opts.time_phases) t1 = now_ns();
            rim::GroupOutputs outputs = car.bank->step(input, mask);
            if (opts.time_phases) t2 = now_ns();
            vdta::IoEvent released = car.mgr->end_tick(outputs);
            if (opts.time_phases) {
                t3 = now_ns();
                result.timing.kappa_ns += t1 - t0;
                result.timing.controller_ns += t2 - t1;
                result.timing.gamma_ns += t3 - t2;
                ++result.timing.ticks;
            }

            const auto& outcome = car.mgr->last_outcome();
            const auto& out = *released.output;
            car.pending_d = std::get<double>(out.at(0));
            car.pending_a = std::get<double>(out.at(1));

            auto& stats = result.cars[i];
            ++stats.controlled_ticks;
            ++stats.mode_ticks[outcome.selected];
            if (car.last_mode >= 0 && car.last_mode != static_cast<int>(outcome.selected))
                ++stats.mode_changes;
            car.last_mode = static_cast<int>(outcome.selected);

            if (car.collect_rows) {
                rim::TraceRow row;
                row.tick = car.mgr->tick_count() - 1;
                row.input = input;
                row.mask = outcome.mask;
                row.group_outputs = outputs;
                row.b_prime = outcome.b_prime;
                row.selected = outcome.selected;
                row.released = released;
                if (opts.trace_out && i == opts.trace_car)
                    *opts.trace_out << rim::trace_row_to_json(row, *setup.policies[0]) << "\n";
                if (opts.audit) car.rows.push_back(std::move(row));
            }

            if (opts.audit) {
                for (size_t p = 0; p < setup.policies.size(); ++p) {
                    if (car.mgr->traps(p)[car.mgr->policy_state(p).location]) {
                        audit.trap_free = false;
                        if (audit.detail.empty())
                            audit.detail = "policy " + std::to_string(p) +
                                           " entered a trap location at tick " +
                                           std::to_string(t);
                    }
                }
                if (pid) {
                    bool pid_active = false;
                    for (size_t g : pid_groups) pid_active = pid_active || mask[g];
                    if (!pid_active && !(pid->state() == pid_before)) {
                        audit.suspension_frozen = false;
                        if (audit.detail.empty())
                            audit.detail = "pid state moved across a suspended tick " +
                                           std::to_string(t);
                    }
                }
            }
        }

        // Move phase.
        for (int i = 0; i < sc.car_count; ++i) {
            auto& car = cars[i];
            if (!car.controlled_this_tick) continue;
            step_vehicle(car.veh, car.pending_d, car.pending_a, sc.dt, sc.vehicle);
        }

        if (sc.ped_drift) {
            for (auto& p : peds) {
                const double dir = (p.spawn_tick % 2 == 0) ? 1.0 : -1.0;
                Vec2 moved = p.pos + Vec2{0.0, dir * sc.ped_drift_speed * sc.dt};
                if (sc.track.inside_corridor(moved, p.radius)) p.pos = moved;
            }
        }

        for (int i = 0; i < sc.car_count; ++i) positions[i] = cars[i].veh;
        detect_collisions(walls, positions, peds, sc.vehicle.radius, t, causes);
        for (int i = 0; i < sc.car_count; ++i) {
            if (positions[i].crashed && !cars[i].veh.crashed) {
                cars[i].veh.crashed = true;
                result.cars[i].crashed = true;
                result.cars[i].cause = causes[i];
                result.cars[i].crash_tick = t;
            }
        }
        ++result.ticks;
    }

    if (opts.audit && ri) {
        for (int i = 0; i < sc.car_count; ++i) {
            if (cars[i].rows.empty()) continue;
            auto report = rim::check_trace(setup.policies, cars[i].rows);
            if (!report.all_pass()) {
                audit.trace_ok = false;
                if (audit.detail.empty())
                    audit.detail = "car " + std::to_string(i) + ": " + report.summary();
            }
        }
    }
    return result;
}

}  // namespace ri::sim
