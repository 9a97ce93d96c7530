#include <chrono>
#include <cmath>

#include "ri/experiments/experiments.hpp"

namespace ri::experiments {

OverheadReport measure_overhead(const sim::SimSetup& setup, int trials, uint64_t base_seed) {
    OverheadReport report;
    uint64_t kappa = 0;
    uint64_t gamma = 0;
    uint64_t controllers = 0;
    uint64_t ticks = 0;
    for (int trial = 0; trial < trials; ++trial) {
        sim::RunOptions opts;
        opts.time_phases = true;
        auto res = sim::run_scenario(setup, trial_seed(base_seed, 0xfeed, trial), opts);
        kappa += res.timing.kappa_ns;
        gamma += res.timing.gamma_ns;
        controllers += res.timing.controller_ns;
        ticks += res.timing.ticks;
    }
    if (ticks == 0) return report;
    report.ticks = ticks;
    report.manager_ns_per_tick = static_cast<double>(kappa + gamma) / ticks;
    report.controller_ns_per_tick = static_cast<double>(controllers) / ticks;
    // A real controller bank burns at least on the order of a hundred
    // nanoseconds; below that the denominator is a stub.
    report.stub_flagged = report.controller_ns_per_tick < 100.0;
    report.ratio = report.controller_ns_per_tick > 0.0
                       ? report.manager_ns_per_tick / report.controller_ns_per_tick
                       : 0.0;
    return report;
}

ScalingResult run_scaling(const sim::SimSetup& base, const std::vector<int>& counts,
                          uint64_t seed) {
    ScalingResult result;
    for (int k : counts) {
        sim::SimSetup setup = base;
        setup.policies.clear();
        setup.wiring.clear();
        for (int copy = 0; copy < k; ++copy) {
            for (size_t i = 0; i < base.policies.size(); ++i) {
                setup.policies.push_back(base.policies[i]);
                setup.wiring.push_back(base.wiring[i]);
            }
        }
        const auto t0 = std::chrono::steady_clock::now();
        auto res = sim::run_scenario(setup, seed, {});
        const auto t1 = std::chrono::steady_clock::now();
        ScalingPoint point;
        point.copies = k;
        point.policies = setup.policies.size();
        point.ns_per_tick =
            static_cast<double>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()) /
            static_cast<double>(std::max<uint64_t>(1, res.ticks));
        result.points.push_back(point);
    }
    if (!result.points.empty()) {
        const double first = result.points.front().ns_per_tick;
        for (auto& p : result.points) p.ratio_vs_first = p.ns_per_tick / first;
    }

    // Least squares of ns_per_tick against the duplication count.
    const size_t n = result.points.size();
    if (n >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& p : result.points) {
            const double x = p.copies;
            sx += x;
            sy += p.ns_per_tick;
            sxx += x * x;
            sxy += x * p.ns_per_tick;
        }
        const double denom = n * sxx - sx * sx;
        result.slope = (n * sxy - sx * sy) / denom;
        result.intercept = (sy - result.slope * sx) / n;
        double ss_res = 0, ss_tot = 0;
        const double mean = sy / n;
        for (const auto& p : result.points) {
            const double fit = result.slope * p.copies + result.intercept;
            ss_res += (p.ns_per_tick - fit) * (p.ns_per_tick - fit);
            ss_tot += (p.ns_per_tick - mean) * (p.ns_per_tick - mean);
        }
        result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    }
    return result;
}

}  // namespace ri::experiments
