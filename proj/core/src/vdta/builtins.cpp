#include <algorithm>
#include <cmath>
#include <limits>

#include "ri/vdta/engine.hpp"

namespace ri::vdta {

uint32_t BuiltinRegistry::add(std::string name, int arity, Fn fn,
                              std::shared_ptr<const void> env) {
    entries_.push_back(Entry{std::move(name), arity, fn, std::move(env)});
    return static_cast<uint32_t>(entries_.size() - 1);
}

std::optional<uint32_t> BuiltinRegistry::find(const std::string& name) const {
    for (uint32_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].name == name) return i;
    return std::nullopt;
}

namespace {

double min_front_impl(const std::vector<ArgValue>& args, const void* env) {
    const auto& cfg = *static_cast<const BuiltinRegistry::StandardConfig*>(env);
    if (args.size() != 1 || !args[0].is_array())
        throw StepError(StepErrorKind::EvalError, "min_front expects one array argument");
    const auto& scan = *args[0].array;
    if (scan.empty())
        throw StepError(StepErrorKind::EvalError, "min_front applied to an empty scan");
    const int n = static_cast<int>(scan.size());
    if (n == 1) return scan[0];
    // Rays span fov_deg evenly; keep those within the centered front sector.
    const double spacing = cfg.fov_deg / (n - 1);
    const int half = static_cast<int>(std::floor(cfg.front_sector_deg / 2.0 / spacing));
    const int center = (n - 1) / 2;
    const int lo = std::max(0, center - half);
    const int hi = std::min(n - 1, center + half);
    return *std::min_element(scan.begin() + lo, scan.begin() + hi + 1);
}

double kin_impl(const std::vector<ArgValue>& args, const void* env) {
    const auto& cfg = *static_cast<const BuiltinRegistry::StandardConfig*>(env);
    if (args.size() != 2 || args[0].is_array() || args[1].is_array())
        throw StepError(StepErrorKind::EvalError, "kin expects two scalar arguments");
    const double dist = args[0].scalar;
    const double speed = args[1].scalar;
    // Guard evaluation must stay total: a non-positive distance means no
    // finite deceleration can help.
    if (dist <= 0.0) return std::numeric_limits<double>::infinity();
    return cfg.kin_safety_factor * speed * speed / (2.0 * dist);
}

}  // namespace

std::shared_ptr<const BuiltinRegistry> BuiltinRegistry::standard(StandardConfig cfg) {
    auto env = std::make_shared<StandardConfig>(cfg);
    auto reg = std::make_shared<BuiltinRegistry>();
    reg->add("min_front", 1, &min_front_impl, env);
    reg->add("kin", 2, &kin_impl, env);
    return reg;
}

}  // namespace ri::vdta
