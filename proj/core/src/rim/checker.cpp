#include <algorithm>
#include <cmath>
#include <sstream>

#include "ri/rim/checker.hpp"

#include "json.hpp"

namespace ri::rim {

namespace {

using nlohmann::json;

json valuation_to_json(const vdta::Valuation& val, const std::vector<dsl::ChannelDecl>& decls) {
    json out = json::object();
    for (size_t i = 0; i < val.size() && i < decls.size(); ++i) {
        if (vdta::is_array(val[i]))
            out[decls[i].name] = std::get<std::vector<double>>(val[i]);
        else
            out[decls[i].name] = std::get<double>(val[i]);
    }
    return out;
}

vdta::Valuation valuation_from_json(const json& j, const std::vector<dsl::ChannelDecl>& decls) {
    vdta::Valuation out;
    for (const auto& d : decls) {
        const json& v = j.at(d.name);
        if (d.kind == dsl::ChannelKind::Array)
            out.emplace_back(v.get<std::vector<double>>());
        else
            out.emplace_back(v.get<double>());
    }
    return out;
}

}  // namespace

std::string trace_row_to_json(const TraceRow& row, const vdta::Vdta& shape) {
    json j;
    j["tick"] = row.tick;
    j["input"] = valuation_to_json(row.input, shape.inputs);
    j["mask"] = row.mask;
    json outs = json::array();
    for (const auto& o : row.group_outputs)
        outs.push_back(o ? valuation_to_json(*o, shape.outputs) : json(nullptr));
    j["group_outputs"] = std::move(outs);
    j["b_prime"] = row.b_prime;
    j["selected"] = row.selected;
    j["released"] =
        row.released.output ? valuation_to_json(*row.released.output, shape.outputs) : json(nullptr);
    return j.dump();
}

TraceRow trace_row_from_json(const std::string& line, const vdta::Vdta& shape) {
    json j = json::parse(line);
    TraceRow row;
    row.tick = j.at("tick").get<uint64_t>();
    row.input = valuation_from_json(j.at("input"), shape.inputs);
    row.mask = j.at("mask").get<std::vector<bool>>();
    for (const auto& o : j.at("group_outputs")) {
        if (o.is_null())
            row.group_outputs.push_back(std::nullopt);
        else
            row.group_outputs.push_back(valuation_from_json(o, shape.outputs));
    }
    row.b_prime = j.at("b_prime").get<std::vector<bool>>();
    row.selected = j.at("selected").get<size_t>();
    row.released.input = row.input;
    const json& rel = j.at("released");
    if (!rel.is_null()) row.released.output = valuation_from_json(rel, shape.outputs);
    return row;
}

namespace {

// Clock values above every constant any clock atom compares against are
// indistinguishable, so witness sets stay finite under clamping.
uint64_t clock_clamp_bound(const vdta::Vdta& v) {
    uint64_t bound = 0;
    bool clampable = true;
    for (const auto& t : v.transitions) {
        for (const auto& a : t.clock_atoms) {
            if (a.rhs.kind == vdta::Term::Kind::Const)
                bound = std::max<uint64_t>(
                    bound, static_cast<uint64_t>(std::max(0.0, std::ceil(a.rhs.value))));
            else
                clampable = false;
        }
    }
    return clampable ? bound + 2 : UINT64_MAX;
}

void clamp_clocks(vdta::StateSet& set, uint64_t bound) {
    if (bound != UINT64_MAX) {
        for (auto& s : set)
            for (auto& c : s.clocks) c = std::min(c, bound);
    }
    std::sort(set.begin(), set.end(), [](const vdta::VdtaState& a, const vdta::VdtaState& b) {
        return a.location != b.location ? a.location < b.location : a.clocks < b.clocks;
    });
    set.erase(std::unique(set.begin(), set.end()), set.end());
}

void fail_once(ConstraintReport& rep, uint64_t tick, const std::string& detail) {
    if (!rep.pass) return;
    rep.pass = false;
    rep.first_violation_tick = static_cast<long long>(tick);
    rep.detail = detail;
}

}  // namespace

std::string TraceReport::summary() const {
    auto line = [](const char* name, const ConstraintReport& r) {
        std::ostringstream os;
        os << name << ": " << (r.pass ? "pass" : "FAIL");
        if (!r.pass) os << " (tick " << r.first_violation_tick << ": " << r.detail << ")";
        return os.str();
    };
    return line("Snd", soundness) + "\n" + line("Mono", monotonicity) + "\n" +
           line("Inst", instantaneity) + "\n" + line("Ca", causality) + "\n";
}

TraceReport check_trace(const std::vector<std::shared_ptr<const vdta::Vdta>>& policies,
                        const std::vector<TraceRow>& rows) {
    TraceReport rep;
    const size_t n = policies.size();

    struct Tracker {
        std::shared_ptr<const vdta::InputVdta> input;
        std::optional<vdta::VdtaState> own_state;  // cleared if its history derails
        vdta::StateSet witness_set;
        uint64_t clamp = 0;
    };
    std::vector<Tracker> track(n);
    for (size_t i = 0; i < n; ++i) {
        track[i].input = std::make_shared<const vdta::InputVdta>(vdta::project_input(*policies[i]));
        track[i].own_state = vdta::initial_state(*policies[i]);
        track[i].witness_set = {*track[i].own_state};
        track[i].clamp = clock_clamp_bound(*policies[i]);
    }

    for (size_t t = 0; t < rows.size(); ++t) {
        const TraceRow& row = rows[t];

        if (row.tick != t)
            fail_once(rep.monotonicity, t,
                      "expected tick " + std::to_string(t) + ", found " +
                          std::to_string(row.tick));
        if (row.group_outputs.size() != n || row.released.input != row.input)
            fail_once(rep.instantaneity, t, "row does not pair the tick input with one release");

        const bool released_defined = !row.released.is_bottom();
        if (!released_defined) fail_once(rep.soundness, t, "released output is bottom");

        bool ca = false;
        bool snd_witness = false;
        if (released_defined) {
            vdta::IoEvent release_ev{row.input, row.released.output};
            for (size_t i = 0; i < n && !(ca && snd_witness); ++i) {
                if (!ca && track[i].own_state) {
                    try {
                        auto res = vdta::step(*policies[i], *track[i].own_state, release_ev);
                        ca = ca || res.accepting;
                    } catch (const vdta::StepError&) {
                    }
                }
                if (!snd_witness) {
                    auto succ = vdta::step_all(*policies[i], track[i].witness_set, release_ev);
                    for (const auto& s : succ)
                        if (policies[i]->accepting[s.location]) {
                            snd_witness = true;
                            break;
                        }
                }
            }
        }
        if (!ca) fail_once(rep.causality, t, "no group's own history accepts the release");
        if (released_defined && !snd_witness)
            fail_once(rep.soundness, t, "no witness word reaches acceptance for any policy");

        // Advance each group's own history (bottom means stay) and the
        // witness sets (stay or any projected input step).
        for (size_t i = 0; i < n; ++i) {
            if (track[i].own_state && i < row.group_outputs.size() && row.group_outputs[i]) {
                try {
                    track[i].own_state =
                        vdta::step(*policies[i], *track[i].own_state,
                                   vdta::IoEvent{row.input, row.group_outputs[i]})
                            .state;
                } catch (const vdta::StepError&) {
                    track[i].own_state.reset();
                }
            }
            auto stepped = vdta::step_input(*track[i].input, track[i].witness_set, row.input);
            auto& set = track[i].witness_set;
            set.insert(set.end(), stepped.begin(), stepped.end());
            clamp_clocks(set, track[i].clamp);
        }
    }
    return rep;
}

}  // namespace ri::rim
