#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "ri/dsl/parser.hpp"
#include "ri/rim/checker.hpp"

using namespace ri;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::shared_ptr<const vdta::Vdta> load(const std::string& name) {
    auto ast = dsl::parse_policy(read_file(std::string(RI_SOURCE_DIR) + "/policies/" + name));
    return std::make_shared<const vdta::Vdta>(
        vdta::elaborate(ast, vdta::BuiltinRegistry::standard()));
}

std::vector<std::shared_ptr<const vdta::Vdta>> f110_policies() {
    return {load("normal.vdta"), load("cautious.vdta"), load("stopping.vdta")};
}
constexpr size_t kNormal = 0;
constexpr size_t kCautious = 1;
constexpr size_t kStopping = 2;

vdta::Valuation in_val(double min_r, double v) {
    return {std::vector<double>{min_r}, v};
}

vdta::Valuation out_val(double d, double a) { return {d, a}; }

std::shared_ptr<const vdta::Vdta> elaborate_text(const char* text) {
    return std::make_shared<const vdta::Vdta>(
        vdta::elaborate(dsl::parse_policy(text), vdta::BuiltinRegistry::standard()));
}

// Single-policy automaton that accepts iff the output echoes the input.
const char* kEchoPolicy = R"(
policy echo
inputs { s: scalar }
outputs { o: scalar }
locations { ok: initial accepting, bad }
transition ok -> ok when o = s
transition ok -> bad when o != s
transition bad -> bad when true
)";

// Every input sends the single policy into the trap.
const char* kDoomedPolicy = R"(
policy doomed
inputs { s: scalar }
outputs { o: scalar }
locations { l0: initial accepting, pit }
transition l0 -> pit when true
transition pit -> pit when true
)";

}  // namespace

TEST_CASE("begin_tick computes the suspension mask from the input") {
    rim::RiManager mgr(f110_policies());

    // Open road: the cautious policy's only successor is its trap.
    auto mask = mgr.begin_tick(in_val(2.0, 1.0));
    CHECK(mask == rim::SuspensionMask{true, false, true});

    rim::GroupOutputs outs(3);
    outs[kNormal] = out_val(0.0, 2.0);
    outs[kStopping] = out_val(0.0, -1.0);
    auto ev = mgr.end_tick(outs);
    CHECK_FALSE(ev.is_bottom());

    // All-trap-free policies are never suspended.
    mask = mgr.begin_tick(in_val(2.0, 1.0));
    CHECK(mask[kNormal]);
    CHECK(mask[kStopping]);
}

TEST_CASE("begin_tick twice without end_tick is out of order") {
    rim::RiManager mgr(f110_policies());
    mgr.begin_tick(in_val(2.0, 1.0));
    try {
        mgr.begin_tick(in_val(2.0, 1.0));
        FAIL("expected TickError");
    } catch (const rim::TickError& e) {
        CHECK(e.kind == rim::TickErrorKind::OutOfOrder);
    }
}

TEST_CASE("a policy with only trap successors yields an all-false mask and then deadlock") {
    rim::RiManager mgr({elaborate_text(kDoomedPolicy)});
    auto mask = mgr.begin_tick(vdta::Valuation{1.0});
    CHECK(mask == rim::SuspensionMask{false});
    try {
        mgr.end_tick(rim::GroupOutputs{std::nullopt});
        FAIL("expected TickError");
    } catch (const rim::TickError& e) {
        CHECK(e.kind == rim::TickErrorKind::PolicyDeadlock);
    }
}

TEST_CASE("mask violation: a suspended group may not hand in a real output") {
    rim::RiManager mgr(f110_policies());
    mgr.begin_tick(in_val(2.0, 1.0));  // cautious suspended
    rim::GroupOutputs outs(3);
    outs[kNormal] = out_val(0.0, 2.0);
    outs[kCautious] = out_val(0.0, 0.0);
    outs[kStopping] = out_val(0.0, -1.0);
    try {
        mgr.end_tick(outs);
        FAIL("expected TickError");
    } catch (const rim::TickError& e) {
        CHECK(e.kind == rim::TickErrorKind::MaskViolation);
    }
}

TEST_CASE("end_tick releases the accepting group's output") {
    rim::RiManager mgr(f110_policies());

    // Pedestrian at 1.0 while moving slowly: normal rejects, the
    // cautious group accepts a gentle command, stopping accepts braking.
    auto mask = mgr.begin_tick(in_val(1.0, 1.0));
    CHECK(mask == rim::SuspensionMask{true, true, true});
    rim::GroupOutputs outs(3);
    outs[kNormal] = out_val(0.0, 2.0);
    outs[kCautious] = out_val(0.0, 0.1);  // 0.1 <= kin(1.0, 1.0) = 0.5
    outs[kStopping] = out_val(0.2, -1.0);
    auto ev = mgr.end_tick(outs);
    const auto& outcome = mgr.last_outcome();
    CHECK_FALSE(outcome.b_prime[kNormal]);   // l_drive -> l_warn, non-accepting
    CHECK(outcome.b_prime[kCautious]);
    CHECK(outcome.b_prime[kStopping]);
    CHECK(outcome.selected == kCautious);    // lowest valid on the first tick
    CHECK(std::get<double>((*ev.output)[1]) == doctest::Approx(0.1));
    CHECK(mgr.released().size() == 1);
}

TEST_CASE("selection policies resolve the valid set as specified") {
    // Two copies of a policy whose acceptance depends only on the
    // current output sign, so the valid set is fully scriptable.
    const char* kFlip = R"(
policy flip
inputs { s: scalar }
outputs { o: scalar }
locations { good: initial accepting, bad }
transition good -> good when o >= 0
transition good -> bad when o < 0
transition bad -> good when o >= 0
transition bad -> bad when o < 0
)";
    auto flip = elaborate_text(kFlip);
    std::vector<std::shared_ptr<const vdta::Vdta>> two{flip, flip};

    auto tick = [&](rim::RiManager& mgr, double o0, double o1) {
        mgr.begin_tick(vdta::Valuation{1.0});
        mgr.end_tick(rim::GroupOutputs{vdta::Valuation{o0}, vdta::Valuation{o1}});
        return mgr.last_outcome().selected;
    };

    SUBCASE("prefer_last: lowest valid first, then sticky") {
        rim::RiManager mgr(two, {rim::SelectionPolicy::prefer_last(), std::nullopt});
        CHECK(tick(mgr, 1.0, 1.0) == 0);   // no history: lowest valid
        CHECK(tick(mgr, -1.0, 1.0) == 1);  // group 0 invalid
        CHECK(tick(mgr, 1.0, 1.0) == 1);   // both valid: keep the last
        CHECK(tick(mgr, 1.0, -1.0) == 0);  // group 1 invalid
        CHECK(tick(mgr, 1.0, 1.0) == 0);
    }
    SUBCASE("lowest_index ignores history") {
        rim::RiManager mgr(two, {rim::SelectionPolicy::lowest_index(), std::nullopt});
        CHECK(tick(mgr, -1.0, 1.0) == 1);
        CHECK(tick(mgr, 1.0, 1.0) == 0);
    }
    SUBCASE("seeded_random is deterministic per seed and stays in the valid set") {
        std::vector<size_t> first;
        for (int round = 0; round < 2; ++round) {
            rim::RiManager mgr(two, {rim::SelectionPolicy::seeded_random(11), std::nullopt});
            std::vector<size_t> picks;
            for (int t = 0; t < 12; ++t) picks.push_back(tick(mgr, 1.0, 1.0));
            if (round == 0) first = picks;
            else CHECK(first == picks);
            for (size_t p : picks) CHECK((p == 0 || p == 1));
        }
    }
    SUBCASE("a singleton valid set wins under every selection policy") {
        for (auto sel :
             {rim::SelectionPolicy::prefer_last(), rim::SelectionPolicy::lowest_index(),
              rim::SelectionPolicy::seeded_random(3)}) {
            rim::RiManager mgr(two, {sel, std::nullopt});
            CHECK(tick(mgr, -1.0, 2.0) == 1);
        }
    }
}

TEST_CASE("suspended policies are bit-identical before and after the tick") {
    rim::RiManager mgr(f110_policies());
    auto before = mgr.policy_state(kCautious);
    mgr.begin_tick(in_val(2.0, 1.0));
    rim::GroupOutputs outs(3);
    outs[kNormal] = out_val(0.0, 2.0);
    outs[kStopping] = out_val(0.0, 0.0);
    mgr.end_tick(outs);
    CHECK(mgr.policy_state(kCautious) == before);
    CHECK(mgr.policy_state_set(kCautious) == vdta::StateSet{before});
}

TEST_CASE("run_word: empty word, echo controller, and length preservation") {
    auto echo = elaborate_text(kEchoPolicy);

    rim::RiManager empty_mgr({echo});
    auto trace = rim::run_word(empty_mgr, {}, [](const vdta::Valuation&,
                                                 const rim::SuspensionMask&) {
        return rim::GroupOutputs{};
    });
    CHECK(trace.size() == 0);

    rim::RiManager mgr({echo});
    std::vector<vdta::Valuation> inputs;
    for (int i = 0; i < 50; ++i) inputs.push_back({static_cast<double>(i % 7)});
    auto bank = [](const vdta::Valuation& in, const rim::SuspensionMask& mask) {
        rim::GroupOutputs outs(1);
        if (mask[0]) outs[0] = vdta::Valuation{std::get<double>(in[0])};
        return outs;
    };
    trace = rim::run_word(mgr, inputs, bank);
    REQUIRE(trace.size() == inputs.size());  // Inst
    for (size_t t = 0; t < trace.size(); ++t) {
        CHECK_FALSE(trace[t].is_bottom());
        CHECK(trace[t].input == inputs[t]);
    }
}

TEST_CASE("scripted pedestrian episode: modes switch and return after six clear readings") {
    // min_front: clear for 10 ticks, pedestrian at 1.0 for ticks 10..19,
    // clear again from tick 20 on.
    std::vector<vdta::Valuation> inputs;
    for (int t = 0; t < 40; ++t) inputs.push_back(in_val(t >= 10 && t < 20 ? 1.0 : 3.0, 1.0));

    rim::RiManager mgr(f110_policies());
    std::vector<size_t> selected;
    std::vector<rim::SuspensionMask> masks;
    auto bank = [&](const vdta::Valuation&, const rim::SuspensionMask& mask) {
        masks.push_back(mask);
        rim::GroupOutputs outs(3);
        if (mask[kNormal]) outs[kNormal] = out_val(0.0, 2.0);
        if (mask[kCautious]) outs[kCautious] = out_val(0.0, 0.05);  // gentle, within kin
        if (mask[kStopping]) outs[kStopping] = out_val(0.0, -1.0);
        return outs;
    };
    auto trace = rim::run_word(mgr, inputs, bank);
    REQUIRE(trace.size() == 40);

    // Reconstruct the selections from the released accelerations.
    for (size_t t = 0; t < 40; ++t) {
        const double a = std::get<double>((*trace[t].output)[1]);
        if (a == 2.0) selected.push_back(kNormal);
        else if (a == 0.05) selected.push_back(kCautious);
        else selected.push_back(kStopping);
    }
    // Ticks 0..9: normal drives, cautious suspended.
    for (size_t t = 0; t < 10; ++t) {
        CHECK(selected[t] == kNormal);
        CHECK_FALSE(masks[t][kCautious]);
    }
    // Ticks 10..19: pedestrian in band, cautious takes over.
    for (size_t t = 10; t < 20; ++t) CHECK(selected[t] == kCautious);
    // Ticks 20..24: readings clear but the six-reading hysteresis holds:
    // normal still rejects, cautious is suspended again, stopping covers.
    for (size_t t = 20; t < 25; ++t) {
        CHECK_FALSE(masks[t][kCautious]);
        CHECK(selected[t] == kStopping);
    }
    // Tick 25 carries the sixth consecutive clear reading: normal is
    // accepting again and wins for good.
    for (size_t t = 25; t < 40; ++t) CHECK(selected[t] == kNormal);
}

TEST_CASE("check_trace passes on manager-produced traces and counts constraints") {
    auto policies = f110_policies();
    rim::RiManager mgr(policies);
    std::vector<rim::TraceRow> rows;
    for (int t = 0; t < 30; ++t) {
        const double min_r = t >= 8 && t < 16 ? 1.0 : 3.0;
        auto input = in_val(min_r, 1.0);
        auto mask = mgr.begin_tick(input);
        rim::GroupOutputs outs(3);
        if (mask[kNormal]) outs[kNormal] = out_val(0.0, 2.0);
        if (mask[kCautious]) outs[kCautious] = out_val(0.0, 0.05);
        if (mask[kStopping]) outs[kStopping] = out_val(0.0, -1.0);
        auto released = mgr.end_tick(outs);
        rim::TraceRow row;
        row.tick = static_cast<uint64_t>(t);
        row.input = input;
        row.mask = mask;
        row.group_outputs = outs;
        row.b_prime = mgr.last_outcome().b_prime;
        row.selected = mgr.last_outcome().selected;
        row.released = released;
        rows.push_back(row);
    }
    auto report = rim::check_trace(policies, rows);
    CHECK(report.all_pass());

    SUBCASE("a bottom release fails Snd") {
        auto broken = rows;
        broken[5].released.output.reset();
        auto rep = rim::check_trace(policies, broken);
        CHECK_FALSE(rep.soundness.pass);
        CHECK(rep.soundness.first_violation_tick == 5);
    }
    SUBCASE("an output matching no accepting step fails Ca (and its Snd witness)") {
        // The permissive stopping policy accepts any in-band release, so
        // mutation needs a stricter policy set: a single echo policy.
        auto echo = elaborate_text(kEchoPolicy);
        std::vector<std::shared_ptr<const vdta::Vdta>> one{echo};
        rim::RiManager emgr(one);
        std::vector<rim::TraceRow> erows;
        for (int t = 0; t < 10; ++t) {
            vdta::Valuation input{static_cast<double>(t)};
            auto mask = emgr.begin_tick(input);
            REQUIRE(mask[0]);
            rim::GroupOutputs outs{vdta::Valuation{static_cast<double>(t)}};
            auto released = emgr.end_tick(outs);
            rim::TraceRow row;
            row.tick = static_cast<uint64_t>(t);
            row.input = input;
            row.mask = mask;
            row.group_outputs = outs;
            row.b_prime = emgr.last_outcome().b_prime;
            row.selected = 0;
            row.released = released;
            erows.push_back(row);
        }
        CHECK(rim::check_trace(one, erows).all_pass());
        erows[6].released.output = vdta::Valuation{99.0};  // echo broken below threshold
        auto rep = rim::check_trace(one, erows);
        CHECK_FALSE(rep.causality.pass);
        CHECK(rep.causality.first_violation_tick == 6);
        CHECK_FALSE(rep.soundness.pass);
    }
    SUBCASE("tick renumbering fails Mono") {
        auto broken = rows;
        broken[7].tick = 9;
        auto rep = rim::check_trace(policies, broken);
        CHECK_FALSE(rep.monotonicity.pass);
    }
    SUBCASE("released input differing from the tick input fails Inst") {
        auto broken = rows;
        broken[3].released.input = in_val(4.9, 0.3);
        auto rep = rim::check_trace(policies, broken);
        CHECK_FALSE(rep.instantaneity.pass);
    }
}

TEST_CASE("trace rows survive the JSONL round trip") {
    auto policies = f110_policies();
    rim::TraceRow row;
    row.tick = 17;
    row.input = in_val(1.25, 2.0);
    row.mask = {true, false, true};
    row.group_outputs = rim::GroupOutputs{out_val(0.5, 2.0), std::nullopt, out_val(-0.25, -4.0)};
    row.b_prime = {true, false, false};
    row.selected = 0;
    row.released.input = row.input;
    row.released.output = out_val(0.5, 2.0);

    auto line = rim::trace_row_to_json(row, *policies[0]);
    auto back = rim::trace_row_from_json(line, *policies[0]);
    CHECK(back.tick == row.tick);
    CHECK(back.input == row.input);
    CHECK(back.mask == row.mask);
    CHECK(back.group_outputs == row.group_outputs);
    CHECK(back.b_prime == row.b_prime);
    CHECK(back.selected == row.selected);
    CHECK(back.released.output == row.released.output);
}
