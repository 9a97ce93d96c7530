#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "ri/vdta/engine.hpp"

namespace ri::vdta {

namespace {

struct EvalCtx {
    const Valuation* input = nullptr;
    const Valuation* output = nullptr;           // null during the input phase
    const std::vector<uint64_t>* clocks = nullptr;  // pre-tick values; +1 applied here
    const BuiltinRegistry* reg = nullptr;
};

double eval_scalar(const Term& t, const EvalCtx& ctx);

const ChannelValue& channel_ref(const Term& t, const EvalCtx& ctx) {
    if (t.kind == Term::Kind::Input) {
        if (t.index >= ctx.input->size())
            throw StepError(StepErrorKind::EvalError, "input valuation is missing a channel");
        return (*ctx.input)[t.index];
    }
    if (!ctx.output)
        throw StepError(StepErrorKind::EvalError,
                        "output channel referenced while no output is available");
    if (t.index >= ctx.output->size())
        throw StepError(StepErrorKind::EvalError, "output valuation is missing a channel");
    return (*ctx.output)[t.index];
}

ArgValue eval_arg(const Term& t, const EvalCtx& ctx) {
    if (t.kind == Term::Kind::Input || t.kind == Term::Kind::Output) {
        const ChannelValue& cv = channel_ref(t, ctx);
        if (is_array(cv)) return ArgValue{0.0, &std::get<std::vector<double>>(cv)};
        return ArgValue{std::get<double>(cv), nullptr};
    }
    return ArgValue{eval_scalar(t, ctx), nullptr};
}

double eval_scalar(const Term& t, const EvalCtx& ctx) {
    switch (t.kind) {
        case Term::Kind::Const:
            return t.value;
        case Term::Kind::Input:
        case Term::Kind::Output: {
            const ChannelValue& cv = channel_ref(t, ctx);
            if (is_array(cv))
                throw StepError(StepErrorKind::EvalError,
                                "array channel used where a scalar is required");
            return std::get<double>(cv);
        }
        case Term::Kind::Clock:
            // Def.-2 semantics: guards see the advanced valuation chi+1.
            return static_cast<double>((*ctx.clocks)[t.index] + 1);
        case Term::Kind::Call: {
            std::vector<ArgValue> args;
            args.reserve(t.args.size());
            for (const auto& a : t.args) args.push_back(eval_arg(a, ctx));
            const auto& entry = ctx.reg->entry(t.index);
            return entry.fn(args, entry.env.get());
        }
    }
    throw StepError(StepErrorKind::EvalError, "malformed term");
}

bool eval_atom(const Atom& a, const EvalCtx& ctx) {
    const double lhs = eval_scalar(a.lhs, ctx);
    const double rhs = eval_scalar(a.rhs, ctx);
    switch (a.op) {
        case dsl::CmpOp::Lt: return lhs < rhs;
        case dsl::CmpOp::Le: return lhs <= rhs;
        case dsl::CmpOp::Eq: return lhs == rhs;
        case dsl::CmpOp::Ge: return lhs >= rhs;
        case dsl::CmpOp::Gt: return lhs > rhs;
        case dsl::CmpOp::Ne: return lhs != rhs;
    }
    return false;
}

// Evaluation order G^I, G^X, G^O with short-circuiting; the input phase
// passes no output valuation and only ever sees the first two classes.
bool transition_enabled(const Transition& t, const EvalCtx& ctx, bool input_phase) {
    for (const auto& a : t.input_atoms)
        if (!eval_atom(a, ctx)) return false;
    for (const auto& a : t.clock_atoms)
        if (!eval_atom(a, ctx)) return false;
    if (!input_phase)
        for (const auto& a : t.output_atoms)
            if (!eval_atom(a, ctx)) return false;
    return true;
}

void apply_transition(const Vdta& v, const Transition& t, VdtaState& state) {
    state.location = t.to;
    for (auto& c : state.clocks)
        if (c != UINT64_MAX) ++c;  // saturating tick
    for (uint32_t r : t.resets) state.clocks[r] = 0;
    (void)v;
}

const Transition& find_unique_transition(const Vdta& v, const VdtaState& state,
                                         const IoEvent& event) {
    if (event.is_bottom())
        throw StepError(StepErrorKind::EvalError,
                        "step requires a complete output valuation; use step_suspended");
    EvalCtx ctx{&event.input, &*event.output, &state.clocks, v.builtins.get()};
    const Transition* found = nullptr;
    for (uint32_t idx : v.out_edges[state.location]) {
        const Transition& t = v.transitions[idx];
        if (!transition_enabled(t, ctx, false)) continue;
        if (found) {
            throw StepError(StepErrorKind::NonDeterministic,
                            "policy '" + v.name + "': two transitions enabled from '" +
                                v.locations[state.location] + "'");
        }
        found = &t;
    }
    if (!found) {
        throw StepError(StepErrorKind::Incomplete,
                        "policy '" + v.name + "': no transition enabled from '" +
                            v.locations[state.location] + "'");
    }
    return *found;
}

}  // namespace

StepResult step(const Vdta& vdta, const VdtaState& state, const IoEvent& event) {
    StepResult res{state, false};
    res.accepting = step_into(vdta, res.state, event);
    return res;
}

bool step_into(const Vdta& vdta, VdtaState& state, const IoEvent& event) {
    const Transition& t = find_unique_transition(vdta, state, event);
    apply_transition(vdta, t, state);
    return vdta.accepting[state.location];
}

VdtaState step_suspended(const Vdta& vdta, const VdtaState& state) {
    (void)vdta;
    return state;
}

namespace {

bool term_uses_output(const Term& t) {
    if (t.kind == Term::Kind::Output) return true;
    for (const auto& a : t.args)
        if (term_uses_output(a)) return true;
    return false;
}

}  // namespace

InputVdta project_input(const Vdta& vdta) {
    InputVdta iv{vdta};
    for (auto& t : iv.automaton.transitions) {
        t.output_atoms.clear();
        std::erase_if(t.clock_atoms, [](const Atom& a) { return term_uses_output(a.rhs); });
    }
    return iv;
}

StateSet step_input(const InputVdta& ivdta, const StateSet& states, const Valuation& input) {
    const Vdta& v = ivdta.automaton;
    StateSet out;
    for (const auto& s : states) {
        EvalCtx ctx{&input, nullptr, &s.clocks, v.builtins.get()};
        for (uint32_t idx : v.out_edges[s.location]) {
            const Transition& t = v.transitions[idx];
            if (!transition_enabled(t, ctx, true)) continue;
            VdtaState succ = s;
            apply_transition(v, t, succ);
            out.push_back(std::move(succ));
        }
    }
    std::sort(out.begin(), out.end(), [](const VdtaState& a, const VdtaState& b) {
        return a.location != b.location ? a.location < b.location : a.clocks < b.clocks;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

StateSet step_all(const Vdta& vdta, const StateSet& states, const IoEvent& event) {
    if (event.is_bottom())
        throw StepError(StepErrorKind::EvalError, "step_all requires a complete output");
    StateSet out;
    for (const auto& s : states) {
        EvalCtx ctx{&event.input, &*event.output, &s.clocks, vdta.builtins.get()};
        for (uint32_t idx : vdta.out_edges[s.location]) {
            const Transition& t = vdta.transitions[idx];
            if (!transition_enabled(t, ctx, false)) continue;
            VdtaState succ = s;
            apply_transition(vdta, t, succ);
            out.push_back(std::move(succ));
        }
    }
    std::sort(out.begin(), out.end(), [](const VdtaState& a, const VdtaState& b) {
        return a.location != b.location ? a.location < b.location : a.clocks < b.clocks;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<bool> trap_mask(const Vdta& vdta) {
    const size_t n = vdta.location_count();
    std::vector<std::vector<uint32_t>> rev(n);
    for (const auto& t : vdta.transitions) rev[t.to].push_back(t.from);

    std::vector<bool> reaches_accepting(n, false);
    std::deque<uint32_t> queue;
    for (uint32_t l = 0; l < n; ++l) {
        if (vdta.accepting[l]) {
            reaches_accepting[l] = true;
            queue.push_back(l);
        }
    }
    while (!queue.empty()) {
        uint32_t l = queue.front();
        queue.pop_front();
        for (uint32_t p : rev[l]) {
            if (!reaches_accepting[p]) {
                reaches_accepting[p] = true;
                queue.push_back(p);
            }
        }
    }
    std::vector<bool> traps(n);
    for (uint32_t l = 0; l < n; ++l) traps[l] = !reaches_accepting[l];
    return traps;
}

std::set<uint32_t> trap_locations(const Vdta& vdta) {
    std::set<uint32_t> out;
    auto mask = trap_mask(vdta);
    for (uint32_t l = 0; l < mask.size(); ++l)
        if (mask[l]) out.insert(l);
    return out;
}

bool can_avoid_trap(const InputVdta& ivdta, const StateSet& states, const Valuation& input,
                    const std::vector<bool>& traps) {
    const Vdta& v = ivdta.automaton;
    for (const auto& s : states) {
        EvalCtx ctx{&input, nullptr, &s.clocks, v.builtins.get()};
        for (uint32_t idx : v.out_edges[s.location]) {
            const Transition& t = v.transitions[idx];
            if (!traps[t.to] && transition_enabled(t, ctx, true)) return true;
        }
    }
    return false;
}

namespace {

bool terms_equal(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Term::Kind::Const: return a.value == b.value;
        case Term::Kind::Input:
        case Term::Kind::Output:
        case Term::Kind::Clock: return a.index == b.index;
        case Term::Kind::Call:
            if (a.index != b.index || a.args.size() != b.args.size()) return false;
            for (size_t i = 0; i < a.args.size(); ++i)
                if (!terms_equal(a.args[i], b.args[i])) return false;
            return true;
    }
    return false;
}

// Three-way outcome set of a comparison: which of {lt, eq, gt} satisfy it.
unsigned op_mask(dsl::CmpOp op) {
    switch (op) {
        case dsl::CmpOp::Lt: return 0b001;
        case dsl::CmpOp::Le: return 0b011;
        case dsl::CmpOp::Eq: return 0b010;
        case dsl::CmpOp::Ge: return 0b110;
        case dsl::CmpOp::Gt: return 0b100;
        case dsl::CmpOp::Ne: return 0b101;
    }
    return 0b111;
}

unsigned mirror_mask(unsigned m) {  // swap lt and gt
    return ((m & 0b001) << 2) | (m & 0b010) | ((m & 0b100) >> 2);
}

// Disjointness of {x : x op1 c1} and {x : x op2 c2} over the reals.
bool const_regions_disjoint(dsl::CmpOp op1, double c1, dsl::CmpOp op2, double c2) {
    if (op1 == dsl::CmpOp::Ne || op2 == dsl::CmpOp::Ne) {
        // A punctured line only misses a single point.
        if (op1 == dsl::CmpOp::Ne && op2 == dsl::CmpOp::Eq) return c1 == c2;
        if (op2 == dsl::CmpOp::Ne && op1 == dsl::CmpOp::Eq) return c1 == c2;
        return false;
    }
    auto bounds = [](dsl::CmpOp op, double c, double& lo, bool& lo_open, double& hi,
                     bool& hi_open) {
        lo = -std::numeric_limits<double>::infinity();
        hi = std::numeric_limits<double>::infinity();
        lo_open = hi_open = false;
        switch (op) {
            case dsl::CmpOp::Lt: hi = c; hi_open = true; break;
            case dsl::CmpOp::Le: hi = c; break;
            case dsl::CmpOp::Eq: lo = hi = c; break;
            case dsl::CmpOp::Ge: lo = c; break;
            case dsl::CmpOp::Gt: lo = c; lo_open = true; break;
            default: break;
        }
    };
    double lo1, hi1, lo2, hi2;
    bool lo1o, hi1o, lo2o, hi2o;
    bounds(op1, c1, lo1, lo1o, hi1, hi1o);
    bounds(op2, c2, lo2, lo2o, hi2, hi2o);
    const double lo = std::max(lo1, lo2);
    const double hi = std::min(hi1, hi2);
    const bool lo_open = (lo == lo1 && lo1o) || (lo == lo2 && lo2o);
    const bool hi_open = (hi == hi1 && hi1o) || (hi == hi2 && hi2o);
    return lo > hi || (lo == hi && (lo_open || hi_open));
}

bool provably_disjoint(const Transition& t1, const Transition& t2) {
    auto all_atoms = [](const Transition& t) {
        std::vector<const Atom*> v;
        for (const auto& a : t.input_atoms) v.push_back(&a);
        for (const auto& a : t.clock_atoms) v.push_back(&a);
        for (const auto& a : t.output_atoms) v.push_back(&a);
        return v;
    };
    // Normalized view: constant moved to the right when one side is a
    // constant, so threshold atoms over the same term compare by interval.
    struct Norm {
        const Term* term;
        dsl::CmpOp op;
        const Term* rhs;
        bool rhs_const;
        double c;
    };
    auto normalize = [](const Atom& a) -> Norm {
        if (a.lhs.kind == Term::Kind::Const && a.rhs.kind != Term::Kind::Const) {
            dsl::CmpOp mirrored = a.op;
            switch (a.op) {
                case dsl::CmpOp::Lt: mirrored = dsl::CmpOp::Gt; break;
                case dsl::CmpOp::Le: mirrored = dsl::CmpOp::Ge; break;
                case dsl::CmpOp::Gt: mirrored = dsl::CmpOp::Lt; break;
                case dsl::CmpOp::Ge: mirrored = dsl::CmpOp::Le; break;
                default: break;
            }
            return {&a.rhs, mirrored, &a.lhs, true, a.lhs.value};
        }
        return {&a.lhs, a.op, &a.rhs, a.rhs.kind == Term::Kind::Const, a.rhs.value};
    };

    for (const Atom* a1 : all_atoms(t1)) {
        for (const Atom* a2 : all_atoms(t2)) {
            const Norm n1 = normalize(*a1);
            const Norm n2 = normalize(*a2);
            if (terms_equal(*n1.term, *n2.term)) {
                if (n1.rhs_const && n2.rhs_const) {
                    if (const_regions_disjoint(n1.op, n1.c, n2.op, n2.c)) return true;
                    continue;
                }
                if (terms_equal(*n1.rhs, *n2.rhs) && (op_mask(n1.op) & op_mask(n2.op)) == 0)
                    return true;
                continue;
            }
            // Fully mirrored pair: a < b against b >= a.
            if (terms_equal(a1->lhs, a2->rhs) && terms_equal(a1->rhs, a2->lhs) &&
                (op_mask(a1->op) & mirror_mask(op_mask(a2->op))) == 0)
                return true;
        }
    }
    return false;
}

}  // namespace

std::vector<std::string> lint_determinism(const Vdta& vdta) {
    std::vector<std::string> warnings;
    for (uint32_t l = 0; l < vdta.location_count(); ++l) {
        const auto& edges = vdta.out_edges[l];
        for (size_t i = 0; i < edges.size(); ++i) {
            for (size_t j = i + 1; j < edges.size(); ++j) {
                if (!provably_disjoint(vdta.transitions[edges[i]], vdta.transitions[edges[j]])) {
                    std::ostringstream os;
                    os << "policy '" << vdta.name << "': transitions " << edges[i] << " and "
                       << edges[j] << " out of '" << vdta.locations[l]
                       << "' have no separating atom and may overlap";
                    warnings.push_back(os.str());
                }
            }
        }
    }
    return warnings;
}

namespace {

void print_term(std::ostream& os, const Vdta& v, const Term& t) {
    switch (t.kind) {
        case Term::Kind::Const: os << t.value; break;
        case Term::Kind::Input: os << v.inputs[t.index].name; break;
        case Term::Kind::Output: os << v.outputs[t.index].name; break;
        case Term::Kind::Clock: os << v.clocks[t.index]; break;
        case Term::Kind::Call:
            os << v.builtins->entry(t.index).name << "(";
            for (size_t i = 0; i < t.args.size(); ++i) {
                if (i) os << ", ";
                print_term(os, v, t.args[i]);
            }
            os << ")";
            break;
    }
}

void print_atoms(std::ostream& os, const Vdta& v, const std::vector<Atom>& atoms, bool& first) {
    for (const auto& a : atoms) {
        if (!first) os << " and ";
        first = false;
        print_term(os, v, a.lhs);
        os << " " << dsl::cmp_op_text(a.op) << " ";
        print_term(os, v, a.rhs);
    }
}

}  // namespace

std::string to_dot(const Vdta& vdta) {
    std::ostringstream os;
    os << "digraph \"" << vdta.name << "\" {\n  rankdir=LR;\n";
    os << "  __start [shape=point];\n";
    for (uint32_t l = 0; l < vdta.location_count(); ++l) {
        os << "  " << vdta.locations[l] << " [shape="
           << (vdta.accepting[l] ? "doublecircle" : "circle") << "];\n";
    }
    os << "  __start -> " << vdta.locations[vdta.initial] << ";\n";
    for (const auto& t : vdta.transitions) {
        os << "  " << vdta.locations[t.from] << " -> " << vdta.locations[t.to] << " [label=\"";
        bool first = true;
        print_atoms(os, vdta, t.input_atoms, first);
        print_atoms(os, vdta, t.clock_atoms, first);
        print_atoms(os, vdta, t.output_atoms, first);
        if (first) os << "true";
        if (!t.resets.empty()) {
            os << " / ";
            for (size_t i = 0; i < t.resets.size(); ++i) {
                if (i) os << ",";
                os << vdta.clocks[t.resets[i]] << ":=0";
            }
        }
        os << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace ri::vdta
