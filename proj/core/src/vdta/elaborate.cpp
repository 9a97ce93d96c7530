#include <map>

#include "ri/vdta/engine.hpp"

namespace ri::vdta {

namespace {

struct SymbolTable {
    std::map<std::string, uint32_t> inputs;
    std::map<std::string, uint32_t> outputs;
    std::map<std::string, uint32_t> clocks;
    std::map<std::string, uint32_t> locations;
    const dsl::PolicyAst* ast = nullptr;
    const BuiltinRegistry* reg = nullptr;
};

bool uses_clock(const dsl::Term& t) {
    if (t.kind == dsl::Term::Kind::ClockRef) return true;
    for (const auto& a : t.args)
        if (uses_clock(a)) return true;
    return false;
}

bool uses_output(const dsl::Term& t, const SymbolTable& sym) {
    if (t.kind == dsl::Term::Kind::ChannelRef) return sym.outputs.count(t.name) > 0;
    for (const auto& a : t.args)
        if (uses_output(a, sym)) return true;
    return false;
}

Term lower_term(const dsl::Term& t, const SymbolTable& sym, bool call_arg) {
    Term out;
    switch (t.kind) {
        case dsl::Term::Kind::Const:
            out.kind = Term::Kind::Const;
            out.value = t.value.to_double();
            break;
        case dsl::Term::Kind::ChannelRef: {
            dsl::ChannelKind ck;
            if (auto it = sym.inputs.find(t.name); it != sym.inputs.end()) {
                out.kind = Term::Kind::Input;
                out.index = it->second;
                ck = sym.ast->inputs[it->second].kind;
            } else {
                auto jt = sym.outputs.find(t.name);
                out.kind = Term::Kind::Output;
                out.index = jt->second;
                ck = sym.ast->outputs[jt->second].kind;
            }
            if (ck == dsl::ChannelKind::Array && !call_arg)
                throw ElaborateError(ElaborateErrorKind::ArrayOutsideCall,
                                     "array channel '" + t.name +
                                         "' may only appear as a builtin argument");
            break;
        }
        case dsl::Term::Kind::ClockRef:
            out.kind = Term::Kind::Clock;
            out.index = sym.clocks.at(t.name);
            break;
        case dsl::Term::Kind::FnCall: {
            auto idx = sym.reg->find(t.name);
            if (!idx)
                throw ElaborateError(ElaborateErrorKind::UnknownBuiltin,
                                     "unknown builtin '" + t.name + "'");
            const auto& entry = sym.reg->entry(*idx);
            if (entry.arity >= 0 && entry.arity != static_cast<int>(t.args.size()))
                throw ElaborateError(ElaborateErrorKind::ArityMismatch,
                                     "builtin '" + t.name + "' expects " +
                                         std::to_string(entry.arity) + " arguments");
            out.kind = Term::Kind::Call;
            out.index = *idx;
            for (const auto& a : t.args) out.args.push_back(lower_term(a, sym, true));
            break;
        }
    }
    return out;
}

Atom lower_atom(const dsl::Comparison& c, const SymbolTable& sym) {
    Atom atom;
    const bool clocked = uses_clock(c.lhs) || uses_clock(c.rhs);
    if (clocked) {
        // Def.-style clock atoms: a bare clock on the left, a clock-free
        // term on the right.
        if (c.lhs.kind != dsl::Term::Kind::ClockRef || uses_clock(c.rhs))
            throw ElaborateError(ElaborateErrorKind::ClockAtomMalformed,
                                 "clock atoms must have the form <clock> <op> <term>");
        atom.cls = AtomClass::Clock;
    } else if (uses_output(c.lhs, sym) || uses_output(c.rhs, sym)) {
        atom.cls = AtomClass::Output;
    } else {
        atom.cls = AtomClass::Input;
    }
    atom.lhs = lower_term(c.lhs, sym, false);
    atom.op = c.op;
    atom.rhs = lower_term(c.rhs, sym, false);
    return atom;
}

}  // namespace

Vdta elaborate(const dsl::PolicyAst& ast, std::shared_ptr<const BuiltinRegistry> builtins) {
    Vdta v;
    v.name = ast.name;
    v.inputs = ast.inputs;
    v.outputs = ast.outputs;
    v.clocks = ast.clocks;
    v.builtins = std::move(builtins);

    SymbolTable sym;
    sym.ast = &ast;
    sym.reg = v.builtins.get();
    for (uint32_t i = 0; i < ast.inputs.size(); ++i) sym.inputs[ast.inputs[i].name] = i;
    for (uint32_t i = 0; i < ast.outputs.size(); ++i) sym.outputs[ast.outputs[i].name] = i;
    for (uint32_t i = 0; i < ast.clocks.size(); ++i) sym.clocks[ast.clocks[i]] = i;

    for (uint32_t i = 0; i < ast.locations.size(); ++i) {
        const auto& l = ast.locations[i];
        sym.locations[l.name] = i;
        v.locations.push_back(l.name);
        v.accepting.push_back(l.accepting);
        if (l.initial) v.initial = i;
    }

    v.out_edges.resize(v.locations.size());
    for (const auto& t : ast.transitions) {
        Transition tr;
        tr.from = sym.locations.at(t.from);
        tr.to = sym.locations.at(t.to);
        for (const auto& c : t.guard.atoms) {
            Atom a = lower_atom(c, sym);
            switch (a.cls) {
                case AtomClass::Input: tr.input_atoms.push_back(std::move(a)); break;
                case AtomClass::Clock: tr.clock_atoms.push_back(std::move(a)); break;
                case AtomClass::Output: tr.output_atoms.push_back(std::move(a)); break;
            }
        }
        for (const auto& r : t.resets) tr.resets.push_back(sym.clocks.at(r));
        v.out_edges[tr.from].push_back(static_cast<uint32_t>(v.transitions.size()));
        v.transitions.push_back(std::move(tr));
    }
    return v;
}

}  // namespace ri::vdta
