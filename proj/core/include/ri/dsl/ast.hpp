#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ri::dsl {

struct SourcePos {
    int line = 0;
    int column = 0;
};

enum class ParseErrorKind {
    LexError,
    SyntaxError,
    UndeclaredIdentifier,
    MultipleInitialLocations,
    MissingInitialLocation,
    NoAcceptingLocation,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind k, SourcePos p, const std::string& msg)
        : std::runtime_error(msg), kind(k), pos(p) {}

    ParseErrorKind kind;
    SourcePos pos;
};

// Exact decimal literal: den is always a power of ten with no trailing
// zeros in the fraction, so (num, den) equality is plain field equality
// and printing back to decimal text is lossless.
struct Rational {
    long long num = 0;
    long long den = 1;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;

    static Rational from_decimal(const std::string& text);  // throws std::invalid_argument
    std::string to_decimal() const;
};

enum class ChannelKind { Scalar, Array };

struct ChannelDecl {
    std::string name;
    ChannelKind kind = ChannelKind::Scalar;
    bool operator==(const ChannelDecl&) const = default;
};

enum class CmpOp { Lt, Le, Eq, Ge, Gt, Ne };

const char* cmp_op_text(CmpOp op);

struct Term {
    enum class Kind { Const, ChannelRef, ClockRef, FnCall };

    Kind kind = Kind::Const;
    Rational value;          // Const
    std::string name;        // ChannelRef / ClockRef / FnCall
    std::vector<Term> args;  // FnCall

    bool operator==(const Term&) const = default;

    static Term constant(Rational r) { return {Kind::Const, r, {}, {}}; }
    static Term channel(std::string n) { return {Kind::ChannelRef, {}, std::move(n), {}}; }
    static Term clock(std::string n) { return {Kind::ClockRef, {}, std::move(n), {}}; }
    static Term call(std::string fn, std::vector<Term> a) {
        return {Kind::FnCall, {}, std::move(fn), std::move(a)};
    }
};

struct Comparison {
    Term lhs;
    CmpOp op = CmpOp::Lt;
    Term rhs;

    bool operator==(const Comparison&) const = default;
};

// A guard is a conjunction of comparisons; empty means `true`.
struct GuardExpr {
    std::vector<Comparison> atoms;
    bool operator==(const GuardExpr&) const = default;
};

struct LocationDecl {
    std::string name;
    bool accepting = false;
    bool initial = false;
    bool operator==(const LocationDecl&) const = default;
};

struct TransitionAst {
    std::string from;
    std::string to;
    GuardExpr guard;
    std::vector<std::string> resets;
    bool operator==(const TransitionAst&) const = default;
};

struct PolicyAst {
    std::string name;
    std::vector<ChannelDecl> inputs;
    std::vector<ChannelDecl> outputs;
    std::vector<std::string> clocks;
    std::vector<LocationDecl> locations;
    std::vector<TransitionAst> transitions;

    bool operator==(const PolicyAst&) const = default;

    const LocationDecl& initial_location() const;
};

}  // namespace ri::dsl
