// Lexer and recursive-descent parser for the .vdta policy format.
// The token stream is line-agnostic except that comments (# ...) run to
// end of line; sections may be laid out freely.

#include "ri/dsl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace ri::dsl {

const char* cmp_op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Eq: return "=";
        case CmpOp::Ge: return ">=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ne: return "!=";
    }
    return "?";
}

Rational Rational::from_decimal(const std::string& text) {
    bool neg = false;
    size_t i = 0;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        neg = text[i] == '-';
        ++i;
    }
    std::string digits;
    std::string frac;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) digits += text[i++];
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) frac += text[i++];
    }
    if (digits.empty() && frac.empty()) throw std::invalid_argument("empty numeric literal");
    if (i != text.size()) throw std::invalid_argument("trailing characters in numeric literal");
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (digits.size() + frac.size() > 15) throw std::invalid_argument("numeric literal too long");

    long long num = 0;
    for (char c : digits) num = num * 10 + (c - '0');
    long long den = 1;
    for (char c : frac) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    return Rational{neg ? -num : num, den};
}

std::string Rational::to_decimal() const {
    long long n = num;
    std::string sign;
    if (n < 0) {
        sign = "-";
        n = -n;
    }
    long long whole = n / den;
    long long frac = n % den;
    if (frac == 0) return sign + std::to_string(whole);
    std::string frac_digits = std::to_string(frac);
    size_t width = std::to_string(den).size() - 1;
    frac_digits.insert(0, width - frac_digits.size(), '0');
    return sign + std::to_string(whole) + "." + frac_digits;
}

const LocationDecl& PolicyAst::initial_location() const {
    for (const auto& l : locations)
        if (l.initial) return l;
    throw std::logic_error("policy has no initial location");
}

namespace {

enum class Tok {
    Ident, Number, LBrace, RBrace, LParen, RParen, Colon, Comma, Arrow,
    Lt, Le, Eq, Ge, Gt, Ne, Eof,
};

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws_and_comments();
        SourcePos pos{line_, col_};
        if (at_end()) return {Tok::Eof, "", pos};
        char c = peek();

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string ident;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                ident += advance();
            return {Tok::Ident, ident, pos};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(pos, false);

        switch (c) {
            case '{': advance(); return {Tok::LBrace, "{", pos};
            case '}': advance(); return {Tok::RBrace, "}", pos};
            case '(': advance(); return {Tok::LParen, "(", pos};
            case ')': advance(); return {Tok::RParen, ")", pos};
            case ':': advance(); return {Tok::Colon, ":", pos};
            case ',': advance(); return {Tok::Comma, ",", pos};
            case '<':
                advance();
                if (!at_end() && peek() == '=') { advance(); return {Tok::Le, "<=", pos}; }
                return {Tok::Lt, "<", pos};
            case '>':
                advance();
                if (!at_end() && peek() == '=') { advance(); return {Tok::Ge, ">=", pos}; }
                return {Tok::Gt, ">", pos};
            case '=':
                advance();
                if (!at_end() && peek() == '=') advance();  // == accepted as =
                return {Tok::Eq, "=", pos};
            case '!':
                advance();
                if (!at_end() && peek() == '=') { advance(); return {Tok::Ne, "!=", pos}; }
                throw ParseError(ParseErrorKind::LexError, pos, "expected '!='");
            case '-':
                advance();
                if (!at_end() && peek() == '>') { advance(); return {Tok::Arrow, "->", pos}; }
                if (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                    return lex_number(pos, true);
                throw ParseError(ParseErrorKind::LexError, pos, "stray '-'");
        }
        // UTF-8 arrow from the notation in docs is accepted as '->'.
        if (static_cast<unsigned char>(c) == 0xE2 && src_.size() - i_ >= 3 &&
            static_cast<unsigned char>(src_[i_ + 1]) == 0x86 &&
            static_cast<unsigned char>(src_[i_ + 2]) == 0x92) {
            advance(); advance(); advance();
            return {Tok::Arrow, "->", pos};
        }
        throw ParseError(ParseErrorKind::LexError, pos,
                         "unexpected character 0x" + to_hex(static_cast<unsigned char>(c)));
    }

private:
    static std::string to_hex(unsigned char c) {
        const char* d = "0123456789abcdef";
        return std::string{d[c >> 4], d[c & 0xf]};
    }

    Token lex_number(SourcePos pos, bool negative) {
        std::string text = negative ? "-" : "";
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.'))
            text += advance();
        try {
            Rational::from_decimal(text);
        } catch (const std::invalid_argument& e) {
            throw ParseError(ParseErrorKind::LexError, pos, e.what());
        }
        return {Tok::Number, text, pos};
    }

    void skip_ws_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    bool at_end() const { return i_ >= src_.size(); }
    char peek() const { return src_[i_]; }

    char advance() {
        char c = src_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    std::string_view src_;
    size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { shift(); }

    PolicyAst parse() {
        expect_keyword("policy");
        ast_.name = expect_ident("policy name");
        while (cur_.kind != Tok::Eof) {
            if (cur_.kind != Tok::Ident)
                fail("expected a section keyword");
            const std::string& kw = cur_.text;
            if (kw == "inputs") parse_channels(ast_.inputs);
            else if (kw == "outputs") parse_channels(ast_.outputs);
            else if (kw == "clocks") parse_clocks();
            else if (kw == "locations") parse_locations();
            else if (kw == "transition") parse_transition();
            else fail("unknown section '" + kw + "'");
        }
        validate();
        return std::move(ast_);
    }

private:
    [[noreturn]] void fail(const std::string& msg,
                           ParseErrorKind kind = ParseErrorKind::SyntaxError) const {
        throw ParseError(kind, cur_.pos, msg);
    }

    void shift() { cur_ = lexer_.next(); }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) fail(std::string("expected ") + what);
        shift();
    }

    void expect_keyword(const char* kw) {
        if (cur_.kind != Tok::Ident || cur_.text != kw)
            fail(std::string("expected '") + kw + "'");
        shift();
    }

    std::string expect_ident(const char* what) {
        if (cur_.kind != Tok::Ident) fail(std::string("expected ") + what);
        std::string s = cur_.text;
        shift();
        return s;
    }

    bool accept(Tok kind) {
        if (cur_.kind != kind) return false;
        shift();
        return true;
    }

    void parse_channels(std::vector<ChannelDecl>& out) {
        shift();  // section keyword
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            ChannelDecl decl;
            decl.name = expect_ident("channel name");
            expect(Tok::Colon, "':'");
            std::string kind = expect_ident("'scalar' or 'array'");
            if (kind == "scalar") decl.kind = ChannelKind::Scalar;
            else if (kind == "array") decl.kind = ChannelKind::Array;
            else fail("channel kind must be 'scalar' or 'array'");
            out.push_back(std::move(decl));
            accept(Tok::Comma);
        }
    }

    void parse_clocks() {
        shift();
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            ast_.clocks.push_back(expect_ident("clock name"));
            accept(Tok::Comma);
        }
    }

    void parse_locations() {
        shift();
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            LocationDecl loc;
            loc.name = expect_ident("location name");
            if (accept(Tok::Colon)) {
                while (cur_.kind == Tok::Ident &&
                       (cur_.text == "initial" || cur_.text == "accepting")) {
                    if (cur_.text == "initial") loc.initial = true;
                    else loc.accepting = true;
                    shift();
                }
            }
            ast_.locations.push_back(std::move(loc));
            accept(Tok::Comma);
        }
    }

    void parse_transition() {
        shift();
        TransitionAst t;
        t.from = expect_ident("source location");
        expect(Tok::Arrow, "'->'");
        t.to = expect_ident("target location");
        expect_keyword("when");
        t.guard = parse_guard();
        if (cur_.kind == Tok::Ident && cur_.text == "reset") {
            shift();
            expect(Tok::LBrace, "'{'");
            while (!accept(Tok::RBrace)) {
                t.resets.push_back(expect_ident("clock name"));
                accept(Tok::Comma);
            }
        }
        ast_.transitions.push_back(std::move(t));
    }

    GuardExpr parse_guard() {
        GuardExpr g;
        if (cur_.kind == Tok::Ident && cur_.text == "true") {
            shift();
            return g;
        }
        g.atoms.push_back(parse_comparison());
        while (cur_.kind == Tok::Ident && cur_.text == "and") {
            shift();
            g.atoms.push_back(parse_comparison());
        }
        return g;
    }

    Comparison parse_comparison() {
        Comparison c;
        c.lhs = parse_term();
        switch (cur_.kind) {
            case Tok::Lt: c.op = CmpOp::Lt; break;
            case Tok::Le: c.op = CmpOp::Le; break;
            case Tok::Eq: c.op = CmpOp::Eq; break;
            case Tok::Ge: c.op = CmpOp::Ge; break;
            case Tok::Gt: c.op = CmpOp::Gt; break;
            case Tok::Ne: c.op = CmpOp::Ne; break;
            default: fail("expected a comparison operator");
        }
        shift();
        c.rhs = parse_term();
        return c;
    }

    Term parse_term() {
        if (cur_.kind == Tok::Number) {
            Rational r = Rational::from_decimal(cur_.text);
            shift();
            return Term::constant(r);
        }
        if (cur_.kind != Tok::Ident) fail("expected a term");
        std::string name = cur_.text;
        SourcePos pos = cur_.pos;
        shift();
        if (accept(Tok::LParen)) {
            std::vector<Term> args;
            if (cur_.kind != Tok::RParen) {
                args.push_back(parse_term());
                while (accept(Tok::Comma)) args.push_back(parse_term());
            }
            expect(Tok::RParen, "')'");
            return Term::call(std::move(name), std::move(args));
        }
        // Bare identifier: resolved against declarations.
        if (is_clock(name)) return Term::clock(std::move(name));
        if (is_channel(name)) return Term::channel(std::move(name));
        throw ParseError(ParseErrorKind::UndeclaredIdentifier, pos,
                         "undeclared identifier '" + name + "'");
    }

    bool is_clock(const std::string& n) const {
        return std::find(ast_.clocks.begin(), ast_.clocks.end(), n) != ast_.clocks.end();
    }

    bool is_channel(const std::string& n) const {
        auto has = [&](const std::vector<ChannelDecl>& v) {
            return std::any_of(v.begin(), v.end(), [&](const ChannelDecl& d) { return d.name == n; });
        };
        return has(ast_.inputs) || has(ast_.outputs);
    }

    void validate() const {
        std::set<std::string> locs;
        int initial = 0;
        int accepting = 0;
        for (const auto& l : ast_.locations) {
            locs.insert(l.name);
            if (l.initial) ++initial;
            if (l.accepting) ++accepting;
        }
        if (initial > 1)
            throw ParseError(ParseErrorKind::MultipleInitialLocations, {},
                             "policy '" + ast_.name + "' has " + std::to_string(initial) +
                                 " initial locations");
        if (initial == 0)
            throw ParseError(ParseErrorKind::MissingInitialLocation, {},
                             "policy '" + ast_.name + "' has no initial location");
        if (accepting == 0)
            throw ParseError(ParseErrorKind::NoAcceptingLocation, {},
                             "policy '" + ast_.name + "' has no accepting location");
        for (const auto& t : ast_.transitions) {
            if (!locs.count(t.from))
                throw ParseError(ParseErrorKind::UndeclaredIdentifier, {},
                                 "undeclared location '" + t.from + "'");
            if (!locs.count(t.to))
                throw ParseError(ParseErrorKind::UndeclaredIdentifier, {},
                                 "undeclared location '" + t.to + "'");
            for (const auto& r : t.resets) {
                if (std::find(ast_.clocks.begin(), ast_.clocks.end(), r) == ast_.clocks.end())
                    throw ParseError(ParseErrorKind::UndeclaredIdentifier, {},
                                     "reset of undeclared clock '" + r + "'");
            }
        }
    }

    Lexer lexer_;
    Token cur_{Tok::Eof, "", {}};
    PolicyAst ast_;
};

void print_term(std::ostream& os, const Term& t) {
    switch (t.kind) {
        case Term::Kind::Const:
            os << t.value.to_decimal();
            break;
        case Term::Kind::ChannelRef:
        case Term::Kind::ClockRef:
            os << t.name;
            break;
        case Term::Kind::FnCall:
            os << t.name << "(";
            for (size_t i = 0; i < t.args.size(); ++i) {
                if (i) os << ", ";
                print_term(os, t.args[i]);
            }
            os << ")";
            break;
    }
}

}  // namespace

PolicyAst parse_policy(std::string_view source) { return Parser(source).parse(); }

std::string print_policy(const PolicyAst& ast) {
    std::ostringstream os;
    os << "policy " << ast.name << "\n\n";

    auto channels = [&](const char* section, const std::vector<ChannelDecl>& v) {
        os << section << " {";
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) os << ",";
            os << " " << v[i].name << ": "
               << (v[i].kind == ChannelKind::Array ? "array" : "scalar");
        }
        os << " }\n";
    };
    channels("inputs", ast.inputs);
    channels("outputs", ast.outputs);

    if (!ast.clocks.empty()) {
        os << "clocks {";
        for (size_t i = 0; i < ast.clocks.size(); ++i) {
            if (i) os << ",";
            os << " " << ast.clocks[i];
        }
        os << " }\n";
    }

    os << "\nlocations {\n";
    for (const auto& l : ast.locations) {
        os << "  " << l.name;
        if (l.initial || l.accepting) {
            os << ":";
            if (l.initial) os << " initial";
            if (l.accepting) os << " accepting";
        }
        os << "\n";
    }
    os << "}\n\n";

    for (const auto& t : ast.transitions) {
        os << "transition " << t.from << " -> " << t.to << " when ";
        if (t.guard.atoms.empty()) {
            os << "true";
        } else {
            for (size_t i = 0; i < t.guard.atoms.size(); ++i) {
                if (i) os << " and ";
                const auto& a = t.guard.atoms[i];
                print_term(os, a.lhs);
                os << " " << cmp_op_text(a.op) << " ";
                print_term(os, a.rhs);
            }
        }
        if (!t.resets.empty()) {
            os << " reset {";
            for (size_t i = 0; i < t.resets.size(); ++i) {
                if (i) os << ",";
                os << " " << t.resets[i];
            }
            os << " }";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace ri::dsl
