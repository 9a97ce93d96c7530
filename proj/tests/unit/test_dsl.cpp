#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "ri/dsl/parser.hpp"

using namespace ri::dsl;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kMinimalPolicy = R"(
policy minimal
inputs { s: scalar }
outputs { o: scalar }
locations { l0: initial accepting }
transition l0 -> l0 when true
)";

}  // namespace

TEST_CASE("normal-mode policy text parses to the expected shape") {
    auto ast = parse_policy(read_file(std::string(RI_SOURCE_DIR) + "/policies/normal.vdta"));
    CHECK(ast.name == "normal");
    CHECK(ast.locations.size() == 2);
    CHECK(ast.clocks.size() == 1);
    CHECK(ast.transitions.size() == 5);
    CHECK(ast.initial_location().name == "l_drive");
    CHECK(ast.initial_location().accepting);
    int accepting = 0;
    for (const auto& l : ast.locations) accepting += l.accepting ? 1 : 0;
    CHECK(accepting == 1);
}

TEST_CASE("minimal one-location self-loop policy") {
    auto ast = parse_policy(kMinimalPolicy);
    CHECK(ast.locations.size() == 1);
    CHECK(ast.transitions.size() == 1);
    CHECK(ast.transitions[0].guard.atoms.empty());
}

TEST_CASE("undeclared clock in a reset is rejected") {
    const char* text = R"(
policy broken
inputs { s: scalar }
outputs { o: scalar }
locations { l0: initial accepting }
transition l0 -> l0 when s > 1 reset { y }
)";
    try {
        parse_policy(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseErrorKind::UndeclaredIdentifier);
    }
}

TEST_CASE("undeclared identifier inside a guard is rejected with position") {
    const char* text = R"(
policy broken
inputs { s: scalar }
outputs { o: scalar }
locations { l0: initial accepting }
transition l0 -> l0 when q > 1
)";
    try {
        parse_policy(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseErrorKind::UndeclaredIdentifier);
        CHECK(e.pos.line == 6);
    }
}

TEST_CASE("initial and accepting location invariants") {
    const char* two_initial = R"(
policy p
inputs { s: scalar }
outputs { o: scalar }
locations { a: initial accepting, b: initial }
transition a -> a when true
)";
    try {
        parse_policy(two_initial);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseErrorKind::MultipleInitialLocations);
    }

    const char* no_accepting = R"(
policy p
inputs { s: scalar }
outputs { o: scalar }
locations { a: initial }
transition a -> a when true
)";
    try {
        parse_policy(no_accepting);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseErrorKind::NoAcceptingLocation);
    }
}

TEST_CASE("rationals keep exact decimal text") {
    CHECK(Rational::from_decimal("1.2") == Rational{12, 10});
    CHECK(Rational::from_decimal("1.20") == Rational{12, 10});
    CHECK(Rational::from_decimal("-0.50") == Rational{-5, 10});
    CHECK(Rational::from_decimal("6") == Rational{6, 1});
    CHECK(Rational{12, 10}.to_decimal() == "1.2");
    CHECK(Rational{-5, 10}.to_decimal() == "-0.5");
    CHECK(Rational{205, 100}.to_decimal() == "2.05");
    CHECK_THROWS_AS(Rational::from_decimal("1.2.3"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::from_decimal("12345678901234567890"), std::invalid_argument);
}

namespace {

// Random-but-valid policy generator for the round-trip property.
struct Gen {
    std::mt19937 rng;

    explicit Gen(uint32_t seed) : rng(seed) {}

    int pick(int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); }

    Term term(const PolicyAst& ast, int depth) {
        switch (pick(0, depth > 0 ? 3 : 2)) {
            case 0: {
                Rational r{pick(-999, 999), 1};
                const int scale = pick(0, 2);
                for (int i = 0; i < scale; ++i) r.den *= 10;
                // normalize trailing zeros like the parser does
                while (r.den > 1 && r.num % 10 == 0) {
                    r.num /= 10;
                    r.den /= 10;
                }
                return Term::constant(r);
            }
            case 1: {
                const auto& pool = rng() % 2 == 0 ? ast.inputs : ast.outputs;
                const auto& decl = pool[rng() % pool.size()];
                return Term::channel(decl.name);
            }
            case 2:
                if (!ast.clocks.empty()) return Term::clock(ast.clocks[rng() % ast.clocks.size()]);
                return Term::constant(Rational{1, 1});
            default: {
                const char* fns[] = {"min_front", "kin", "f0", "g1"};
                std::vector<Term> args;
                const int n = pick(1, 2);
                for (int i = 0; i < n; ++i) args.push_back(term(ast, depth - 1));
                return Term::call(fns[rng() % 4], std::move(args));
            }
        }
    }

    PolicyAst policy() {
        PolicyAst ast;
        ast.name = "gen" + std::to_string(rng() % 1000);
        const int ni = pick(1, 3);
        for (int i = 0; i < ni; ++i)
            ast.inputs.push_back({"in" + std::to_string(i),
                                  rng() % 3 == 0 ? ChannelKind::Array : ChannelKind::Scalar});
        const int no = pick(1, 2);
        for (int i = 0; i < no; ++i)
            ast.outputs.push_back({"out" + std::to_string(i), ChannelKind::Scalar});
        const int nc = pick(0, 2);
        for (int i = 0; i < nc; ++i) ast.clocks.push_back("x" + std::to_string(i));
        const int nl = pick(1, 4);
        for (int i = 0; i < nl; ++i)
            ast.locations.push_back({"l" + std::to_string(i), i == 0 || rng() % 2 == 0, i == 0});
        const int nt = pick(0, 8);
        for (int i = 0; i < nt; ++i) {
            TransitionAst t;
            t.from = ast.locations[rng() % nl].name;
            t.to = ast.locations[rng() % nl].name;
            const int na = pick(0, 3);
            for (int a = 0; a < na; ++a) {
                Comparison c;
                c.lhs = term(ast, 2);
                c.op = static_cast<CmpOp>(rng() % 6);
                c.rhs = term(ast, 2);
                t.guard.atoms.push_back(std::move(c));
            }
            if (nc > 0 && rng() % 2 == 0) t.resets.push_back(ast.clocks[rng() % nc]);
            ast.transitions.push_back(std::move(t));
        }
        return ast;
    }
};

}  // namespace

TEST_CASE("round-trip: print then parse is structurally identical") {
    Gen gen(0xc0ffee);
    for (int i = 0; i < 250; ++i) {
        PolicyAst ast = gen.policy();
        std::string text = print_policy(ast);
        PolicyAst reparsed;
        try {
            reparsed = parse_policy(text);
        } catch (const ParseError& e) {
            CAPTURE(text);
            FAIL("generated policy failed to reparse: " << e.what());
        }
        if (!(reparsed == ast)) {
            CAPTURE(text);
            CHECK(reparsed == ast);
        }
    }
}

TEST_CASE("parser survives arbitrary byte input") {
    std::mt19937 rng(1234);
    for (int i = 0; i < 600; ++i) {
        std::string garbage;
        const int len = static_cast<int>(rng() % 200);
        for (int j = 0; j < len; ++j) garbage += static_cast<char>(rng() % 256);
        try {
            (void)parse_policy(garbage);
        } catch (const ParseError&) {
        }
    }
    // Mutations of a valid policy.
    std::string base = print_policy(Gen(42).policy());
    for (int i = 0; i < 400; ++i) {
        std::string mutated = base;
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits && !mutated.empty(); ++e) {
            const size_t pos = rng() % mutated.size();
            switch (rng() % 3) {
                case 0: mutated[pos] = static_cast<char>(rng() % 256); break;
                case 1: mutated.erase(pos, 1); break;
                default: mutated.insert(pos, 1, static_cast<char>(rng() % 128));
            }
        }
        try {
            (void)parse_policy(mutated);
        } catch (const ParseError&) {
        }
    }
}

TEST_CASE("utf8 arrow and comments are accepted") {
    std::string text = "# leading comment\npolicy p\ninputs { s: scalar }\noutputs { o: scalar }\n"
                       "locations { a: initial accepting }\n"
                       "transition a \xE2\x86\x92 a when s > 1.5 # trailing\n";
    auto ast = parse_policy(text);
    CHECK(ast.transitions.size() == 1);
    CHECK(ast.transitions[0].to == "a");
}
