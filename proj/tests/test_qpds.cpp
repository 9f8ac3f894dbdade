#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "qpmc/qpds.hpp"
#include "qpmc/qpds_io.hpp"

using namespace qpmc;

namespace {

// The verification half of the standard construction over {A,B,*} pairs, stateless.
std::string verify_system_text() {
    std::string text =
        "qpds v1\n"
        "stack: Zp C F S N";
    const char* sigma = "AB*";
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            text += std::string(" p(") + sigma[x] + "," + sigma[y] + ")";
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            text += std::string(" X(") + sigma[x] + "," + sigma[y] + ")";
    text +=
        "\n"
        "start: C Zp\n"
        "rule: C -> N @ 1\n"
        "rule: N -> F @ 1/2\n"
        "rule: N -> S @ 1/2\n"
        "rule: F -> - @ 1\n"
        "rule: S -> - @ 1\n"
        "rule: Zp -> X(A,B) @ 1/2\n"
        "rule: Zp -> X(B,A) @ 1/2\n";
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) {
            const std::string pair = std::string("p(") + sigma[x] + "," + sigma[y] + ")";
            const std::string xs = std::string("X(") + sigma[x] + "," + sigma[y] + ")";
            text += "rule: " + pair + " -> " + xs + " @ 1/2\n";
            text += "rule: " + pair + " -> - @ 1/2\n";
            text += "rule: " + xs + " -> - @ 1\n";
        }
    }
    return text;
}

}  // namespace

TEST_CASE("verification rules alone form a valid system", "[qpds]") {
    const auto sys = parse_system(verify_system_text());
    const auto report = validate_system(sys, true);
    CHECK(report.ok());
    CHECK_FALSE(report.warnings.empty());  // the empty-label convention is flagged
}

TEST_CASE("a half-weight row fails validation with its sum", "[qpds]") {
    const auto sys = parse_system(
        "qpds v1\n"
        "stack: X\n"
        "start: X\n"
        "rule: X -> X @ 1/2\n");
    const auto report = validate_system(sys, true);
    REQUIRE_FALSE(report.ok());
    REQUIRE(report.count(IssueKind::Normalization) == 1);
    CHECK(report.issues[0].detail.find("1/2") != std::string::npos);
}

TEST_CASE("totality and strict rhs length are enforced", "[qpds]") {
    const auto sys = parse_system(
        "qpds v1\n"
        "stack: X Y\n"
        "start: X\n"
        "rule: X -> X Y Y @ 1\n");
    const auto report = validate_system(sys, true);
    CHECK(report.count(IssueKind::RhsLength) == 1);
    CHECK(report.count(IssueKind::Totality) == 1);  // Y heads no rule

    const auto lax = validate_system(sys, false);
    CHECK(lax.count(IssueKind::RhsLength) == 0);
}

TEST_CASE("successors follow rules in order and pop to the remainder", "[qpds]") {
    const auto sys = parse_system(verify_system_text());
    const auto c = sys.parse_configuration("N p(A,A) Zp");

    const auto succ = successors(sys, c);
    REQUIRE(succ.size() == 2);
    CHECK(sys.render_configuration(succ[0].first) == "F p(A,A) Zp");
    CHECK(sys.render_configuration(succ[1].first) == "S p(A,A) Zp");
    CHECK(succ[0].second.mod2 == Rational(1, 2));
    CHECK(succ[1].second.mod2 == Rational(1, 2));

    const auto after_c = successors(sys, sys.parse_configuration("C p(A,A) Zp"));
    REQUIRE(after_c.size() == 1);
    CHECK(sys.render_configuration(after_c[0].first) == "N p(A,A) Zp");
    CHECK(after_c[0].second.mod2 == 1);

    // pop rule: the remainder surfaces
    const auto popped = successors(sys, sys.parse_configuration("F p(A,A) Zp"));
    REQUIRE(popped.size() == 1);
    CHECK(sys.render_configuration(popped[0].first) == "p(A,A) Zp");
}

TEST_CASE("the empty configuration is an absorbing self-loop", "[qpds]") {
    const auto sys = parse_system(verify_system_text());
    const Configuration empty{};
    const auto succ = successors(sys, empty);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].first == empty);
    CHECK(succ[0].second.mod2 == 1);
}

TEST_CASE("successor weights always sum to 1", "[qpds]") {
    const auto sys = parse_system(verify_system_text());
    std::vector<Configuration> frontier{sys.start, sys.parse_configuration("N p(B,A) p(A,*) Zp"),
                                        Configuration{}};
    for (int depth = 0; depth < 5; ++depth) {
        std::vector<Configuration> next;
        for (const auto& c : frontier) {
            Rational sum(0);
            for (const auto& [succ, amp] : successors(sys, c)) {
                sum += amp.mod2;
                next.push_back(succ);
            }
            CHECK(sum == 1);
        }
        frontier = std::move(next);
    }
}

TEST_CASE("heads and identity labels", "[qpds]") {
    const auto sys = parse_system(verify_system_text());

    const auto c1 = sys.parse_configuration("C p(A,B) Zp");
    CHECK(sys.spell_head(head_of(c1)) == "C");
    CHECK(labels_of(sys, c1) == std::vector<std::string>{"C"});

    const auto f1 = sys.parse_configuration("F p(A,A) Zp");
    CHECK(labels_of(sys, f1) == std::vector<std::string>{"F"});

    const Configuration empty{};
    CHECK(head_of(empty).empty_stack());
    CHECK(labels_of(sys, empty) == std::vector<std::string>{"empty"});
}

TEST_CASE("explicit label sets override identity on covered heads", "[qpds]") {
    auto text = verify_system_text();
    text += "label: hot => C N\n";
    const auto sys = parse_system(text);

    CHECK(labels_of(sys, sys.parse_configuration("N Zp")) == std::vector<std::string>{"hot"});
    CHECK(labels_of(sys, sys.parse_configuration("C Zp")) == std::vector<std::string>{"hot"});
    // uncovered heads keep their identity labeling
    CHECK(labels_of(sys, sys.parse_configuration("F Zp")) == std::vector<std::string>{"F"});
}

TEST_CASE("control states participate in heads and labels", "[qpds]") {
    const auto sys = parse_system(
        "qpds v1\n"
        "states: q0 q1\n"
        "stack: Z\n"
        "start: q0 Z\n"
        "rule: q0 Z -> q1 Z @ 1\n"
        "rule: q1 Z -> q0 - @ 1\n");
    REQUIRE(validate_system(sys, true).ok());

    const auto c = sys.parse_configuration("q1 Z");
    const Head h = head_of(c);
    CHECK(h.control == 1);
    CHECK(h.symbol == 0);
    CHECK(sys.spell_head(h) == "q1.Z");
    CHECK(labels_of(sys, c) == std::vector<std::string>{"q1.Z"});

    const auto succ = successors(sys, sys.parse_configuration("q0 Z"));
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].first.control == 1);

    // empty stack in a stateful system: head is the bare control
    Configuration empty;
    empty.control = 1;
    const auto ls = labels_of(sys, empty);
    CHECK(std::find(ls.begin(), ls.end(), "q1") != ls.end());
    CHECK(std::find(ls.begin(), ls.end(), "empty") != ls.end());
}

TEST_CASE("system files round-trip through render and parse", "[qpds]") {
    const auto sys = parse_system(verify_system_text());
    const std::string rendered = render_system(sys);
    const auto again = parse_system(rendered);
    CHECK(render_system(again) == rendered);
    CHECK(again.symbols == sys.symbols);
    CHECK(again.rules.size() == sys.rules.size());
    for (std::size_t i = 0; i < sys.rules.size(); ++i) {
        CHECK(again.rules[i].lhs_symbol == sys.rules[i].lhs_symbol);
        CHECK(again.rules[i].rhs == sys.rules[i].rhs);
        CHECK(again.rules[i].amp.mod2 == sys.rules[i].amp.mod2);
        CHECK(again.rules[i].amp.phase == sys.rules[i].amp.phase);
    }
}

TEST_CASE("parse errors carry line positions", "[qpds]") {
    CHECK_THROWS_AS(parse_system("qpds v2\n"), parse_error);
    CHECK_THROWS_AS(parse_system("qpds v1\nstack: X\n"), parse_error);  // no start
    CHECK_THROWS_AS(parse_system("qpds v1\nstack: X\nstart: X\nrule: X -> Y @ 1\n"), parse_error);
    CHECK_THROWS_AS(parse_system("qpds v1\nstack: X\nstart: X\nrule: X -> X\n"), parse_error);
    try {
        parse_system("qpds v1\nstack: X\nstart: X\nrule: X -> X @ 1/2/3\n");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 4);
    }
}

TEST_CASE("rule order defines successor order but not the successor set", "[qpds]") {
    const auto base = parse_system(verify_system_text());
    auto shuffled = base;
    std::mt19937_64 rng(99);
    std::shuffle(shuffled.rules.begin(), shuffled.rules.end(), rng);

    const auto c = base.parse_configuration("N p(A,B) Zp");
    auto lhs = successors(base, c);
    auto rhs = successors(shuffled, c);
    REQUIRE(lhs.size() == rhs.size());
    auto key = [&](const std::pair<Configuration, Amplitude>& e) {
        return base.render_configuration(e.first) + "@" + rational_str(e.second.mod2);
    };
    std::vector<std::string> a, b;
    for (const auto& e : lhs) a.push_back(key(e));
    for (const auto& e : rhs) b.push_back(key(e));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}
