#include <catch_amalgamated.hpp>

#include <random>

#include "qpmc/pcp.hpp"

using namespace qpmc;

namespace {

const PcpInstance kE0{{{"A", "A"}}, 1};
const PcpInstance kE1{{{"A", "AA"}, {"AA", "A"}}, 2};
const PcpInstance kE2{{{"A", "B"}}, 1};

// Second, recursion-based enumerator used to cross-check the solver.
bool dfs_any_witness(const PcpInstance& inst, unsigned K, std::vector<unsigned>& seq) {
    if (!seq.empty() && verify_witness(inst, Witness{seq})) return true;
    if (seq.size() >= K) return false;
    for (unsigned j = 1; j <= inst.pairs.size(); ++j) {
        seq.push_back(j);
        if (dfs_any_witness(inst, K, seq)) return true;
        seq.pop_back();
    }
    return false;
}

bool any_witness(const PcpInstance& inst, unsigned K) {
    std::vector<unsigned> seq;
    return dfs_any_witness(inst, K, seq);
}

std::vector<std::string> words_up_to(int max_len) {
    std::vector<std::string> words{""};
    std::size_t start = 0;
    for (int len = 1; len <= max_len; ++len) {
        const std::size_t end = words.size();
        for (std::size_t i = start; i < end; ++i) {
            words.push_back(words[i] + "A");
            words.push_back(words[i] + "B");
        }
        start = end;
    }
    return words;
}

}  // namespace

TEST_CASE("padding appends pad symbols up to the common length", "[pcp]") {
    const auto p1 = pad_instance(kE1);
    CHECK(p1.m == 2);
    CHECK(p1.padded[0] == std::pair<std::string, std::string>{"A*", "AA"});
    CHECK(p1.padded[1] == std::pair<std::string, std::string>{"AA", "A*"});

    const auto p0 = pad_instance(kE0);
    CHECK(p0.m == 1);
    CHECK(p0.padded[0] == std::pair<std::string, std::string>{"A", "A"});

    const auto p2 = pad_instance(kE2);
    CHECK(p2.m == 1);
    CHECK(p2.padded[0] == std::pair<std::string, std::string>{"A", "B"});

    CHECK_THROWS_AS(pad_instance(PcpInstance{{{"", "A"}}, {}}), input_error);
}

TEST_CASE("trim erases pads, preserves order, and is idempotent", "[pcp]") {
    CHECK(trim_pads("A*B") == "AB");
    CHECK(trim_pads("**") == "");
    CHECK(trim_pads("AB") == "AB");
    CHECK(trim_pads(trim_pads("A**B*A")) == "ABA");
}

TEST_CASE("trim after pad restores every instance word", "[pcp]") {
    std::mt19937_64 rng(3);
    const auto words = words_up_to(4);
    for (int iter = 0; iter < 50; ++iter) {
        PcpInstance inst;
        const std::size_t n = 1 + rng() % 3;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& u = words[1 + rng() % (words.size() - 1)];
            const auto& v = words[1 + rng() % (words.size() - 1)];
            inst.pairs.emplace_back(u, v);
        }
        const auto padded = pad_instance(inst);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(trim_pads(padded.padded[i].first) == inst.pairs[i].first);
            CHECK(trim_pads(padded.padded[i].second) == inst.pairs[i].second);
        }
    }
}

TEST_CASE("theta tables match their definition", "[pcp]") {
    CHECK(theta('A') == 1);
    CHECK(theta_bar('A') == 0);
    CHECK(theta('B') == 0);
    CHECK(theta_bar('B') == 1);
    CHECK(theta('Z') == 1);
    CHECK(theta_bar('Z') == 1);
    CHECK_THROWS_AS(theta('C'), input_error);
}

TEST_CASE("rho values on known words", "[pcp]") {
    CHECK(rho("Z'") == Rational(1, 2));
    CHECK(rho_bar("Z'") == Rational(1, 2));
    CHECK(rho("ABZ'") == Rational(5, 8));
    CHECK(rho_bar("ABZ'") == Rational(3, 8));
    CHECK(rho("AAAZ'") == Rational(15, 16));
    CHECK(rho_bar("AAAZ'") == Rational(1, 16));
    CHECK(rho("AAAZ") == Rational(15, 16));  // bare-Z spelling of the terminal

    CHECK_THROWS_AS(rho("A*Z'"), input_error);
    CHECK_THROWS_AS(rho("AB"), input_error);
}

TEST_CASE("rho plus rho_bar telescopes to 1", "[pcp]") {
    for (const auto& w : words_up_to(10)) CHECK(rho(w + "Z") + rho_bar(w + "Z") == 1);
}

TEST_CASE("dyadic pairing separates words exactly", "[pcp]") {
    const auto words = words_up_to(6);
    for (const auto& w1 : words) {
        for (const auto& w2 : words) {
            const bool sum_is_one = rho(w1 + "Z") + rho_bar(w2 + "Z") == 1;
            CHECK(sum_is_one == (w1 == w2));
        }
    }
}

TEST_CASE("witness verification concatenates and compares", "[pcp]") {
    CHECK(verify_witness(kE1, Witness{{1, 2}}));
    CHECK_FALSE(verify_witness(kE1, Witness{{1}}));
    CHECK(verify_witness(kE0, Witness{{1}}));
    CHECK_THROWS_AS(verify_witness(kE1, Witness{{3}}), input_error);
    CHECK_THROWS_AS(verify_witness(kE1, Witness{{}}), input_error);
}

TEST_CASE("bounded solver finds the least witness or nothing", "[pcp]") {
    const auto w1 = solve_bounded(kE1, 2);
    REQUIRE(w1.has_value());
    CHECK(w1->indices == std::vector<unsigned>{1, 2});
    CHECK(verify_witness(kE1, *w1));

    CHECK_FALSE(solve_bounded(kE2, 1).has_value());

    const auto w0 = solve_bounded(kE0, 1);
    REQUIRE(w0.has_value());
    CHECK(w0->indices == std::vector<unsigned>{1});

    CHECK_THROWS_AS(solve_bounded(kE0, 0), input_error);
}

TEST_CASE("solver agrees with an independent recursive enumerator", "[pcp]") {
    std::mt19937_64 rng(17);
    const auto words = words_up_to(3);
    for (int iter = 0; iter < 120; ++iter) {
        PcpInstance inst;
        const std::size_t n = 1 + rng() % 3;
        for (std::size_t i = 0; i < n; ++i)
            inst.pairs.emplace_back(words[1 + rng() % (words.size() - 1)],
                                    words[1 + rng() % (words.size() - 1)]);
        const unsigned K = 1 + rng() % 3;
        const auto found = solve_bounded(inst, K);
        CHECK(found.has_value() == any_witness(inst, K));
        if (found) {
            CHECK(verify_witness(inst, *found));
            CHECK(found->indices.size() <= K);
        }
    }
}

TEST_CASE("parallel solving returns the same witness", "[pcp]") {
    std::mt19937_64 rng(23);
    const auto words = words_up_to(3);
    for (int iter = 0; iter < 40; ++iter) {
        PcpInstance inst;
        const std::size_t n = 2 + rng() % 2;
        for (std::size_t i = 0; i < n; ++i)
            inst.pairs.emplace_back(words[1 + rng() % (words.size() - 1)],
                                    words[1 + rng() % (words.size() - 1)]);
        const auto seq = solve_bounded(inst, 3, {.jobs = 1});
        const auto par = solve_bounded(inst, 3, {.jobs = 4});
        CHECK(seq.has_value() == par.has_value());
        if (seq && par) CHECK(*seq == *par);
    }
}

TEST_CASE("pcp files round-trip", "[pcp]") {
    const std::string text = "pcp v1\nalphabet: A B\npair: A AA\npair: AA A\nk: 2\n";
    const auto inst = parse_pcp(text);
    CHECK(inst.pairs == kE1.pairs);
    CHECK(inst.bound == 2u);
    CHECK(render_pcp(inst) == text);

    const auto unbounded = parse_pcp("pcp v1\nalphabet: A B\npair: A A\n");
    CHECK_FALSE(unbounded.bound.has_value());

    CHECK_THROWS_AS(parse_pcp("pcp v2\n"), parse_error);
    CHECK_THROWS_AS(parse_pcp("pcp v1\npair: A\n"), parse_error);
    CHECK_THROWS_AS(parse_pcp("pcp v1\npair: A C\n"), parse_error);
    CHECK_THROWS_AS(parse_pcp("pcp v1\n"), parse_error);
}
