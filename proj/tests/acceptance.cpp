// Acceptance suite: one self-contained check per criterion, one pass/fail line each.
// Exit code = number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qpmc/checker.hpp"
#include "qpmc/reduction.hpp"

using namespace qpmc;

namespace {

std::vector<std::string> words_up_to(int max_len, bool include_empty) {
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
    if (!include_empty) words.erase(words.begin());
    return words;
}

// --------------------------------------------------------------------------
// 1. dyadic-pairing equivalence, exhaustive over words of length 1..6
// --------------------------------------------------------------------------
bool criterion_dyadic_pairing(std::string& details) {
    const auto words = words_up_to(6, false);
    std::size_t checked = 0, failures = 0;
    for (const auto& w1 : words) {
        const Rational r1 = rho(w1 + "Z");
        for (const auto& w2 : words) {
            ++checked;
            const bool sum_one = r1 + rho_bar(w2 + "Z") == 1;
            if (sum_one != (w1 == w2)) ++failures;
        }
    }
    std::ostringstream out;
    out << checked << " word pairs, " << failures << " failures";
    details = out.str();
    return failures == 0;
}

// --------------------------------------------------------------------------
// 2. phase invariance of full decision reports (50 seeds)
// --------------------------------------------------------------------------
std::string report_key(const DecisionReport& r) {
    std::string key = truth_name(r.verdict);
    for (const auto& g : r.guesses)
        key += "|" + g.stack + "@" + rational_str(g.p_u) + "/" + rational_str(g.p_v);
    key += r.oracle_witness ? "|w:" + r.oracle_witness->str() : "|w:none";
    return key;
}

bool criterion_phase_invariance(std::string& details) {
    const PcpInstance e1{{{"A", "AA"}, {"AA", "A"}}, 2};
    DecideOptions options;
    const std::string baseline = report_key(decide_pcp(e1, options));
    std::size_t mismatches = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        options.phases = PhaseAssignment::seeded(seed);
        if (report_key(decide_pcp(e1, options)) != baseline) ++mismatches;
    }
    std::ostringstream out;
    out << "50 seeded phase assignments, " << mismatches << " divergent reports";
    details = out.str();
    return mismatches == 0;
}

// --------------------------------------------------------------------------
// 3. verification-probability identity on 200 random stored stacks
// --------------------------------------------------------------------------
bool criterion_verification_identity(std::string& details) {
    std::mt19937_64 rng(60902);
    const auto words = words_up_to(3, false);
    std::size_t failures = 0;
    for (int iter = 0; iter < 200; ++iter) {
        PcpInstance inst;
        const std::size_t n = 1 + rng() % 3;
        for (std::size_t i = 0; i < n; ++i)
            inst.pairs.emplace_back(words[rng() % words.size()], words[rng() % words.size()]);
        inst.bound = static_cast<unsigned>(n);
        const PaddedInstance padded = pad_instance(inst);
        const EncodingArtifacts art = encode_bounded(padded);

        // arbitrary stored stack of k <= 3 padded pairs (reachability not required)
        const std::size_t k = 1 + rng() % 3;
        std::string u_proj, v_proj;
        Configuration stack{0, {}};
        stack.stack.push_back(art.system.symbol_id("F"));
        for (std::size_t i = 0; i < k; ++i) {
            const auto& [u, v] = padded.padded[rng() % n];
            for (unsigned j = 0; j < padded.m; ++j) {
                u_proj += u[j];
                v_proj += v[j];
                stack.stack.push_back(
                    art.system.symbol_id(std::string("p(") + u[j] + "," + v[j] + ")"));
            }
        }
        stack.stack.push_back(art.system.symbol_id("Zp"));

        const unsigned long bound = 2 + 3 * 3 + 3 * 3;  // covers k,m <= 3 with all pads
        const auto [phi_u, phi_v] = build_phi_pair(EncodingMode::Bounded, bound);

        PushdownModel model(art.system);
        Checker checker(model);
        auto [iu, qu] = checker.prob_path(model.intern(stack), phi_u, bound);
        stack.stack[0] = art.system.symbol_id("S");
        auto [iv, qv] = checker.prob_path(model.intern(stack), phi_v, bound);

        // the stack reads top-down, i.e. reversed relative to the concatenation order
        std::string u_word = trim_pads(u_proj), v_word = trim_pads(v_proj);
        std::reverse(u_word.begin(), u_word.end());
        std::reverse(v_word.begin(), v_word.end());
        if (!iu.is_point() || !iv.is_point() || !qu || !qv || iu.lo != rho(u_word + "Z") ||
            iv.lo != rho_bar(v_word + "Z"))
            ++failures;
    }
    std::ostringstream out;
    out << "200 stored stacks, " << failures << " mismatches";
    details = out.str();
    return failures == 0;
}

// --------------------------------------------------------------------------
// 4 + 5 + 8. the exhaustive desk-scale family: decide-vs-oracle agreement,
// strict encoder validity, and sequential-vs-parallel determinism
// --------------------------------------------------------------------------
std::vector<PcpInstance> exhaustive_family() {
    const auto words = words_up_to(2, false);  // A B AA AB BA BB
    std::vector<PcpInstance> family;
    for (const auto& u : words)
        for (const auto& v : words) family.push_back(PcpInstance{{{u, v}}, 1});
    for (const auto& u1 : words)
        for (const auto& v1 : words)
            for (const auto& u2 : words)
                for (const auto& v2 : words)
                    family.push_back(PcpInstance{{{u1, v1}, {u2, v2}}, 2});
    return family;
}

struct FamilyOutcome {
    std::size_t instances = 0;
    std::size_t disagreements = 0;
    std::size_t invalid_encodings = 0;
    std::vector<std::string> keys;
};

FamilyOutcome run_family(unsigned jobs) {
    FamilyOutcome outcome;
    const auto family = exhaustive_family();
    outcome.instances = family.size();
    outcome.keys.reserve(family.size());
    for (const auto& inst : family) {
        const auto art = encode_bounded(pad_instance(inst));
        if (!validate_system(art.system, true).ok()) ++outcome.invalid_encodings;
        DecideOptions options;
        options.jobs = jobs;
        const DecisionReport report = decide_pcp(inst, options);
        if (!report.agree) ++outcome.disagreements;
        outcome.keys.push_back(report_key(report));
    }
    return outcome;
}

FamilyOutcome g_sequential_outcome;  // shared between criteria 4/5 and 8

bool criterion_oracle_equivalence(std::string& details) {
    g_sequential_outcome = run_family(1);
    std::ostringstream out;
    out << g_sequential_outcome.instances << " instances, "
        << g_sequential_outcome.disagreements << " disagreements";
    details = out.str();
    return g_sequential_outcome.disagreements == 0;
}

bool criterion_encoder_validity(std::string& details) {
    std::ostringstream out;
    out << g_sequential_outcome.instances << " encodings, "
        << g_sequential_outcome.invalid_encodings << " strict-validation failures";
    details = out.str();
    return !g_sequential_outcome.keys.empty() && g_sequential_outcome.invalid_encodings == 0;
}

bool criterion_determinism(std::string& details) {
    const unsigned jobs = std::max(2u, std::thread::hardware_concurrency());
    const FamilyOutcome parallel = run_family(jobs);
    std::size_t divergent = 0;
    for (std::size_t i = 0; i < parallel.keys.size(); ++i)
        if (parallel.keys[i] != g_sequential_outcome.keys[i]) ++divergent;
    std::ostringstream out;
    out << parallel.keys.size() << " instances re-decided with " << jobs << " workers, "
        << divergent << " divergent reports";
    details = out.str();
    return divergent == 0 && parallel.keys.size() == g_sequential_outcome.keys.size();
}

// --------------------------------------------------------------------------
// 6. checker versus brute-force path enumeration on random finite chains
// --------------------------------------------------------------------------
struct ChainOracle {
    const FiniteQmc& chain;
    const std::vector<std::vector<std::string>>& labels;

    bool state_sat(std::size_t s, const StateFormula& f) const {
        switch (f.kind) {
            case StateFormula::Kind::True: return true;
            case StateFormula::Kind::Atom:
                return std::find(labels[s].begin(), labels[s].end(), f.atom) != labels[s].end();
            case StateFormula::Kind::Not: return !state_sat(s, *f.lhs);
            case StateFormula::Kind::And:
                return state_sat(s, *f.lhs) && state_sat(s, *f.rhs);
            case StateFormula::Kind::Prob: {
                const Rational p = path_prob(s, *f.path);
                return f.cmp == Cmp::Greater ? p > f.bound : p == f.bound;
            }
        }
        return false;
    }

    Rational path_prob(std::size_t s, const PathFormula& f) const {
        if (f.kind == PathFormula::Kind::Next) {
            Rational sum(0);
            for (const auto& [t, a] : chain.transitions[s])
                if (state_sat(t, *f.lhs)) sum += a.mod2;
            return sum;
        }
        return until_prob(s, f, f.steps, Rational(1));
    }

    Rational until_prob(std::size_t s, const PathFormula& f, unsigned long depth,
                        Rational weight) const {
        if (state_sat(s, *f.rhs)) return weight;
        if (!state_sat(s, *f.lhs)) return Rational(0);
        if (depth == 0) return Rational(0);
        Rational sum(0);
        for (const auto& [t, a] : chain.transitions[s])
            sum += until_prob(t, f, depth - 1, weight * a.mod2);
        return sum;
    }
};

bool criterion_finite_chain_agreement(std::string& details) {
    std::mt19937_64 rng(882);
    std::uniform_real_distribution<double> phase(1e-6, kTwoPi);
    static const char* pool[] = {"a", "b", "c"};
    static const Rational bounds[] = {Rational(0), Rational(1), Rational(1, 2), Rational(1, 4),
                                      Rational(3, 4)};

    std::function<StateFormulaPtr(int)> random_state = [&](int depth) -> StateFormulaPtr {
        if (depth <= 0 || rng() % 3 == 0) {
            if (rng() % 4 == 0) return StateFormula::truth();
            return StateFormula::make_atom(pool[rng() % 3]);
        }
        switch (rng() % 3) {
            case 0: return StateFormula::negation(random_state(depth - 1));
            case 1:
                return StateFormula::conjunction(random_state(depth - 1), random_state(depth - 1));
            default: {
                PathFormulaPtr path =
                    rng() % 2 ? PathFormula::next(random_state(depth - 1))
                              : PathFormula::bounded_until(random_state(depth - 1),
                                                           random_state(depth - 1), rng() % 5);
                return StateFormula::prob(rng() % 2 ? Cmp::Greater : Cmp::Equal,
                                          bounds[rng() % std::size(bounds)], std::move(path));
            }
        }
    };

    std::size_t failures = 0;
    for (int iter = 0; iter < 100; ++iter) {
        FiniteQmc chain;
        const std::size_t n = 2 + rng() % 4;  // up to 5 states
        for (std::size_t i = 0; i < n; ++i) chain.states.push_back("s" + std::to_string(i));
        chain.transitions.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t fanout = 1 + rng() % std::min<std::size_t>(n, 3);
            const long den = static_cast<long>(fanout) + static_cast<long>(rng() % 9);
            std::vector<long> parts(fanout, 1);
            long rest = den - static_cast<long>(fanout);
            for (std::size_t f = 0; f < fanout; ++f) {
                const long take =
                    (f + 1 == fanout) ? rest : static_cast<long>(rng() % (rest + 1));
                parts[f] += take;
                rest -= take;
            }
            std::vector<std::size_t> targets(n);
            for (std::size_t t = 0; t < n; ++t) targets[t] = t;
            std::shuffle(targets.begin(), targets.end(), rng);
            for (std::size_t f = 0; f < fanout; ++f)
                chain.transitions[i].push_back(
                    {targets[f], Amplitude{Rational(parts[f], den), phase(rng)}});
        }
        std::vector<std::vector<std::string>> labels(n);
        for (auto& ls : labels)
            for (const char* ap : pool)
                if (rng() % 2) ls.push_back(ap);

        PathFormulaPtr path = rng() % 2
                                  ? PathFormula::next(random_state(1))
                                  : PathFormula::bounded_until(random_state(1), random_state(1),
                                                               rng() % 5);
        const auto req = required_horizon(*path);
        if (!req) continue;

        FiniteChainModel model(chain, labels, {"a", "b", "c"});
        ChainOracle oracle{chain, labels};
        for (std::size_t s = 0; s < n; ++s) {
            auto [iv, quiescent] =
                prob_path(model, static_cast<StateId>(s), path, *req);
            if (!quiescent || !iv.is_point() || iv.lo != oracle.path_prob(s, *path)) ++failures;
        }
    }
    std::ostringstream out;
    out << "100 random chains, " << failures << " mismatches";
    details = out.str();
    return failures == 0;
}

// --------------------------------------------------------------------------
// 7. parser round-trip on 1000 random formulas
// --------------------------------------------------------------------------
bool criterion_parser_roundtrip(std::string& details) {
    std::mt19937_64 rng(777);
    static const char* atoms[] = {"a",      "C",      "F",      "S",     "hot",  "p(A,B)",
                                  "X(A,*)", "X(B,B)", "q0.Z",   "2",     "Zp",   "G1_2",
                                  "G2_1_3", "empty",  "target", "p(*,*)"};
    static const Rational bounds[] = {Rational(0),    Rational(1),    Rational(1, 2),
                                      Rational(1, 4), Rational(3, 4), Rational(1, 3)};

    std::function<StateFormulaPtr(int)> random_state = [&](int depth) -> StateFormulaPtr {
        if (depth <= 0 || rng() % 4 == 0) {
            if (rng() % 5 == 0) return StateFormula::truth();
            return StateFormula::make_atom(atoms[rng() % std::size(atoms)]);
        }
        switch (rng() % 3) {
            case 0: return StateFormula::negation(random_state(depth - 1));
            case 1:
                return StateFormula::conjunction(random_state(depth - 1), random_state(depth - 1));
            default: {
                PathFormulaPtr path;
                switch (rng() % 3) {
                    case 0: path = PathFormula::next(random_state(depth - 1)); break;
                    case 1:
                        path = PathFormula::until(random_state(depth - 1), random_state(depth - 1));
                        break;
                    default:
                        path = PathFormula::bounded_until(random_state(depth - 1),
                                                          random_state(depth - 1), rng() % 12);
                }
                return StateFormula::prob(rng() % 2 ? Cmp::Greater : Cmp::Equal,
                                          bounds[rng() % std::size(bounds)], std::move(path));
            }
        }
    };

    std::size_t failures = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        const StateFormulaPtr f = random_state(6);
        try {
            if (!formulas_equal(*f, *parse_formula(render_formula(*f)))) ++failures;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    std::ostringstream out;
    out << "1000 formulas, " << failures << " round-trip failures";
    details = out.str();
    return failures == 0;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        bool (*run)(std::string&);
    };
    const Criterion criteria[] = {
        {1, "dyadic-pairing equivalence (exhaustive, length <= 6)", criterion_dyadic_pairing},
        {2, "phase invariance of decision reports (50 seeds)", criterion_phase_invariance},
        {3, "verification-probability identity (200 random stacks)",
         criterion_verification_identity},
        {4, "decide-vs-oracle equivalence (exhaustive desk-scale family)",
         criterion_oracle_equivalence},
        {5, "strict encoder well-formedness over the family", criterion_encoder_validity},
        {6, "checker vs brute-force enumeration (100 random chains)",
         criterion_finite_chain_agreement},
        {7, "parser round-trip (1000 random formulas)", criterion_parser_roundtrip},
        {8, "sequential/parallel determinism over the family", criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string details;
        bool ok = false;
        try {
            ok = c.run(details);
        } catch (const std::exception& e) {
            details = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s — %s (%.2fs)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                    details.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
