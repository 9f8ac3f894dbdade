#pragma once

#include <algorithm>
#include <deque>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qpmc/checker.hpp"
#include "qpmc/logic.hpp"
#include "qpmc/model.hpp"
#include "qpmc/pcp.hpp"
#include "qpmc/qpds.hpp"
#include "qpmc/qpds_io.hpp"
#include "qpmc/report.hpp"

namespace qpmc {

inline constexpr char kSigma[3] = {'A', 'B', kPad};

enum class PhaseMode { Unit, Seeded };

// Phase policy for emitted rules: all 2pi, or reproducible pseudo-random values in
// (0, 2pi]. Probabilities are phase-blind, so both must produce identical reports.
struct PhaseAssignment {
    PhaseMode mode = PhaseMode::Unit;
    std::uint64_t seed = 0;

    static PhaseAssignment unit() { return {}; }
    static PhaseAssignment seeded(std::uint64_t seed) { return {PhaseMode::Seeded, seed}; }
};

namespace detail {

class PhaseSource {
public:
    explicit PhaseSource(const PhaseAssignment& a) : mode_(a.mode), rng_(a.seed) {}

    double next() {
        if (mode_ == PhaseMode::Unit) return kTwoPi;
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        return kTwoPi * (1.0 - u);  // lands in (0, 2pi]
    }

private:
    PhaseMode mode_;
    std::mt19937_64 rng_;
};

inline std::string pair_symbol(char x, char y) {
    return std::string("p(") + x + "," + y + ")";
}
inline std::string x_symbol(char x, char y) {
    return std::string("X(") + x + "," + y + ")";
}

}  // namespace detail

enum class EncodingMode { Unbounded, Bounded };

struct GammaReport {
    std::size_t total = 0;
    std::size_t plumbing = 0;      // Z, Z', C, F, S, N and bound symbols
    std::size_t pair_symbols = 0;  // (x,y)
    std::size_t x_symbols = 0;     // X_(x,y)
    std::size_t g_symbols = 0;     // guess-chain symbols
};

struct EncodingArtifacts {
    PushdownSystem system;
    StateFormulaPtr formula;
    PathFormulaPtr phi_u;  // word-side path formula (phi1 / phi3)
    PathFormulaPtr phi_v;  // match-side path formula (phi2 / phi4)
    Rational t;
    EncodingMode mode = EncodingMode::Bounded;
    unsigned long step_bound = 0;    // until bound used in bounded mode
    unsigned long paper_bound = 0;   // the fixed 2nm bound, for comparison
    unsigned long horizon_hint = 0;  // checker horizon that makes everything exact
    GammaReport gamma;
    std::vector<std::string> warnings;
};

struct EncodeOptions {
    Rational t = Rational(1, 2);
};

/// The two measured path formulas: the word side tracks A-positions of the stored
/// u-word, the match side B-positions of the stored v-word. Big conjunctions and
/// disjunctions over the padded alphabet expand into binary And/Not (De Morgan).
inline std::pair<PathFormulaPtr, PathFormulaPtr> build_phi_pair(
    EncodingMode mode, std::optional<unsigned long> bound = std::nullopt) {
    using SF = StateFormula;
    auto neg_atom = [](const std::string& a) { return SF::negation(SF::make_atom(a)); };

    auto conj_side = [&](const std::string& guard, bool first_coord, char letter) {
        StateFormulaPtr f = neg_atom(guard);
        for (char z : kSigma) {
            const std::string name =
                first_coord ? detail::x_symbol(letter, z) : detail::x_symbol(z, letter);
            f = SF::conjunction(std::move(f), neg_atom(name));
        }
        return f;
    };
    auto disj_side = [&](bool first_coord, char letter) {
        StateFormulaPtr f;
        for (char z : kSigma) {
            const std::string name =
                first_coord ? detail::x_symbol(letter, z) : detail::x_symbol(z, letter);
            auto neg = neg_atom(name);
            f = f ? SF::conjunction(std::move(f), std::move(neg)) : std::move(neg);
        }
        return SF::negation(std::move(f));
    };

    const StateFormulaPtr lhs_u = conj_side("S", true, 'B');
    const StateFormulaPtr rhs_u = disj_side(true, 'A');
    const StateFormulaPtr lhs_v = conj_side("F", false, 'A');
    const StateFormulaPtr rhs_v = disj_side(false, 'B');

    if (mode == EncodingMode::Bounded) {
        if (!bound) throw input_error("bounded mode requires a step bound");
        return {PathFormula::bounded_until(lhs_u, rhs_u, *bound),
                PathFormula::bounded_until(lhs_v, rhs_v, *bound)};
    }
    return {PathFormula::until(lhs_u, rhs_u), PathFormula::until(lhs_v, rhs_v)};
}

namespace detail {

// Shared verification machinery: C -> N -> F|S -> pop, pair symbols reveal or pop,
// Z' resolves through one last X symbol.
inline void add_verify_rules(PushdownSystem& sys, PhaseSource& phases) {
    const SymbolId zp = sys.symbol_id("Zp");
    const SymbolId c = sys.symbol_id("C");
    const SymbolId f = sys.symbol_id("F");
    const SymbolId s = sys.symbol_id("S");
    const SymbolId n = sys.symbol_id("N");
    auto rule = [&](SymbolId lhs, std::vector<SymbolId> rhs, Rational mod2) {
        sys.rules.push_back(Rule{0, lhs, 0, std::move(rhs), Amplitude{mod2, phases.next()}});
    };

    rule(c, {n}, Rational(1));
    rule(n, {f}, Rational(1, 2));
    rule(n, {s}, Rational(1, 2));
    rule(f, {}, Rational(1));
    rule(s, {}, Rational(1));
    for (char x : kSigma) {
        for (char y : kSigma) {
            const SymbolId pair = sys.symbol_id(pair_symbol(x, y));
            const SymbolId xsym = sys.symbol_id(x_symbol(x, y));
            rule(pair, {xsym}, Rational(1, 2));
            rule(pair, {}, Rational(1, 2));
        }
    }
    rule(zp, {sys.symbol_id(x_symbol('A', 'B'))}, Rational(1, 2));
    rule(zp, {sys.symbol_id(x_symbol('B', 'A'))}, Rational(1, 2));
    for (char x : kSigma)
        for (char y : kSigma) rule(sys.symbol_id(x_symbol(x, y)), {}, Rational(1));
}

inline void add_pair_and_x_symbols(PushdownSystem& sys, GammaReport& gamma) {
    for (char x : kSigma) {
        for (char y : kSigma) {
            sys.add_symbol(pair_symbol(x, y));
            ++gamma.pair_symbols;
        }
    }
    for (char x : kSigma) {
        for (char y : kSigma) {
            sys.add_symbol(x_symbol(x, y));
            ++gamma.x_symbols;
        }
    }
}

inline StateFormulaPtr assemble_decision_formula(const Rational& t, const PathFormulaPtr& phi_u,
                                                 const PathFormulaPtr& phi_v,
                                                 std::optional<unsigned long> outer_bound) {
    using SF = StateFormula;
    auto inner = SF::conjunction(SF::prob(Cmp::Equal, t / 2, phi_u),
                                 SF::prob(Cmp::Equal, (1 - t) / 2, phi_v));
    auto probe = SF::prob(Cmp::Equal, Rational(1), PathFormula::next(std::move(inner)));
    auto target = SF::conjunction(SF::make_atom("C"), std::move(probe));
    auto path = outer_bound
                    ? PathFormula::bounded_until(SF::truth(), std::move(target), *outer_bound)
                    : PathFormula::until(SF::truth(), std::move(target));
    return SF::prob(Cmp::Greater, Rational(0), std::move(path));
}

inline void check_t(const Rational& t) {
    if (t <= 0 || t >= 1)
        throw input_error("t must lie strictly between 0 and 1, got " + rational_str(t));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unbounded encoding: guess arbitrarily many pairs, then verify. The decision
// formula uses a plain Until, so checking may only terminate via quiescence.
// ---------------------------------------------------------------------------

inline EncodingArtifacts encode_unbounded(const PaddedInstance& p,
                                          const PhaseAssignment& phases = {},
                                          const EncodeOptions& options = {}) {
    detail::check_t(options.t);
    const std::size_t n = p.base.size();
    const unsigned m = p.m;

    EncodingArtifacts art;
    art.mode = EncodingMode::Unbounded;
    art.t = options.t;
    detail::PhaseSource source(phases);
    PushdownSystem& sys = art.system;

    auto g_name = [](std::size_t i, unsigned j) {
        return "G" + std::to_string(i) + "_" + std::to_string(j);
    };

    for (const char* s : {"Z", "Zp", "C", "F", "S", "N"}) {
        sys.add_symbol(s);
        ++art.gamma.plumbing;
    }
    detail::add_pair_and_x_symbols(sys, art.gamma);
    for (std::size_t i = 1; i <= n; ++i) {
        for (unsigned j = 1; j <= m + 1; ++j) {
            sys.add_symbol(g_name(i, j));
            ++art.gamma.g_symbols;
        }
    }
    art.gamma.total = sys.symbols.size();

    auto rule = [&](SymbolId lhs, std::vector<SymbolId> rhs, Rational mod2) {
        sys.rules.push_back(Rule{0, lhs, 0, std::move(rhs), Amplitude{mod2, source.next()}});
    };

    const SymbolId z = sys.symbol_id("Z");
    const SymbolId zp = sys.symbol_id("Zp");
    const SymbolId c = sys.symbol_id("C");

    // guess: branch into a first pair, push its letters, then stop or chain on
    for (std::size_t i = 1; i <= n; ++i)
        rule(z, {sys.symbol_id(g_name(i, 1)), zp}, Rational(1, static_cast<long>(n)));
    for (std::size_t i = 1; i <= n; ++i) {
        const auto& [u, v] = p.padded[i - 1];
        for (unsigned j = 1; j <= m; ++j) {
            rule(sys.symbol_id(g_name(i, j)),
                 {sys.symbol_id(g_name(i, j + 1)),
                  sys.symbol_id(detail::pair_symbol(u[j - 1], v[j - 1]))},
                 Rational(1));
        }
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const SymbolId exit = sys.symbol_id(g_name(i, m + 1));
        rule(exit, {c}, Rational(1, static_cast<long>(n + 1)));
        for (std::size_t l = 1; l <= n; ++l)
            rule(exit, {sys.symbol_id(g_name(l, 1))}, Rational(1, static_cast<long>(n + 1)));
    }
    detail::add_verify_rules(sys, source);
    sys.start = Configuration{0, {z}};

    auto [phi_u, phi_v] = build_phi_pair(EncodingMode::Unbounded);
    art.phi_u = phi_u;
    art.phi_v = phi_v;
    art.formula = detail::assemble_decision_formula(art.t, phi_u, phi_v, std::nullopt);
    art.paper_bound = 2ul * n * m;
    art.step_bound = 0;
    // enough budget for one maximal-length guess round plus its verification
    art.horizon_hint = (1 + n * (m + 1)) + (2 * (n * m + 1) + 3);
    art.warnings.push_back(
        "unbounded encoding: the decision formula uses a plain Until; termination of "
        "checking is not guaranteed in general");
    return art;
}

// ---------------------------------------------------------------------------
// Bounded encoding: guess a witness length k <= K first, then exactly k pairs.
// ---------------------------------------------------------------------------

inline EncodingArtifacts encode_bounded(const PaddedInstance& p, const PhaseAssignment& phases = {},
                                        const EncodeOptions& options = {}) {
    detail::check_t(options.t);
    if (!p.base.bound) throw input_error("bounded encoding requires an instance bound K");
    const std::size_t n = p.base.size();
    const unsigned m = p.m;
    const unsigned K = *p.base.bound;
    if (K < 1 || K > n)
        throw input_error("bound K = " + std::to_string(K) + " outside [1, n] with n = " +
                          std::to_string(n));

    EncodingArtifacts art;
    art.mode = EncodingMode::Bounded;
    art.t = options.t;
    detail::PhaseSource source(phases);
    PushdownSystem& sys = art.system;

    auto g_name = [](std::size_t l, unsigned k, unsigned j) {
        return "G" + std::to_string(l) + "_" + std::to_string(k) + "_" + std::to_string(j);
    };

    sys.add_symbol("Z");
    ++art.gamma.plumbing;
    for (unsigned k = 1; k <= K; ++k) {
        sys.add_symbol(std::to_string(k));
        ++art.gamma.plumbing;
    }
    sys.add_symbol("Zp");
    ++art.gamma.plumbing;
    for (std::size_t l = 1; l <= n; ++l)
        for (unsigned k = 1; k <= K; ++k)
            for (unsigned j = 1; j <= m + 1; ++j) {
                sys.add_symbol(g_name(l, k, j));
                ++art.gamma.g_symbols;
            }
    detail::add_pair_and_x_symbols(sys, art.gamma);
    for (const char* s : {"C", "F", "S", "N"}) {
        sys.add_symbol(s);
        ++art.gamma.plumbing;
    }
    art.gamma.total = sys.symbols.size();

    auto rule = [&](SymbolId lhs, std::vector<SymbolId> rhs, Rational mod2) {
        sys.rules.push_back(Rule{0, lhs, 0, std::move(rhs), Amplitude{mod2, source.next()}});
    };

    const SymbolId z = sys.symbol_id("Z");
    const SymbolId zp = sys.symbol_id("Zp");
    const SymbolId c = sys.symbol_id("C");

    // guess a length k, then pair indices countdown k, k-1, ..., 1
    for (unsigned k = 1; k <= K; ++k)
        rule(z, {sys.symbol_id(std::to_string(k)), zp}, Rational(1, static_cast<long>(K)));
    for (unsigned k = 1; k <= K; ++k)
        for (std::size_t l = 1; l <= n; ++l)
            rule(sys.symbol_id(std::to_string(k)), {sys.symbol_id(g_name(l, k, 1))},
                 Rational(1, static_cast<long>(n)));
    for (unsigned k = 1; k <= K; ++k) {
        for (std::size_t l = 1; l <= n; ++l) {
            const auto& [u, v] = p.padded[l - 1];
            for (unsigned j = 1; j <= m; ++j) {
                rule(sys.symbol_id(g_name(l, k, j)),
                     {sys.symbol_id(g_name(l, k, j + 1)),
                      sys.symbol_id(detail::pair_symbol(u[j - 1], v[j - 1]))},
                     Rational(1));
            }
            const SymbolId exit = sys.symbol_id(g_name(l, k, m + 1));
            if (k >= 2) {
                for (std::size_t l2 = 1; l2 <= n; ++l2)
                    rule(exit, {sys.symbol_id(g_name(l2, k - 1, 1))},
                         Rational(1, static_cast<long>(n)));
            } else {
                rule(exit, {c}, Rational(1));
            }
        }
    }
    detail::add_verify_rules(sys, source);
    sys.start = Configuration{0, {z}};

    // Step bound: the paper's fixed 2nm can under-provision small instances, so the
    // encoder measures the depths this instance actually needs and takes the max.
    //   guess: 2 lead steps plus m+1 per stored pair
    //   verify: from an F/S branch, one pop, one step per stored symbol, one extra per
    //           pad that resolves through its X symbol, and the final Z' step
    unsigned pad_max = 0;
    for (const auto& [u, v] : p.padded) {
        const auto pads = [](const std::string& w) {
            return static_cast<unsigned>(std::count(w.begin(), w.end(), kPad));
        };
        pad_max = std::max({pad_max, pads(u), pads(v)});
    }
    const unsigned long guess_depth = static_cast<unsigned long>(K) * (m + 1) + 2;
    const unsigned long verify_depth =
        static_cast<unsigned long>(K) * m + static_cast<unsigned long>(K) * pad_max + 2;
    art.paper_bound = 2ul * n * m;
    art.step_bound = std::max({guess_depth, verify_depth, art.paper_bound});
    if (art.step_bound > art.paper_bound) {
        art.warnings.push_back("step bound " + std::to_string(art.step_bound) +
                               " exceeds the fixed 2nm = " + std::to_string(art.paper_bound) +
                               " (guess needs " + std::to_string(guess_depth) +
                               ", verification needs " + std::to_string(verify_depth) + ")");
    }

    auto [phi_u, phi_v] = build_phi_pair(EncodingMode::Bounded, art.step_bound);
    art.phi_u = phi_u;
    art.phi_v = phi_v;
    art.formula = detail::assemble_decision_formula(art.t, phi_u, phi_v, art.step_bound);
    const auto hint = required_horizon(*art.formula);
    art.horizon_hint = hint ? *hint : 0;
    return art;
}

inline EncodingArtifacts encode_instance(const PcpInstance& instance, EncodingMode mode,
                                         const PhaseAssignment& phases = {},
                                         const EncodeOptions& options = {}) {
    const PaddedInstance padded = pad_instance(instance);
    return mode == EncodingMode::Bounded ? encode_bounded(padded, phases, options)
                                         : encode_unbounded(padded, phases, options);
}

// ---------------------------------------------------------------------------
// Decision pipeline
// ---------------------------------------------------------------------------

enum class DecideMode { Sum, Literal };

/// One complete guess: the C-headed configuration and the exact probabilities of the
/// two measured path formulas from its F- and S-branches.
struct GuessResult {
    std::string stack;        // rendered C-configuration
    std::string u_word;       // trimmed u-projection of the stored pairs (top-down)
    std::string v_word;       // trimmed v-projection
    Rational p_u;             // P(phi_u from the F-branch)
    Rational p_v;             // P(phi_v from the S-branch)
    bool match = false;       // p_u + p_v == 1
};

struct DecisionReport {
    std::string instance_digest;
    DecideMode mode = DecideMode::Sum;
    Rational t;
    unsigned long step_bound = 0;
    unsigned long horizon = 0;
    Truth verdict = Truth::Unknown;
    bool inconclusive = false;
    std::vector<GuessResult> guesses;             // SUM mode
    std::optional<ProbInterval> literal_interval; // LITERAL mode
    std::optional<Witness> oracle_witness;
    bool oracle_ran = false;
    bool agree = false;
    unsigned jobs = 1;
    PhaseMode phase_mode = PhaseMode::Unit;
    std::uint64_t phase_seed = 0;
    double wall_ms = 0.0;
    std::vector<std::string> warnings;
};

struct DecideOptions {
    Rational t = Rational(1, 2);
    DecideMode mode = DecideMode::Sum;
    PhaseAssignment phases = {};
    unsigned jobs = 1;
    CheckOptions check;
};

namespace detail {

struct ProjectedStack {
    Configuration config;  // the C-headed configuration
    std::string u_proj;    // padded letters, top-down
    std::string v_proj;
};

/// All C-headed configurations reachable within `depth` steps, in BFS order.
inline std::vector<ProjectedStack> reachable_guesses(const PushdownSystem& sys,
                                                     unsigned long depth) {
    const SymbolId c_sym = sys.symbol_id("C");
    std::vector<ProjectedStack> out;
    std::deque<std::pair<Configuration, unsigned long>> queue{{sys.start, 0}};
    std::unordered_map<Configuration, bool, ConfigurationHash> seen;
    seen[sys.start] = true;

    while (!queue.empty()) {
        auto [cfg, d] = queue.front();
        queue.pop_front();
        if (!cfg.stack.empty() && cfg.stack.front() == c_sym) {
            ProjectedStack ps;
            ps.config = cfg;
            for (std::size_t i = 1; i + 1 < cfg.stack.size(); ++i) {
                const std::string& name = sys.symbols[cfg.stack[i]];
                // pair symbols look like p(x,y)
                if (name.size() == 6 && name.starts_with("p(")) {
                    ps.u_proj += name[2];
                    ps.v_proj += name[4];
                }
            }
            out.push_back(std::move(ps));
            continue;  // verification is measured separately, not unrolled here
        }
        if (d >= depth) continue;
        for (const auto& [succ, amp] : successors(sys, cfg)) {
            (void)amp;
            if (!seen.count(succ)) {
                seen[succ] = true;
                queue.emplace_back(succ, d + 1);
            }
        }
    }
    return out;
}

}  // namespace detail

/// Encodes a bounded instance, measures every reachable guess, and decides:
///   SUM     — some guess attains P(phi_u | F branch) + P(phi_v | S branch) = 1
///   LITERAL — the assembled decision formula holds at Z with the fixed t
/// and cross-checks the verdict against the exhaustive solver.
inline DecisionReport decide_pcp(const PcpInstance& instance, const DecideOptions& options = {}) {
    Stopwatch watch;
    detail::check_t(options.t);
    if (!instance.bound) throw input_error("decide requires a bounded instance (k: line)");

    DecisionReport report;
    report.instance_digest = content_digest(render_pcp(instance));
    report.mode = options.mode;
    report.t = options.t;
    report.jobs = std::max(1u, options.jobs);
    report.phase_mode = options.phases.mode;
    report.phase_seed = options.phases.seed;

    const PaddedInstance padded = pad_instance(instance);
    EncodeOptions encode_options;
    encode_options.t = options.t;
    const EncodingArtifacts art = encode_bounded(padded, options.phases, encode_options);
    report.step_bound = art.step_bound;
    report.warnings = art.warnings;

    if (options.mode == DecideMode::Sum) {
        report.horizon = art.step_bound;
        const auto guesses = detail::reachable_guesses(art.system, art.step_bound);
        const SymbolId f_sym = art.system.symbol_id("F");
        const SymbolId s_sym = art.system.symbol_id("S");

        auto measure = [&](const detail::ProjectedStack& ps) {
            GuessResult g;
            g.stack = art.system.render_configuration(ps.config);
            g.u_word = trim_pads(ps.u_proj);
            g.v_word = trim_pads(ps.v_proj);
            PushdownModel model(art.system);
            Checker checker(model, options.check);

            Configuration branch = ps.config;
            branch.stack[0] = f_sym;
            auto [iu, qu] = checker.prob_path(model.intern(branch), art.phi_u, art.step_bound);
            branch.stack[0] = s_sym;
            auto [iv, qv] = checker.prob_path(model.intern(branch), art.phi_v, art.step_bound);
            if (!iu.is_point() || !iv.is_point() || !qu || !qv)
                throw input_error("verification did not resolve within the step bound");
            g.p_u = iu.lo;
            g.p_v = iv.lo;
            g.match = g.p_u + g.p_v == 1;
            return g;
        };

        report.guesses.resize(guesses.size());
        if (report.jobs <= 1 || guesses.size() < 2) {
            for (std::size_t i = 0; i < guesses.size(); ++i)
                report.guesses[i] = measure(guesses[i]);
        } else {
            const std::size_t chunk =
                (guesses.size() + report.jobs - 1) / report.jobs;
            std::vector<std::future<void>> futures;
            for (unsigned w = 0; w < report.jobs; ++w) {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(guesses.size(), lo + chunk);
                if (lo >= hi) break;
                futures.push_back(std::async(std::launch::async, [&, lo, hi] {
                    for (std::size_t i = lo; i < hi; ++i)
                        report.guesses[i] = measure(guesses[i]);
                }));
            }
            for (auto& f : futures) f.get();
        }

        bool any = false;
        for (const auto& g : report.guesses) any = any || g.match;
        report.verdict = any ? Truth::Holds : Truth::Fails;
    } else {
        report.horizon = art.horizon_hint;
        PushdownModel model(art.system);
        Checker checker(model, options.check);
        const Verdict v =
            checker.check_state(model.intern(art.system.start), art.formula, art.horizon_hint);
        report.verdict = v.truth;
        report.literal_interval = v.interval;
        report.inconclusive = v.truth == Truth::Unknown;
        report.warnings.push_back(
            "literal mode: the equality thresholds force t to match the witness encoding; "
            "a fixed t can miss solutions the sum criterion finds");
    }

    report.oracle_witness = solve_bounded(instance, *instance.bound, {.jobs = report.jobs});
    report.oracle_ran = true;
    report.agree = report.verdict != Truth::Unknown &&
                   (report.verdict == Truth::Holds) == report.oracle_witness.has_value();
    report.wall_ms = watch.elapsed_ms();
    return report;
}

// ---------------------------------------------------------------------------
// Per-instance property suite over the constructive facts the encodings rely on.
// ---------------------------------------------------------------------------

struct LemmaCheck {
    std::string name;
    bool pass = false;
    std::string details;
};

inline std::vector<LemmaCheck> run_lemma_suite(const PcpInstance& instance,
                                               const PhaseAssignment& phases = {}) {
    if (!instance.bound) throw input_error("lemma suite requires a bounded instance");
    std::vector<LemmaCheck> checks;
    const PaddedInstance padded = pad_instance(instance);
    const EncodingArtifacts art = encode_bounded(padded, phases);
    const unsigned K = *instance.bound;
    const std::size_t n = instance.size();

    // dyadic pairing: concatenated words match exactly when rho + rho_bar sums to 1
    {
        LemmaCheck check{"dyadic-pairing", true, ""};
        std::vector<unsigned> seq;
        std::size_t tested = 0;
        auto visit = [&](auto&& self, std::vector<unsigned>& s) -> void {
            if (!s.empty()) {
                std::string u, v;
                for (unsigned j : s) {
                    u += instance.pairs[j - 1].first;
                    v += instance.pairs[j - 1].second;
                }
                ++tested;
                const bool eq = u == v;
                const bool sum1 = rho(u + "Z") + rho_bar(v + "Z") == 1;
                if (eq != sum1) {
                    check.pass = false;
                    check.details = "witness " + Witness{s}.str() + " separates the criteria";
                }
            }
            if (s.size() >= K) return;
            for (unsigned j = 1; j <= n; ++j) {
                s.push_back(j);
                self(self, s);
                s.pop_back();
            }
        };
        visit(visit, seq);
        if (check.pass)
            check.details = "all " + std::to_string(tested) + " index sequences consistent";
        checks.push_back(std::move(check));
    }

    // phase invariance: re-encoding with different phases leaves every probability intact
    {
        LemmaCheck check{"phase-invariance", true, ""};
        const auto r1 = decide_pcp(instance, {.phases = PhaseAssignment::seeded(1)});
        const auto r2 = decide_pcp(instance, {.phases = PhaseAssignment::seeded(2)});
        const auto r3 = decide_pcp(instance, {.phases = PhaseAssignment::unit()});
        auto same = [](const DecisionReport& a, const DecisionReport& b) {
            if (a.verdict != b.verdict || a.guesses.size() != b.guesses.size()) return false;
            for (std::size_t i = 0; i < a.guesses.size(); ++i) {
                if (a.guesses[i].p_u != b.guesses[i].p_u) return false;
                if (a.guesses[i].p_v != b.guesses[i].p_v) return false;
            }
            return true;
        };
        check.pass = same(r1, r2) && same(r1, r3);
        check.details = check.pass ? "three phase assignments, identical probabilities"
                                   : "probabilities drifted across phase assignments";

        // and path amplitudes agree with their floating-point complex product
        PushdownModel model(art.system);
        StateId s = model.intern(art.system.start);
        Rational exact(1);
        std::complex<double> approx{1.0, 0.0};
        for (int step = 0; step < 6; ++step) {
            const auto row = model.transitions(s);
            if (row.empty()) break;
            exact *= row[0].amp.mod2;
            approx *= row[0].amp.approx();
            s = row[0].target;
        }
        if (std::abs(std::norm(approx) - rational_double(exact)) > 1e-9) {
            check.pass = false;
            check.details = "squared modulus diverged from the exact product";
        }
        checks.push_back(std::move(check));
    }

    // reachability: C-headed stacks within the bound are exactly the padded pair
    // sequences of length <= K
    {
        LemmaCheck check{"guess-reachability", true, ""};
        const auto found = detail::reachable_guesses(art.system, art.step_bound);
        std::vector<std::string> got;
        for (const auto& ps : found)
            got.push_back(art.system.render_configuration(ps.config));
        std::sort(got.begin(), got.end());

        // The machine stores the chronological choice sequence reversed: the last
        // chosen pair sits topmost, and within a pair the j = m symbol is on top.
        std::vector<std::string> expected;
        std::vector<unsigned> seq;
        auto visit = [&](auto&& self, std::vector<unsigned>& s) -> void {
            if (!s.empty() && s.size() <= K) {
                Configuration cfg{0, {art.system.symbol_id("C")}};
                for (auto it = s.rbegin(); it != s.rend(); ++it) {
                    const auto& [u, v] = padded.padded[*it - 1];
                    for (unsigned j = padded.m; j >= 1; --j)
                        cfg.stack.push_back(
                            art.system.symbol_id(detail::pair_symbol(u[j - 1], v[j - 1])));
                }
                cfg.stack.push_back(art.system.symbol_id("Zp"));
                expected.push_back(art.system.render_configuration(cfg));
            }
            if (s.size() >= K) return;
            for (unsigned j = 1; j <= n; ++j) {
                s.push_back(j);
                self(self, s);
                s.pop_back();
            }
        };
        visit(visit, seq);
        std::sort(expected.begin(), expected.end());
        expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
        got.erase(std::unique(got.begin(), got.end()), got.end());
        check.pass = got == expected;
        check.details = check.pass ? std::to_string(got.size()) + " guessable stacks match"
                                   : "guessable stacks differ from the enumerated family";
        checks.push_back(std::move(check));
    }

    // probability identity + sum criterion on every reachable guess
    {
        LemmaCheck identity{"verification-probabilities", true, ""};
        LemmaCheck sum_criterion{"sum-criterion", true, ""};
        LemmaCheck forced_t{"forced-threshold", true, ""};
        const auto report = decide_pcp(instance, {.phases = phases});
        for (const auto& g : report.guesses) {
            const Rational expect_u = rho(g.u_word + "Z");
            const Rational expect_v = rho_bar(g.v_word + "Z");
            if (g.p_u != expect_u || g.p_v != expect_v) {
                identity.pass = false;
                identity.details = "stack " + g.stack + ": engine " + rational_str(g.p_u) + "/" +
                                   rational_str(g.p_v) + " vs dyadic " + rational_str(expect_u) +
                                   "/" + rational_str(expect_v);
            }
            const bool words_equal = g.u_word == g.v_word;
            if (g.match != words_equal) {
                sum_criterion.pass = false;
                sum_criterion.details = "stack " + g.stack + ": sum " +
                                        rational_str(g.p_u + g.p_v) + " vs words '" + g.u_word +
                                        "' / '" + g.v_word + "'";
            }
        }
        if (identity.pass && !report.guesses.empty()) {
            const auto& g = report.guesses.front();
            identity.details = "all " + std::to_string(report.guesses.size()) +
                               " guesses exact; first: " + rational_str(g.p_u) + " + " +
                               rational_str(g.p_v) + " = " + rational_str(g.p_u + g.p_v);
        }
        if (sum_criterion.pass) {
            std::size_t matches = 0;
            for (const auto& g : report.guesses) matches += g.match;
            sum_criterion.details = std::to_string(matches) + " of " +
                                    std::to_string(report.guesses.size()) +
                                    " guesses attain sum 1";
        }

        // the literal formula with t forced to the measured value, at the N-branch;
        // one extra step of bound covers the hop from N into the F/S branch
        PushdownModel model(art.system);
        Checker checker(model, {});
        const SymbolId n_sym = art.system.symbol_id("N");
        const auto [phi_u_n, phi_v_n] =
            build_phi_pair(EncodingMode::Bounded, art.step_bound + 1);
        const auto guesses = detail::reachable_guesses(art.system, art.step_bound);
        for (std::size_t i = 0; i < guesses.size() && i < report.guesses.size(); ++i) {
            const auto& g = report.guesses[i];
            if (g.p_u <= 0 || g.p_u >= 1) continue;  // t must stay inside (0,1)
            const Rational t = g.p_u;
            auto inner = StateFormula::conjunction(
                StateFormula::prob(Cmp::Equal, t / 2, phi_u_n),
                StateFormula::prob(Cmp::Equal, (1 - t) / 2, phi_v_n));
            Configuration branch = guesses[i].config;
            branch.stack[0] = n_sym;
            const Verdict v =
                checker.check_state(model.intern(branch), inner, art.step_bound + 2);
            const bool words_equal = g.u_word == g.v_word;
            if ((v.truth == Truth::Holds) != words_equal) {
                forced_t.pass = false;
                forced_t.details = "stack " + g.stack + ": forced-t verdict " +
                                   truth_name(v.truth) + " vs words '" + g.u_word + "' / '" +
                                   g.v_word + "'";
            }
        }
        if (forced_t.pass) forced_t.details = "forced-t verdicts follow word equality";
        checks.push_back(std::move(identity));
        checks.push_back(std::move(sum_criterion));
        checks.push_back(std::move(forced_t));
    }

    // end-to-end agreement with the exhaustive solver
    {
        LemmaCheck check{"solver-agreement", true, ""};
        const auto report = decide_pcp(instance, {.phases = phases});
        check.pass = report.agree;
        check.details = std::string("decision ") + truth_name(report.verdict) + ", oracle " +
                        (report.oracle_witness ? "witness " + report.oracle_witness->str()
                                               : std::string("none"));
        checks.push_back(std::move(check));
    }

    return checks;
}

}  // namespace qpmc
