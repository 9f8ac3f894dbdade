#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpmc/checker.hpp"
#include "qpmc/qpds_io.hpp"
#include "qpmc/reduction.hpp"
#include "qpmc/report.hpp"

// Command implementations behind the executable, kept callable for tests.
// Exit-code contract: 0 holds/found/pass, 1 fails/none/violations, 2 unknown,
// 3 input or parse error, 4 checker/oracle disagreement (a bug signal).

namespace qpmc::cli {

using nlohmann::json;

struct Result {
    int code = 0;
    json report;
    std::string human;
};

inline constexpr int kExitHolds = 0;
inline constexpr int kExitFails = 1;
inline constexpr int kExitUnknown = 2;
inline constexpr int kExitInputError = 3;
inline constexpr int kExitDisagreement = 4;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write '" + path + "'");
    out << content;
}

inline json rational_json(const Rational& r, bool approx) {
    if (!approx) return rational_str(r);
    json j;
    j["exact"] = rational_str(r);
    j["approx"] = rational_double(r);
    return j;
}

inline json interval_json(const ProbInterval& iv, bool approx) {
    json j;
    j["lo"] = rational_json(iv.lo, approx);
    j["hi"] = rational_json(iv.hi, approx);
    return j;
}

inline unsigned long max_horizon_from_env() {
    if (const char* v = std::getenv("QPMC_MAX_HORIZON")) {
        const long parsed = std::atol(v);
        if (parsed > 0) return static_cast<unsigned long>(parsed);
    }
    return 10000;
}

inline PhaseAssignment parse_phases(const std::string& mode, std::uint64_t seed) {
    if (mode == "unit") return PhaseAssignment::unit();
    if (mode == "random") return PhaseAssignment::seeded(seed);
    throw input_error("phase mode must be 'unit' or 'random', got '" + mode + "'");
}

inline Result error_result(const std::string& command, const std::exception& e) {
    Result r;
    r.code = kExitInputError;
    r.report = json{{"command", command}, {"error", e.what()}};
    r.human = std::string("error: ") + e.what() + "\n";
    return r;
}

}  // namespace detail

/// Strips fields that legitimately vary between identical runs (wall time); what is
/// left must be byte-for-byte reproducible for fixed inputs and seed.
inline json canonical_report(json report) {
    report.erase("timing_ms");
    return report;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

inline Result run_validate(const std::string& path, bool strict = true, double tol = 1e-9) {
    Stopwatch watch;
    Result result;
    json& rep = result.report;
    rep["command"] = "validate";
    try {
        const std::string text = detail::read_file(path);
        rep["inputs"] = json{{"system", content_digest(text)}};
        const PushdownSystem sys = parse_system(text);
        const SystemReport report = validate_system(sys, strict);

        json issues = json::array();
        for (const auto& issue : report.issues) {
            issues.push_back(json{{"kind",
                                   [&] {
                                       switch (issue.kind) {
                                           case IssueKind::Normalization: return "normalization";
                                           case IssueKind::Totality: return "totality";
                                           case IssueKind::RhsLength: return "rhs-length";
                                           case IssueKind::SymbolTable: return "symbol-table";
                                           case IssueKind::PhaseRange: return "phase-range";
                                           case IssueKind::Mod2Range: return "mod2-range";
                                       }
                                       return "unknown";
                                   }()},
                                  {"subject", issue.subject},
                                  {"detail", issue.detail}});
        }
        rep["issues"] = issues;
        rep["warnings"] = report.warnings;
        rep["strict"] = strict;

        // Orthogonality diagnostic over a sample of materialized rows (never gating:
        // the induced operator is infinite and unit-phase rows sharing one target are
        // legitimately non-orthogonal).
        {
            PushdownModel model(sys);
            std::vector<StateId> frontier{model.intern(sys.start)}, sampled;
            std::vector<bool> seen;
            for (int depth = 0; depth < 6 && sampled.size() < 24; ++depth) {
                std::vector<StateId> next;
                for (StateId s : frontier) {
                    if (s >= seen.size()) seen.resize(s + 1, false);
                    if (seen[s]) continue;
                    seen[s] = true;
                    sampled.push_back(s);
                    for (const Transition& t : model.transitions(s)) next.push_back(t.target);
                }
                frontier = std::move(next);
            }
            std::size_t pairs = 0, violations = 0;
            double worst = 0.0;
            json examples = json::array();
            for (std::size_t i = 0; i < sampled.size(); ++i) {
                for (std::size_t j = i + 1; j < sampled.size(); ++j) {
                    AmplitudeRow row_i, row_j;
                    for (const Transition& t : model.transitions(sampled[i]))
                        row_i.push_back({t.target, t.amp});
                    for (const Transition& t : model.transitions(sampled[j]))
                        row_j.push_back({t.target, t.amp});
                    ++pairs;
                    if (!check_orthogonality(row_i, row_j, tol)) {
                        ++violations;
                        if (examples.size() < 5) {
                            examples.push_back(json{
                                {"row_i", sys.render_configuration(model.config(sampled[i]))},
                                {"row_j", sys.render_configuration(model.config(sampled[j]))}});
                        }
                    }
                    (void)worst;
                }
            }
            rep["orthogonality"] = json{{"rows_sampled", sampled.size()},
                                        {"pairs_checked", pairs},
                                        {"non_orthogonal_pairs", violations},
                                        {"tolerance", tol},
                                        {"gating", false},
                                        {"examples", examples}};
        }

        result.code = report.ok() ? kExitHolds : kExitFails;
        rep["ok"] = report.ok();
        std::ostringstream human;
        human << (report.ok() ? "valid" : "INVALID") << ": " << path << " ("
              << report.issues.size() << " issues)\n";
        result.human = human.str();
    } catch (const parse_error& e) {
        return detail::error_result("validate", e);
    } catch (const input_error& e) {
        return detail::error_result("validate", e);
    }
    rep["timing_ms"] = watch.elapsed_ms();
    return result;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct CheckParams {
    std::string system_path;
    std::optional<std::string> formula_text;  // literal formula
    std::optional<std::string> formula_path;  // or a file holding one
    std::optional<std::string> config;        // start-configuration override
    std::optional<unsigned long> horizon;     // fixed horizon; absent = deepen
    bool approx = false;
};

inline Result run_check(const CheckParams& params) {
    Stopwatch watch;
    Result result;
    json& rep = result.report;
    rep["command"] = "check";
    try {
        const std::string system_text = detail::read_file(params.system_path);
        std::string formula_text;
        if (params.formula_path) {
            std::string raw = detail::read_file(*params.formula_path);
            for (std::size_t pos = 0; pos < raw.size();) {  // strip comment lines
                const std::size_t eol = raw.find('\n', pos);
                const std::size_t end = eol == std::string::npos ? raw.size() : eol;
                std::string_view line(raw.data() + pos, end - pos);
                if (const auto hash = line.find('#'); hash != std::string_view::npos)
                    line = line.substr(0, hash);
                formula_text.append(line);
                formula_text += ' ';
                pos = end + 1;
            }
        } else if (params.formula_text) {
            formula_text = *params.formula_text;
        } else {
            throw input_error("no formula given (positional or --formula-file)");
        }

        rep["inputs"] = json{{"system", content_digest(system_text)},
                             {"formula", content_digest(formula_text)}};

        const PushdownSystem sys = parse_system(system_text);
        const StateFormulaPtr formula = parse_formula(formula_text);
        PushdownModel model(sys);
        const Configuration start =
            params.config ? sys.parse_configuration(*params.config) : sys.start;
        rep["configuration"] = sys.render_configuration(start);

        CheckOptions options;
        options.max_horizon = detail::max_horizon_from_env();
        Checker checker(model, options);
        const StateId s0 = model.intern(start);

        Verdict verdict;
        if (params.horizon) {
            verdict = checker.check_state(s0, formula, *params.horizon);
        } else {
            verdict = checker.check_quiescent(s0, formula);
        }

        rep["verdict"] = truth_name(verdict.truth);
        rep["horizon"] = verdict.horizon;
        rep["quiescent"] = verdict.quiescent;
        if (verdict.interval) rep["interval"] = detail::interval_json(*verdict.interval, params.approx);
        const auto req = required_horizon(*formula);
        rep["required_horizon"] = req ? json(*req) : json("unbounded");

        switch (verdict.truth) {
            case Truth::Holds: result.code = kExitHolds; break;
            case Truth::Fails: result.code = kExitFails; break;
            case Truth::Unknown: result.code = kExitUnknown; break;
        }
        std::ostringstream human;
        human << truth_name(verdict.truth) << " at horizon " << verdict.horizon;
        if (verdict.interval)
            human << "  P in [" << rational_str(verdict.interval->lo) << ", "
                  << rational_str(verdict.interval->hi) << "]";
        human << "\n";
        result.human = human.str();
    } catch (const parse_error& e) {
        return detail::error_result("check", e);
    } catch (const input_error& e) {
        return detail::error_result("check", e);
    }
    rep["timing_ms"] = watch.elapsed_ms();
    return result;
}

// ---------------------------------------------------------------------------
// encode
// ---------------------------------------------------------------------------

struct EncodeParams {
    std::string pcp_path;
    std::string mode = "bounded";  // or "unbounded"
    std::string t = "1/2";
    std::string phases = "unit";  // or "random"
    std::uint64_t seed = 0;
    std::optional<std::string> system_out;
    std::optional<std::string> formula_out;
};

inline Result run_encode(const EncodeParams& params) {
    Stopwatch watch;
    Result result;
    json& rep = result.report;
    rep["command"] = "encode";
    try {
        const std::string text = detail::read_file(params.pcp_path);
        const PcpInstance instance = parse_pcp(text);
        rep["inputs"] = json{{"instance", content_digest(text)}};

        EncodingMode mode;
        if (params.mode == "bounded") mode = EncodingMode::Bounded;
        else if (params.mode == "unbounded") mode = EncodingMode::Unbounded;
        else throw input_error("mode must be 'bounded' or 'unbounded'");

        EncodeOptions options;
        options.t = parse_rational(params.t);
        const EncodingArtifacts art = encode_instance(
            instance, mode, detail::parse_phases(params.phases, params.seed), options);

        const std::string stem = params.pcp_path.substr(0, params.pcp_path.rfind('.'));
        const std::string system_path = params.system_out.value_or(stem + ".qpds");
        const std::string formula_path = params.formula_out.value_or(stem + ".pctl");
        detail::write_file(system_path, render_system(art.system));
        detail::write_file(formula_path, render_formula(*art.formula) + "\n");

        rep["system_file"] = system_path;
        rep["formula_file"] = formula_path;
        rep["mode"] = params.mode;
        rep["t"] = rational_str(art.t);
        rep["gamma"] = json{{"total", art.gamma.total},
                            {"plumbing", art.gamma.plumbing},
                            {"pair_symbols", art.gamma.pair_symbols},
                            {"x_symbols", art.gamma.x_symbols},
                            {"guess_symbols", art.gamma.g_symbols}};
        rep["rules"] = art.system.rules.size();
        rep["step_bound"] = art.step_bound;
        rep["paper_bound"] = art.paper_bound;
        rep["horizon_hint"] = art.horizon_hint;
        rep["warnings"] = art.warnings;
        result.code = kExitHolds;
        result.human = "wrote " + system_path + " and " + formula_path + "\n";
    } catch (const parse_error& e) {
        return detail::error_result("encode", e);
    } catch (const input_error& e) {
        return detail::error_result("encode", e);
    }
    rep["timing_ms"] = watch.elapsed_ms();
    return result;
}

// ---------------------------------------------------------------------------
// pcp solve / pcp decide
// ---------------------------------------------------------------------------

inline Result run_pcp_solve(const std::string& path, unsigned jobs = 1) {
    Stopwatch watch;
    Result result;
    json& rep = result.report;
    rep["command"] = "pcp-solve";
    try {
        const std::string text = detail::read_file(path);
        const PcpInstance instance = parse_pcp(text);
        rep["inputs"] = json{{"instance", content_digest(text)}};
        if (!instance.bound) throw input_error("solve requires a bounded instance (k: line)");
        const unsigned K = *instance.bound;
        json warnings = json::array();
        if (K > instance.size())
            warnings.push_back("K exceeds the pair count; nothing requires that, continuing");
        const auto witness = solve_bounded(instance, K, {.jobs = jobs});
        rep["bound"] = K;
        rep["witness"] = witness ? json(witness->str()) : json(nullptr);
        rep["warnings"] = warnings;
        result.code = witness ? kExitHolds : kExitFails;
        result.human = witness ? "witness " + witness->str() + "\n" : "no witness\n";
    } catch (const parse_error& e) {
        return detail::error_result("pcp-solve", e);
    } catch (const input_error& e) {
        return detail::error_result("pcp-solve", e);
    }
    rep["timing_ms"] = watch.elapsed_ms();
    return result;
}

struct DecideParams {
    std::string pcp_path;
    std::string t = "1/2";
    std::string phases = "unit";
    std::uint64_t seed = 0;
    std::string mode = "sum";  // or "literal"
    unsigned jobs = 1;
    bool approx = false;
};

inline json decision_report_json(const DecisionReport& report, bool approx) {
    json rep;
    rep["command"] = "pcp-decide";
    rep["instance"] = report.instance_digest;
    rep["mode"] = report.mode == DecideMode::Sum ? "sum" : "literal";
    rep["t"] = detail::rational_json(report.t, approx);
    rep["step_bound"] = report.step_bound;
    rep["horizon"] = report.horizon;
    rep["verdict"] = truth_name(report.verdict);
    rep["inconclusive"] = report.inconclusive;
    json guesses = json::array();
    for (const auto& g : report.guesses) {
        json e;
        e["stack"] = g.stack;
        e["u_word"] = g.u_word;
        e["v_word"] = g.v_word;
        e["p_u"] = detail::rational_json(g.p_u, approx);
        e["p_v"] = detail::rational_json(g.p_v, approx);
        e["sum"] = detail::rational_json(g.p_u + g.p_v, approx);
        e["match"] = g.match;
        guesses.push_back(std::move(e));
    }
    rep["guesses"] = guesses;
    if (report.literal_interval)
        rep["interval"] = detail::interval_json(*report.literal_interval, approx);
    rep["oracle_witness"] =
        report.oracle_witness ? json(report.oracle_witness->str()) : json(nullptr);
    rep["agreement"] = report.agree;
    rep["jobs"] = report.jobs;
    rep["phases"] = report.phase_mode == PhaseMode::Unit ? "unit" : "random";
    rep["seed"] = report.phase_seed;
    rep["warnings"] = report.warnings;
    rep["timing_ms"] = report.wall_ms;
    return rep;
}

inline Result run_pcp_decide(const DecideParams& params) {
    Result result;
    try {
        const std::string text = detail::read_file(params.pcp_path);
        const PcpInstance instance = parse_pcp(text);

        DecideOptions options;
        options.t = parse_rational(params.t);
        options.phases = detail::parse_phases(params.phases, params.seed);
        options.jobs = params.jobs;
        if (params.mode == "sum") options.mode = DecideMode::Sum;
        else if (params.mode == "literal") options.mode = DecideMode::Literal;
        else throw input_error("mode must be 'sum' or 'literal'");
        options.check.max_horizon = detail::max_horizon_from_env();

        const DecisionReport report = decide_pcp(instance, options);
        result.report = decision_report_json(report, params.approx);

        if (report.verdict == Truth::Unknown) result.code = kExitUnknown;
        else if (!report.agree) result.code = kExitDisagreement;
        else result.code = report.verdict == Truth::Holds ? kExitHolds : kExitFails;

        std::ostringstream human;
        human << truth_name(report.verdict) << " (" << result.report["mode"].get<std::string>()
              << " mode), oracle "
              << (report.oracle_witness ? "witness " + report.oracle_witness->str()
                                        : std::string("none"))
              << (report.agree ? ", agree" : ", DISAGREE") << "\n";
        result.human = human.str();
    } catch (const parse_error& e) {
        return detail::error_result("pcp-decide", e);
    } catch (const input_error& e) {
        return detail::error_result("pcp-decide", e);
    }
    return result;
}

// ---------------------------------------------------------------------------
// lemmas
// ---------------------------------------------------------------------------

inline Result run_lemmas(const std::string& path, const std::string& phases = "unit",
                         std::uint64_t seed = 0) {
    Stopwatch watch;
    Result result;
    json& rep = result.report;
    rep["command"] = "lemmas";
    try {
        const std::string text = detail::read_file(path);
        const PcpInstance instance = parse_pcp(text);
        rep["inputs"] = json{{"instance", content_digest(text)}};
        const auto checks = run_lemma_suite(instance, detail::parse_phases(phases, seed));
        json entries = json::array();
        bool all = true;
        std::ostringstream human;
        for (const auto& check : checks) {
            entries.push_back(
                json{{"name", check.name}, {"pass", check.pass}, {"details", check.details}});
            all = all && check.pass;
            human << (check.pass ? "pass" : "FAIL") << "  " << check.name << "  "
                  << check.details << "\n";
        }
        rep["checks"] = entries;
        rep["ok"] = all;
        result.code = all ? kExitHolds : kExitFails;
        result.human = human.str();
    } catch (const parse_error& e) {
        return detail::error_result("lemmas", e);
    } catch (const input_error& e) {
        return detail::error_result("lemmas", e);
    }
    rep["timing_ms"] = watch.elapsed_ms();
    return result;
}

}  // namespace qpmc::cli
