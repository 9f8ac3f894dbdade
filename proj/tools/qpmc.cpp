#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qpmc/cli.hpp"

namespace {

int emit(const qpmc::cli::Result& result) {
    std::cout << result.report.dump(2) << "\n";
    std::cerr << result.human;
    return result.code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qpmc - exact probabilistic model checking for quantum pushdown systems, with "
        "correspondence-problem encoders and an exhaustive oracle"};
    app.require_subcommand(1);

    // validate
    std::string validate_path;
    bool validate_lax = false;
    double validate_tol = 1e-9;
    auto* validate = app.add_subcommand("validate", "well-formedness checks on a system file");
    validate->add_option("system", validate_path, "qpds v1 system file")->required();
    validate->add_flag("--lax", validate_lax, "skip the |rhs| <= 2 rule-length check");
    validate->add_option("--tol", validate_tol, "orthogonality diagnostic tolerance");

    // check
    qpmc::cli::CheckParams check_params;
    std::string check_formula;
    std::string check_formula_file;
    std::string check_config;
    long check_horizon = -1;
    auto* check = app.add_subcommand("check", "evaluate a formula over a system");
    check->add_option("system", check_params.system_path, "qpds v1 system file")->required();
    check->add_option("formula", check_formula, "formula text");
    check->add_option("--formula-file", check_formula_file, "file holding the formula");
    check->add_option("--config", check_config, "start configuration, e.g. 'N p(A,A) Zp'");
    check->add_option("--horizon", check_horizon, "fixed exploration horizon (default: deepen)");
    check->add_flag("--approx", check_params.approx, "add decimal renderings to the report");

    // encode
    qpmc::cli::EncodeParams encode_params;
    auto* encode = app.add_subcommand("encode", "build the system + formula for an instance");
    encode->add_option("instance", encode_params.pcp_path, "pcp v1 instance file")->required();
    encode->add_option("--mode", encode_params.mode, "bounded (default) or unbounded");
    encode->add_option("--t", encode_params.t, "threshold constant in (0,1), default 1/2");
    encode->add_option("--phases", encode_params.phases, "unit (default) or random");
    encode->add_option("--seed", encode_params.seed, "seed for random phases");
    std::string encode_out, encode_formula_out;
    encode->add_option("-o,--out", encode_out, "system output path");
    encode->add_option("--formula-out", encode_formula_out, "formula output path");

    // pcp solve / decide
    auto* pcp = app.add_subcommand("pcp", "correspondence-instance commands");
    pcp->require_subcommand(1);
    std::string solve_path;
    unsigned solve_jobs = 1;
    auto* solve = pcp->add_subcommand("solve", "exhaustive bounded search for a witness");
    solve->add_option("instance", solve_path, "pcp v1 instance file")->required();
    solve->add_option("--jobs", solve_jobs, "parallel partitions (default 1)");

    qpmc::cli::DecideParams decide_params;
    auto* decide =
        pcp->add_subcommand("decide", "decide an instance through the encoding and the oracle");
    decide->add_option("instance", decide_params.pcp_path, "pcp v1 instance file")->required();
    decide->add_option("--t", decide_params.t, "threshold constant in (0,1), default 1/2");
    decide->add_option("--phases", decide_params.phases, "unit (default) or random");
    decide->add_option("--seed", decide_params.seed, "seed for random phases");
    decide->add_option("--mode", decide_params.mode, "sum (default) or literal");
    decide->add_option("--jobs", decide_params.jobs, "parallel workers (default 1)");
    decide->add_flag("--approx", decide_params.approx, "add decimal renderings to the report");

    // lemmas
    std::string lemmas_path, lemmas_phases = "unit";
    std::uint64_t lemmas_seed = 0;
    auto* lemmas = app.add_subcommand("lemmas", "run the constructive property suite");
    lemmas->add_option("instance", lemmas_path, "pcp v1 instance file")->required();
    lemmas->add_option("--phases", lemmas_phases, "unit (default) or random");
    lemmas->add_option("--seed", lemmas_seed, "seed for random phases");

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed())
        return emit(qpmc::cli::run_validate(validate_path, !validate_lax, validate_tol));
    if (check->parsed()) {
        if (!check_formula.empty()) check_params.formula_text = check_formula;
        if (!check_formula_file.empty()) check_params.formula_path = check_formula_file;
        if (!check_config.empty()) check_params.config = check_config;
        if (check_horizon >= 0) check_params.horizon = static_cast<unsigned long>(check_horizon);
        return emit(qpmc::cli::run_check(check_params));
    }
    if (encode->parsed()) {
        if (!encode_out.empty()) encode_params.system_out = encode_out;
        if (!encode_formula_out.empty()) encode_params.formula_out = encode_formula_out;
        return emit(qpmc::cli::run_encode(encode_params));
    }
    if (solve->parsed()) return emit(qpmc::cli::run_pcp_solve(solve_path, solve_jobs));
    if (decide->parsed()) return emit(qpmc::cli::run_pcp_decide(decide_params));
    if (lemmas->parsed()) return emit(qpmc::cli::run_lemmas(lemmas_path, lemmas_phases, lemmas_seed));
    return qpmc::cli::kExitInputError;
}
