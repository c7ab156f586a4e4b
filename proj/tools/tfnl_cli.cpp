// Command-line driver: single solves, convergence studies, L1 truncation
// order checks and energy-decay experiments.
//
// Exit codes: 0 success, 1 runtime/I-O failure, 2 usage error,
// 3 blow-up with --fail-on-blowup.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "tfnl/manufactured.hpp"
#include "tfnl/norms.hpp"
#include "tfnl/stepper.hpp"
#include "tfnl/study.hpp"

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;
constexpr int exit_blowup = 3;

struct CommonFlags
{
    std::string config_path;
    std::optional<std::string> problem;
    std::optional<double> gamma;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> sigma;
    std::optional<double> T;
    std::optional<std::string> out;
    bool fail_on_blowup = false;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--problem", f.problem, "catalog problem (paper-sec3, zero)");
    cmd->add_option("--gamma", f.gamma, "fractional order in (0,1)");
    cmd->add_option("--alpha", f.alpha, "value coupling u(0,t) = alpha u(1,t)");
    cmd->add_option("--beta", f.beta, "flux coupling parameter");
    cmd->add_option("--sigma", f.sigma, "scheme weight in [0,1]");
    cmd->add_option("--T", f.T, "final time");
    cmd->add_option("--out", f.out, "output path (default stdout)");
    cmd->add_flag("--fail-on-blowup", f.fail_on_blowup, "exit with status 3 if the march blows up");
}

tfnl::StudyConfig load_config(const CommonFlags& f)
{
    tfnl::StudyConfig config;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in)
            throw tfnl::UsageError("config", fmt::format("cannot open '{}'", f.config_path));
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& ex) {
            throw tfnl::UsageError("config", fmt::format("invalid JSON in '{}': {}", f.config_path, ex.what()));
        }
        config.merge_json(doc);
    }
    if (f.problem)
        config.problem = *f.problem;
    if (f.gamma)
        config.gamma = *f.gamma;
    if (f.alpha)
        config.alpha = *f.alpha;
    if (f.beta)
        config.beta = *f.beta;
    if (f.sigma)
        config.sigma = *f.sigma;
    if (f.T)
        config.T = *f.T;
    if (f.out)
        config.out = *f.out;
    return config;
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    out << text;
    if (!out)
        throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

std::string problem_list()
{
    std::string s;
    for (const auto& n : tfnl::catalog_names())
        s += (s.empty() ? "" : ", ") + n;
    return s;
}

// ---------------------------------------------------------------------------

struct SolveFlags
{
    int N = 20;
    std::optional<int> Nt;
    bool history = false;
};

int run_solve(const CommonFlags& common, const SolveFlags& sf)
{
    tfnl::StudyConfig config = load_config(common);
    config.levels = {sf.N};
    if (sf.Nt) {
        config.coupling = tfnl::Coupling::FixedTau;
        config.tau = config.T / *sf.Nt;
    }
    try {
        config.validate();
    } catch (const tfnl::UsageError& ex) {
        if (ex.field() == "problem")
            throw tfnl::UsageError("problem", fmt::format("unknown problem '{}'; available: {}", config.problem, problem_list()));
        throw;
    }

    const tfnl::Problem problem
        = tfnl::make_catalog_problem(config.problem, {config.alpha, config.beta, config.gamma, config.T});
    const tfnl::Grid grid = sf.Nt ? tfnl::Grid(sf.N, *sf.Nt, config.T) : tfnl::study_grid(config, sf.N);
    const tfnl::SolveOutcome outcome = tfnl::march(problem, grid, tfnl::SchemeParams(config.sigma));

    std::string csv = "x";
    if (sf.history)
        for (std::size_t n = 0; n < outcome.history.size(); ++n)
            csv += fmt::format(",y{}", n);
    else
        csv += ",y";
    csv += "\n";
    for (int i = 0; i <= grid.N(); ++i) {
        csv += fmt::format("{:.12e}", grid.x(i));
        if (sf.history)
            for (const auto& level : outcome.history)
                csv += fmt::format(",{:.12e}", level[i]);
        else
            csv += fmt::format(",{:.12e}", outcome.history.back()[i]);
        csv += "\n";
    }
    emit(config.out, csv);

    std::FILE* summary = config.out.empty() ? stderr : stdout;
    fmt::print(summary, "N={} Nt={} h={:.5e} tau={:.5e} sigma={}\n", grid.N(), grid.Nt(), grid.h(), grid.tau(), config.sigma);
    if (problem.has_exact()) {
        const tfnl::ErrorStats stats = tfnl::error_stats(outcome, problem, grid);
        fmt::print(summary, "max_n |[z]|_0 = {:.5e}\nmax_n ||z||_C = {:.5e}\n", stats.max_full, stats.max_max);
        fmt::print(summary, "final |[z]|_0 = {:.5e}\nfinal ||z||_C = {:.5e}\n", stats.final_full, stats.final_max);
    }
    if (outcome.blow_up) {
        fmt::print(summary, "blow-up at level {} (max-norm {:.5e})\n", outcome.blow_up->level, outcome.blow_up->norm);
        if (common.fail_on_blowup)
            return exit_blowup;
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct ConvergenceFlags
{
    std::optional<std::vector<int>> levels;
    std::optional<double> tau;
    std::optional<std::vector<std::string>> norms;
    std::optional<std::string> format;
    bool serial = false;
};

int run_convergence_cmd(const CommonFlags& common, const ConvergenceFlags& cf)
{
    tfnl::StudyConfig config = load_config(common);
    nlohmann::json overrides = nlohmann::json::object();
    if (cf.levels)
        overrides["levels"] = *cf.levels;
    if (cf.tau) {
        overrides["coupling"] = "fixed";
        overrides["tau"] = *cf.tau;
    }
    if (cf.norms)
        overrides["norms"] = *cf.norms;
    if (cf.format)
        overrides["format"] = *cf.format;
    config.merge_json(overrides);

    tfnl::StudyOptions options;
    options.parallel = !cf.serial;
    const tfnl::StudyReport report = tfnl::run_convergence(config, options);
    emit(config.out, config.format == tfnl::OutputFormat::Csv ? tfnl::format_csv(report) : tfnl::format_table(report));

    const bool blew_up = std::any_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.blew_up; });
    return blew_up && common.fail_on_blowup ? exit_blowup : exit_ok;
}

// ---------------------------------------------------------------------------

struct Lemma1Flags
{
    std::vector<double> gammas{0.3, 0.5, 0.9};
    std::vector<int> steps{10, 20, 40, 80, 160, 320, 640};
    std::string function = "t3";
    double T = 1.0;
    std::string out;
};

int run_lemma1_cmd(const Lemma1Flags& lf)
{
    const tfnl::TestFunction fn = tfnl::parse_test_function(lf.function);
    std::string text;
    for (double g : lf.gammas) {
        if (!(g > 0.0 && g < 1.0))
            throw tfnl::UsageError("gamma", fmt::format("must lie in (0,1), got {}", g));
        text += tfnl::format_lemma1(tfnl::run_lemma1(g, fn, lf.T, lf.steps));
    }
    emit(lf.out, text);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct StabilityFlags
{
    double gamma = 0.5;
    double alpha = 2.0;
    double beta = 5.0;
    std::optional<double> sigma;
    int N = 20;
    int Nt = 100;
    double T = 1.0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_stability_cmd(const StabilityFlags& sf)
{
    tfnl::StabilityConfig config;
    config.gamma = sf.gamma;
    config.alpha = sf.alpha;
    config.beta = sf.beta;
    config.sigma = sf.sigma;
    config.N = sf.N;
    config.Nt = sf.Nt;
    config.T = sf.T;
    config.seed = sf.seed;
    const tfnl::StabilityReport report = tfnl::run_stability(config);
    emit(sf.out, tfnl::format_stability(report));
    return report.pass ? exit_ok : exit_failure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Time-fractional diffusion with nonlocal boundary conditions"};
    app.require_subcommand(1);

    CommonFlags solve_common;
    SolveFlags solve_flags;
    auto* solve = app.add_subcommand("solve", "march one problem and write the final level as CSV (x,y)");
    add_common(solve, solve_common);
    solve->add_option("--N", solve_flags.N, "space subintervals")->check(CLI::Range(2, 1 << 20));
    solve->add_option("--Nt", solve_flags.Nt, "time steps (default: h^2 = tau^(2-gamma))")->check(CLI::PositiveNumber);
    solve->add_flag("--history", solve_flags.history, "write every level as a column");

    CommonFlags conv_common;
    ConvergenceFlags conv_flags;
    auto* conv = app.add_subcommand("convergence", "grid refinement study with convergence orders");
    add_common(conv, conv_common);
    conv->add_option("--levels", conv_flags.levels, "space subintervals per level, e.g. 20,40,80")->delimiter(',');
    conv->add_option("--tau", conv_flags.tau, "fixed time step instead of h^2 = tau^(2-gamma)");
    conv->add_option("--norms", conv_flags.norms, "full,max")->delimiter(',');
    conv->add_option("--format", conv_flags.format, "csv or table");
    conv->add_flag("--serial", conv_flags.serial, "run levels one after another");

    Lemma1Flags lemma_flags;
    auto* lemma = app.add_subcommand("lemma1", "observed truncation order of the L1 operator");
    lemma->add_option("--gamma", lemma_flags.gammas, "orders, e.g. 0.3,0.5,0.9")->delimiter(',');
    lemma->add_option("--steps", lemma_flags.steps, "time step counts, increasing")->delimiter(',');
    lemma->add_option("--function", lemma_flags.function, "t3, temporal, exp or t");
    lemma->add_option("--T", lemma_flags.T, "evaluation time");
    lemma->add_option("--out", lemma_flags.out, "output path (default stdout)");

    StabilityFlags stab_flags;
    auto* stab = app.add_subcommand("stability", "energy-norm decay for homogeneous data and random u0");
    stab->add_option("--gamma", stab_flags.gamma, "fractional order");
    stab->add_option("--alpha", stab_flags.alpha, "value coupling parameter");
    stab->add_option("--beta", stab_flags.beta, "flux coupling parameter");
    stab->add_option("--sigma", stab_flags.sigma, "scheme weight (default: the stability threshold)");
    stab->add_option("--N", stab_flags.N, "space subintervals")->check(CLI::Range(2, 1 << 20));
    stab->add_option("--Nt", stab_flags.Nt, "time steps")->check(CLI::PositiveNumber);
    stab->add_option("--T", stab_flags.T, "final time");
    stab->add_option("--seed", stab_flags.seed, "SplitMix64 seed for u0");
    stab->add_option("--out", stab_flags.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return exit_usage;
    }

    try {
        if (*solve)
            return run_solve(solve_common, solve_flags);
        if (*conv)
            return run_convergence_cmd(conv_common, conv_flags);
        if (*lemma)
            return run_lemma1_cmd(lemma_flags);
        if (*stab)
            return run_stability_cmd(stab_flags);
    } catch (const tfnl::UsageError& ex) {
        fmt::print(stderr, "usage error: {}\n", ex.what());
        return exit_usage;
    } catch (const tfnl::UndefinedNormError& ex) {
        fmt::print(stderr, "refused: {}\n", ex.what());
        return exit_usage;
    } catch (const tfnl::DomainError& ex) {
        fmt::print(stderr, "usage error: {}\n", ex.what());
        return exit_usage;
    } catch (const std::exception& ex) {
        fmt::print(stderr, "error: {}\n", ex.what());
        return exit_failure;
    }
    return exit_usage;
}
