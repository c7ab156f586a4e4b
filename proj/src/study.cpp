#include "tfnl/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

#include <fmt/core.h>

#include "tfnl/fractional.hpp"
#include "tfnl/manufactured.hpp"
#include "tfnl/rng.hpp"

namespace tfnl
{

UsageError::UsageError(std::string field, const std::string& message)
    : Error(fmt::format("{}: {}", field, message))
    , field_(std::move(field))
{
}

namespace
{

std::string sci(double v)
{
    return fmt::format("{:.5e}", v);
}

std::optional<double> order_between(const StudyRow& coarse, const StudyRow& fine, double StudyRow::*err)
{
    const double a = coarse.*err;
    const double b = fine.*err;
    if (coarse.blew_up || fine.blew_up || !std::isfinite(a) || !std::isfinite(b) || !(a > 0.0) || !(b > 0.0))
        return std::nullopt;
    return convergence_order(a, b, coarse.h, fine.h);
}

// Running maximum that lets a NaN through and then holds it.
void keep_max(double& acc, double v)
{
    if (!std::isnan(acc) && !(v <= acc))
        acc = v;
}

template <typename T>
T get_field(const nlohmann::json& doc, const char* key)
{
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& ex) {
        throw UsageError(key, fmt::format("invalid value ({})", ex.what()));
    }
}

} // namespace

// ---------------------------------------------------------------------------

ErrorStats error_stats(const SolveOutcome& outcome, const Problem& problem, const Grid& grid)
{
    if (!problem.has_exact())
        throw DomainError("error statistics need an exact solution");
    ErrorStats stats;
    TimeLevel z(grid.N() + 1);
    for (std::size_t n = 0; n < outcome.history.size(); ++n) {
        const TimeLevel& y = outcome.history[n];
        const double t = grid.t(static_cast<int>(n));
        for (int i = 0; i <= grid.N(); ++i)
            z[i] = y[i] - problem.exact(grid.x(i), t);
        stats.final_full = norm_full(z, grid.h());
        stats.final_max = norm_max(z);
        keep_max(stats.max_full, stats.final_full);
        keep_max(stats.max_max, stats.final_max);
    }
    return stats;
}

// ---------------------------------------------------------------------------

void StudyConfig::validate() const
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw UsageError("gamma", fmt::format("must lie in (0,1), got {}", gamma));
    if (!(alpha * beta > 0.0))
        throw UsageError("alpha", fmt::format("alpha*beta must be positive, got alpha={}, beta={}", alpha, beta));
    if (!(sigma >= 0.0 && sigma <= 1.0))
        throw UsageError("sigma", fmt::format("must lie in [0,1], got {}", sigma));
    if (!(T > 0.0))
        throw UsageError("T", fmt::format("must be positive, got {}", T));
    if (levels.empty())
        throw UsageError("levels", "at least one level required");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 2)
            throw UsageError("levels", fmt::format("N must be at least 2, got {}", levels[i]));
        if (i > 0 && levels[i] <= levels[i - 1])
            throw UsageError("levels", "must be strictly increasing");
    }
    if (coupling == Coupling::FixedTau && !(tau > 0.0 && tau <= T))
        throw UsageError("tau", fmt::format("fixed coupling needs 0 < tau <= T, got {}", tau));
    if (!norm_full && !norm_max)
        throw UsageError("norms", "select at least one of full, max");
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
        throw UsageError("problem", fmt::format("unknown problem '{}'", problem));
}

void StudyConfig::merge_json(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw UsageError("config", "expected a JSON object");
    if (doc.contains("problem"))
        problem = get_field<std::string>(doc, "problem");
    if (doc.contains("gamma"))
        gamma = get_field<double>(doc, "gamma");
    if (doc.contains("alpha"))
        alpha = get_field<double>(doc, "alpha");
    if (doc.contains("beta"))
        beta = get_field<double>(doc, "beta");
    if (doc.contains("sigma"))
        sigma = get_field<double>(doc, "sigma");
    if (doc.contains("T"))
        T = get_field<double>(doc, "T");
    if (doc.contains("levels"))
        levels = get_field<std::vector<int>>(doc, "levels");
    if (doc.contains("coupling")) {
        const auto c = get_field<std::string>(doc, "coupling");
        if (c == "paper")
            coupling = Coupling::Paper;
        else if (c == "fixed")
            coupling = Coupling::FixedTau;
        else
            throw UsageError("coupling", fmt::format("expected 'paper' or 'fixed', got '{}'", c));
    }
    if (doc.contains("tau") && !doc.at("tau").is_null())
        tau = get_field<double>(doc, "tau");
    if (doc.contains("norms")) {
        norm_full = norm_max = false;
        for (const auto& n : get_field<std::vector<std::string>>(doc, "norms")) {
            if (n == "full")
                norm_full = true;
            else if (n == "max")
                norm_max = true;
            else
                throw UsageError("norms", fmt::format("unknown norm '{}'", n));
        }
    }
    if (doc.contains("out") && !doc.at("out").is_null())
        out = get_field<std::string>(doc, "out");
    if (doc.contains("format")) {
        const auto f = get_field<std::string>(doc, "format");
        if (f == "csv")
            format = OutputFormat::Csv;
        else if (f == "table")
            format = OutputFormat::Table;
        else
            throw UsageError("format", fmt::format("expected 'csv' or 'table', got '{}'", f));
    }
}

StudyConfig StudyConfig::from_json(const nlohmann::json& doc)
{
    StudyConfig c;
    c.merge_json(doc);
    return c;
}

Grid study_grid(const StudyConfig& config, int N)
{
    if (config.coupling == Coupling::Paper)
        return Grid::paper_coupled(N, config.gamma, config.T);
    const int Nt = static_cast<int>(std::ceil(config.T / config.tau - 1e-9));
    return Grid(N, std::max(Nt, 1), config.T);
}

StudyReport run_convergence(const StudyConfig& config, const StudyOptions& options)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const CatalogParams params{config.alpha, config.beta, config.gamma, config.T};

    auto run_level = [&](int N) {
        const Problem problem = make_catalog_problem(config.problem, params);
        const Grid grid = study_grid(config, N);
        MarchOptions mo;
        mo.check_residuals = options.check_residuals;
        const SolveOutcome outcome = march(problem, grid, SchemeParams(config.sigma), mo);
        const ErrorStats stats = error_stats(outcome, problem, grid);

        StudyRow row;
        row.h = grid.h();
        row.Nt = grid.Nt();
        row.tau = grid.tau();
        row.err_full = stats.max_full;
        row.err_max = stats.max_max;
        row.blew_up = outcome.blow_up.has_value();
        for (double r : outcome.per_step_residuals)
            row.max_residual = std::max(row.max_residual, r);
        return row;
    };

    StudyReport report;
    report.config = config;
    if (options.parallel) {
        std::vector<std::future<StudyRow>> jobs;
        for (int N : config.levels)
            jobs.push_back(std::async(std::launch::async, run_level, N));
        for (auto& job : jobs)
            report.rows.push_back(job.get());
    } else {
        for (int N : config.levels)
            report.rows.push_back(run_level(N));
    }

    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        report.rows[i].co_full = order_between(report.rows[i - 1], report.rows[i], &StudyRow::err_full);
        report.rows[i].co_max = order_between(report.rows[i - 1], report.rows[i], &StudyRow::err_max);
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string format_csv(const StudyReport& report)
{
    const bool full = report.config.norm_full;
    const bool mx = report.config.norm_max;
    auto opt = [](const std::optional<double>& v) { return v ? sci(*v) : std::string(); };

    std::string out = "h,Nt,tau,err_full,co_full,err_max,co_max\n";
    for (const auto& r : report.rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n",
                           sci(r.h),
                           r.Nt,
                           sci(r.tau),
                           full ? sci(r.err_full) : "",
                           full ? opt(r.co_full) : "",
                           mx ? sci(r.err_max) : "",
                           mx ? opt(r.co_max) : "");
    }
    return out;
}

std::string format_table(const StudyReport& report)
{
    const StudyConfig& c = report.config;
    std::string out = fmt::format("problem={}  gamma={}  alpha={}  beta={}  sigma={}  T={}  coupling={}\n",
                                  c.problem,
                                  c.gamma,
                                  c.alpha,
                                  c.beta,
                                  c.sigma,
                                  c.T,
                                  c.coupling == Coupling::Paper ? "h^2=tau^(2-gamma)" : fmt::format("tau={}", c.tau));
    out += fmt::format("{:>8} {:>7} {:>12}", "h", "Nt", "tau");
    if (c.norm_full)
        out += fmt::format(" {:>14} {:>8}", "max|[z]|_0", "CO");
    if (c.norm_max)
        out += fmt::format(" {:>14} {:>8}", "||z||_C", "CO");
    out += "\n";

    auto co = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string(); };
    bool any_blowup = false;
    for (const auto& r : report.rows) {
        out += fmt::format("{:>8} {:>7} {:>12}", fmt::format("1/{}", static_cast<int>(std::lround(1.0 / r.h))), r.Nt, sci(r.tau));
        if (c.norm_full)
            out += fmt::format(" {:>14} {:>8}", sci(r.err_full), co(r.co_full));
        if (c.norm_max)
            out += fmt::format(" {:>14} {:>8}", sci(r.err_max), co(r.co_max));
        if (r.blew_up) {
            out += "  *";
            any_blowup = true;
        }
        out += "\n";
    }
    if (any_blowup)
        out += fmt::format("* march stopped: solution exceeded {:.0e} or became non-finite\n", blow_up_threshold);
    out += fmt::format("wall time {:.2f} s\n", report.wall_seconds);
    return out;
}

// ---------------------------------------------------------------------------

TestFunction parse_test_function(const std::string& name)
{
    if (name == "t3" || name == "cubic")
        return TestFunction::Cubic;
    if (name == "temporal" || name == "t3-t2+t+1")
        return TestFunction::Temporal;
    if (name == "exp")
        return TestFunction::Exp;
    if (name == "t" || name == "linear")
        return TestFunction::Linear;
    throw UsageError("function", fmt::format("unknown test function '{}' (t3, temporal, exp, t)", name));
}

std::string to_string(TestFunction fn)
{
    switch (fn) {
    case TestFunction::Cubic:
        return "t3";
    case TestFunction::Temporal:
        return "temporal";
    case TestFunction::Exp:
        return "exp";
    case TestFunction::Linear:
        return "t";
    }
    return "?";
}

TruncationReport run_lemma1(double gamma, TestFunction fn, double T, const std::vector<int>& step_counts)
{
    if (step_counts.empty())
        throw UsageError("steps", "at least one step count required");
    for (std::size_t i = 0; i < step_counts.size(); ++i)
        if (step_counts[i] < 1 || (i > 0 && step_counts[i] <= step_counts[i - 1]))
            throw UsageError("steps", "step counts must be positive and increasing");

    std::function<double(double)> v;
    std::function<double(double)> dv;
    switch (fn) {
    case TestFunction::Cubic:
        v = [](double t) { return t * t * t; };
        dv = [](double t) { return 3.0 * t * t; };
        break;
    case TestFunction::Temporal:
        v = ManufacturedProblem::temporal;
        dv = ManufacturedProblem::temporal_d1;
        break;
    case TestFunction::Exp:
        v = [](double t) { return std::exp(t); };
        dv = v;
        break;
    case TestFunction::Linear:
        v = [](double t) { return t; };
        dv = [](double) { return 1.0; };
        break;
    }

    const double reference = caputo_oracle(dv, T, gamma);
    TruncationReport report;
    report.gamma = gamma;
    report.T = T;
    report.function = fn;
    for (int steps : step_counts) {
        const double tau = T / steps;
        std::vector<double> series(steps + 1);
        for (int s = 0; s <= steps; ++s)
            series[s] = v(s * tau);
        TruncationRow row;
        row.steps = steps;
        row.tau = tau;
        row.error = std::abs(discrete_caputo(series, gamma, tau) - reference);
        report.rows.push_back(row);
    }
    // Orders are only meaningful well above the oracle accuracy.
    constexpr double noise_floor = 1e-11;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& coarse = report.rows[i - 1];
        auto& fine = report.rows[i];
        if (coarse.error > noise_floor && fine.error > noise_floor)
            fine.order = convergence_order(coarse.error, fine.error, coarse.tau, fine.tau);
    }
    report.fitted_order = report.rows.back().order;
    return report;
}

std::string format_lemma1(const TruncationReport& report)
{
    std::string out = fmt::format("L1 truncation error at t={} for v={}, gamma={} (expected order {:.3f})\n",
                                  report.T,
                                  to_string(report.function),
                                  report.gamma,
                                  2.0 - report.gamma);
    out += fmt::format("{:>8} {:>12} {:>14} {:>8}\n", "steps", "tau", "error", "order");
    for (const auto& r : report.rows)
        out += fmt::format("{:>8} {:>12} {:>14} {:>8}\n",
                           r.steps,
                           sci(r.tau),
                           sci(r.error),
                           r.order ? fmt::format("{:.3f}", *r.order) : "");
    out += report.fitted_order ? fmt::format("fitted order {:.4f}\n", *report.fitted_order)
                               : std::string("fitted order: n/a (errors at roundoff level)\n");
    return out;
}

// ---------------------------------------------------------------------------

TimeLevel random_initial_level(int N, double alpha, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    TimeLevel y(N + 1);
    for (double& v : y)
        v = rng.uniform(-1.0, 1.0);
    y[0] = alpha * y[N];
    return y;
}

StabilityReport run_stability(const StabilityConfig& config)
{
    StabilityReport report;
    report.config = config;
    report.kind = classify_energy_case(config.alpha, config.beta);

    const CatalogParams params{config.alpha, config.beta, config.gamma, config.T};
    const Problem problem = make_catalog_problem("zero", params);
    const Grid grid(config.N, config.Nt, config.T);
    report.threshold = sigma_threshold(config.gamma, grid.h(), grid.tau(), problem.c2());
    report.sigma = config.sigma ? *config.sigma : std::clamp(report.threshold, 0.0, 1.0);

    MarchOptions mo;
    mo.initial = random_initial_level(config.N, config.alpha, config.seed);
    const SolveOutcome outcome = march(problem, grid, SchemeParams(report.sigma), mo);
    report.blow_up = outcome.blow_up;

    const std::vector<double> faces = face_coefficients(problem, grid);
    report.energy.reserve(outcome.history.size());
    for (const auto& level : outcome.history)
        report.energy.push_back(energy_norm1(level, problem, grid, faces));

    const double bound = report.energy.front() * (1.0 + 1e-12);
    report.pass = !report.blow_up && std::all_of(report.energy.begin(), report.energy.end(), [&](double e) { return e <= bound; });
    return report;
}

std::string format_stability(const StabilityReport& report)
{
    const auto& c = report.config;
    std::string out = fmt::format("gamma={} alpha={} beta={} N={} Nt={} T={} seed={}\n", c.gamma, c.alpha, c.beta, c.N, c.Nt, c.T, c.seed);
    out += fmt::format("regime: {}\n", report.kind == EnergyCase::Direct ? "direct" : "reflected");
    out += fmt::format("sigma = {:.6f}, sigma_threshold = {:.6f}\n", report.sigma, report.threshold);
    if (report.sigma < report.threshold)
        out += "warning: sigma below the stability threshold\n";
    out += fmt::format("{:>7} {:>14}\n", "n", "||y^n||_1");
    for (std::size_t n = 0; n < report.energy.size(); ++n)
        out += fmt::format("{:>7} {:>14}\n", n, sci(report.energy[n]));
    out += report.pass ? "PASS: ||y^n||_1 <= ||y^0||_1 for all n\n" : "FAIL: energy norm grew above its initial value\n";
    return out;
}

} // namespace tfnl
