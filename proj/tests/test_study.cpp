#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "tfnl/manufactured.hpp"
#include "tfnl/study.hpp"

using namespace tfnl;

namespace
{

std::string field_of(const StudyConfig& c)
{
    try {
        c.validate();
    } catch (const UsageError& ex) {
        return ex.field();
    }
    return "";
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, sep))
        out.push_back(cell);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

} // namespace

TEST_CASE("config from JSON")
{
    const auto doc = nlohmann::json::parse(R"({"problem": "paper-sec3", "gamma": 0.8, "alpha": 1, "beta": 10,
        "sigma": 0.5, "T": 2, "levels": [10, 20], "coupling": "fixed", "tau": 0.01,
        "norms": ["max"], "out": "x.csv", "format": "table"})");
    const auto c = StudyConfig::from_json(doc);
    CHECK(c.gamma == 0.8);
    CHECK(c.alpha == 1.0);
    CHECK(c.beta == 10.0);
    CHECK(c.sigma == 0.5);
    CHECK(c.T == 2.0);
    CHECK(c.levels == std::vector<int>{10, 20});
    CHECK(c.coupling == Coupling::FixedTau);
    CHECK(c.tau == 0.01);
    CHECK_FALSE(c.norm_full);
    CHECK(c.norm_max);
    CHECK(c.out == "x.csv");
    CHECK(c.format == OutputFormat::Table);
    CHECK_NOTHROW(c.validate());
    CHECK(study_grid(c, 10).Nt() == 200);

    StudyConfig partial;
    partial.merge_json(nlohmann::json::parse(R"({"alpha": 0.7, "tau": null})"));
    CHECK(partial.alpha == 0.7);
    CHECK(partial.beta == 2.0);
    CHECK(partial.levels == std::vector<int>{20, 40, 80});
}

TEST_CASE("config errors name the field")
{
    CHECK_THROWS_AS(StudyConfig::from_json(nlohmann::json::parse(R"({"gamma": "half"})")), UsageError);
    CHECK_THROWS_AS(StudyConfig::from_json(nlohmann::json::parse(R"({"coupling": "loose"})")), UsageError);
    CHECK_THROWS_AS(StudyConfig::from_json(nlohmann::json::parse("[1, 2]")), UsageError);

    StudyConfig c;
    c.gamma = 1.0;
    CHECK(field_of(c) == "gamma");
    c = {};
    c.beta = -1.0;
    CHECK(field_of(c) == "alpha");
    c = {};
    c.sigma = 2.0;
    CHECK(field_of(c) == "sigma");
    c = {};
    c.levels = {40, 20};
    CHECK(field_of(c) == "levels");
    c = {};
    c.coupling = Coupling::FixedTau;
    CHECK(field_of(c) == "tau");
    c = {};
    c.norm_full = c.norm_max = false;
    CHECK(field_of(c) == "norms");
    c = {};
    c.problem = "nope";
    CHECK(field_of(c) == "problem");
}

TEST_CASE("convergence CSV")
{
    StudyConfig c;
    c.levels = {20, 40};
    const auto report = run_convergence(c);
    const std::string csv = format_csv(report);
    const auto lines = split(csv, '\n');
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] == "h,Nt,tau,err_full,co_full,err_max,co_max");
    CHECK(lines[1] == "5.00000e-02,55,1.81818e-02,3.03169e-02,,5.50676e-02,");

    const auto second = split(lines[2], ',');
    REQUIRE(second.size() == 7);
    const double co = std::stod(second[4]);
    const double expected = convergence_order(std::stod(split(lines[1], ',')[3]), std::stod(second[3]), 0.05, 0.025);
    CHECK(std::abs(co - expected) <= 1e-3);

    SUBCASE("deterministic, serial or parallel")
    {
        StudyOptions serial;
        serial.parallel = false;
        CHECK(format_csv(run_convergence(c, serial)) == csv);
        CHECK(format_csv(run_convergence(c)) == csv);
    }
    SUBCASE("unselected norms leave empty cells")
    {
        StudyConfig only_max = c;
        only_max.norm_full = false;
        const auto row = split(split(format_csv(run_convergence(only_max)), '\n')[1], ',');
        CHECK(row[3].empty());
        CHECK_FALSE(row[5].empty());
    }
}

TEST_CASE("table format marks blow-up rows")
{
    StudyConfig c;
    c.gamma = 0.4;
    c.alpha = 0.1;
    c.beta = 10.0;
    c.levels = {20, 40, 80};
    StudyOptions options;
    options.check_residuals = true;
    const auto report = run_convergence(c, options);
    REQUIRE(report.rows.size() == 3);
    CHECK_FALSE(report.rows[0].blew_up);
    CHECK(report.rows[2].blew_up);
    CHECK_FALSE(report.rows[2].co_full);
    const std::string table = format_table(report);
    CHECK(table.find("1/80") != std::string::npos);
    CHECK(table.find('*') != std::string::npos);
}

TEST_CASE("paper coupling keeps tau under h^(2/(2-gamma))")
{
    StudyConfig c;
    for (double g : {0.2, 0.5, 0.8}) {
        c.gamma = g;
        for (int N : {20, 40, 80, 160}) {
            const Grid grid = study_grid(c, N);
            CHECK(grid.tau() <= std::pow(grid.h(), 2.0 / (2.0 - g)) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("error statistics")
{
    ManufacturedProblem mp(3.0, 2.0, 0.5);
    const Grid grid(4, 2, 1.0);
    SolveOutcome exact;
    for (int n = 0; n <= grid.Nt(); ++n) {
        TimeLevel y(grid.N() + 1);
        for (int i = 0; i <= grid.N(); ++i)
            y[i] = mp.problem().exact(grid.x(i), grid.t(n));
        exact.history.push_back(y);
    }
    auto stats = error_stats(exact, mp.problem(), grid);
    CHECK(stats.max_full == 0.0);
    CHECK(stats.max_max == 0.0);

    exact.history[1][2] += 0.5;
    stats = error_stats(exact, mp.problem(), grid);
    CHECK(stats.max_max == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stats.max_full == doctest::Approx(std::sqrt(0.25 * 0.25)).epsilon(1e-12));
    CHECK(stats.final_max == 0.0);

    exact.history[2][1] = std::nan("");
    CHECK(std::isnan(error_stats(exact, mp.problem(), grid).max_max));

    const Problem zero = make_catalog_problem("zero", CatalogParams{});
    ProblemData d = zero.data();
    d.exact = nullptr;
    CHECK_THROWS_AS(error_stats(exact, Problem(d), grid), DomainError);
}

TEST_CASE("truncation study")
{
    SUBCASE("linear data is exact")
    {
        const auto r = run_lemma1(0.5, TestFunction::Linear, 1.0, {10, 20, 40});
        for (const auto& row : r.rows)
            CHECK(row.error <= 1e-12);
        CHECK_FALSE(r.fitted_order);
        CHECK(format_lemma1(r).find("n/a") != std::string::npos);
    }
    SUBCASE("orders approach 2 - gamma")
    {
        for (double g : {0.5, 0.9}) {
            const auto r = run_lemma1(g, TestFunction::Cubic, 1.0, {10, 20, 40, 80, 160, 320, 640});
            REQUIRE(r.fitted_order);
            CHECK(std::abs(*r.fitted_order - (2.0 - g)) <= 0.1);
        }
    }
    SUBCASE("names")
    {
        CHECK(parse_test_function("t3") == TestFunction::Cubic);
        CHECK(parse_test_function("t") == TestFunction::Linear);
        CHECK(to_string(parse_test_function("exp")) == "exp");
        CHECK_THROWS_AS(parse_test_function("sin"), UsageError);
        CHECK_THROWS_AS(run_lemma1(0.5, TestFunction::Cubic, 1.0, {20, 10}), UsageError);
    }
}

TEST_CASE("stability study")
{
    SUBCASE("direct regime passes at the threshold")
    {
        StabilityConfig c;
        c.Nt = 40;
        const auto r = run_stability(c);
        CHECK(r.kind == EnergyCase::Direct);
        CHECK(r.sigma == doctest::Approx(std::clamp(r.threshold, 0.0, 1.0)));
        CHECK(r.energy.size() == 41);
        CHECK(r.pass);
        CHECK(format_stability(r).find("PASS") != std::string::npos);
    }
    SUBCASE("reflected regime passes with sigma = 1")
    {
        StabilityConfig c;
        c.alpha = 0.5;
        c.beta = 1.0 / 3.0;
        c.sigma = 1.0;
        c.Nt = 40;
        const auto r = run_stability(c);
        CHECK(r.kind == EnergyCase::Reflected);
        CHECK(r.pass);
    }
    SUBCASE("mixed regime is refused")
    {
        StabilityConfig c;
        c.alpha = 0.1;
        c.beta = 10.0;
        CHECK_THROWS_AS(run_stability(c), UndefinedNormError);
    }
    SUBCASE("random level satisfies the value coupling")
    {
        const auto y = random_initial_level(12, 2.0, 5);
        CHECK(y[0] == 2.0 * y[12]);
        CHECK(y == random_initial_level(12, 2.0, 5));
    }
}
