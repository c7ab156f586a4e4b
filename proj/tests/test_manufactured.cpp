#include <cmath>
#include <numbers>
#include <string>

#include <doctest.h>

#include "tfnl/fractional.hpp"
#include "tfnl/manufactured.hpp"

using namespace tfnl;

TEST_CASE("exact field shape")
{
    for (double alpha : {3.0, 0.7, 1.0 / 3.0, 0.1}) {
        ManufacturedProblem mp(alpha, 2.0, 0.5);
        CHECK(mp.spatial(1.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(mp.spatial(0.0) == alpha);
        CHECK(mp.spatial_d1(0.0) == alpha);
        CHECK(mp.spatial_d1(1.0) == doctest::Approx(3.0 - 6.0 * alpha).epsilon(1e-14));
        // value coupling u(0,t) = alpha u(1,t)
        for (double t : {0.0, 0.3, 1.0})
            CHECK(mp.problem().exact(0.0, t) == doctest::Approx(alpha * mp.problem().exact(1.0, t)).epsilon(1e-14));
    }
    CHECK(ManufacturedProblem::temporal(0.0) == 1.0);
    CHECK(ManufacturedProblem::temporal(1.0) == 2.0);
    CHECK(ManufacturedProblem::temporal_d1(0.0) == 1.0);
}

TEST_CASE("Caputo derivative of the temporal factor")
{
    ManufacturedProblem mp(3.0, 2.0, 0.5);
    CHECK(mp.temporal_caputo(0.0) == 0.0);
    const double oracle = caputo_oracle(ManufacturedProblem::temporal_d1, 0.7, 0.5);
    CHECK(std::abs(mp.temporal_caputo(0.7) - oracle) <= 1e-9);

    // gamma -> 1 approaches the classical derivative.
    ManufacturedProblem near_one(3.0, 2.0, 0.999);
    for (double t : {0.2, 0.5, 1.0})
        CHECK(std::abs(near_one.temporal_caputo(t) - ManufacturedProblem::temporal_d1(t)) <= 1e-2);
}

TEST_CASE("flux datum vanishes when beta balances the end fluxes")
{
    const double alpha = 0.2;
    const double beta = std::numbers::e * (3.0 - 6.0 * alpha) / alpha;
    ManufacturedProblem mp(alpha, beta, 0.5);
    for (double t : {0.0, 0.4, 1.0})
        CHECK(std::abs(mp.problem().mu(t)) <= 1e-13);
}

TEST_CASE("compatibility holds for every study configuration")
{
    struct Case
    {
        double alpha, beta, gamma;
    };
    for (const Case c : {Case{3.0, 2.0, 0.5},
                         Case{2.0, 5.0, 0.5},
                         Case{0.7, 0.1, 0.5},
                         Case{1.1, 1.1, 0.2},
                         Case{0.9, 0.9, 0.2},
                         Case{200.0, 100.0, 0.8},
                         Case{100.0, 200.0, 0.8},
                         Case{0.1, 10.0, 0.4}}) {
        ManufacturedProblem mp(c.alpha, c.beta, c.gamma);
        const auto report = verify_compatibility(mp);
        CHECK(report.samples == 50);
        CHECK(report.max_pde_residual <= 1e-8);
        CHECK(report.max_value_coupling_residual <= 1e-12);
        CHECK(report.max_flux_coupling_residual <= 1e-12);
        CHECK(report.max_initial_residual <= 1e-12);
    }
}

TEST_CASE("compatibility detects a wrong source")
{
    ManufacturedProblem mp(3.0, 2.0, 0.5);
    ProblemData d = mp.problem().data();
    const Fn2 f = d.f;
    d.f = [f](double x, double t) { return f(x, t) + 1.0; };
    CHECK_THROWS_AS(verify_compatibility(mp, Problem(d)), CompatibilityError);

    ProblemData wrong_mu = mp.problem().data();
    wrong_mu.mu = [](double) { return 0.0; };
    CHECK_THROWS_AS(verify_compatibility(mp, Problem(wrong_mu)), CompatibilityError);
}

TEST_CASE("problem catalog")
{
    const auto names = catalog_names();
    CHECK(names.size() == 2);
    const Problem paper = make_catalog_problem("paper-sec3", CatalogParams{});
    CHECK(paper.has_exact());
    CHECK(paper.alpha() == 3.0);
    const Problem zero = make_catalog_problem("zero", CatalogParams{2.0, 5.0, 0.3, 1.0});
    CHECK(zero.f(0.5, 0.5) == 0.0);
    CHECK(zero.mu(0.5) == 0.0);
    CHECK(zero.gamma() == 0.3);
    try {
        make_catalog_problem("nope", CatalogParams{});
        FAIL("expected DomainError");
    } catch (const DomainError& ex) {
        CHECK(std::string(ex.what()).find("paper-sec3") != std::string::npos);
    }
}
