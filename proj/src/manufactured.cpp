#include "tfnl/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "tfnl/fractional.hpp"
#include "tfnl/rng.hpp"

namespace tfnl
{

namespace
{

constexpr double e = std::numbers::e;

double cubic_s(double a, double x)
{
    return (((1.0 - 3.0 * a) * x + a) * x + a) * x + a;
}

double cubic_s_d1(double a, double x)
{
    return 3.0 * (1.0 - 3.0 * a) * x * x + 2.0 * a * x + a;
}

double cubic_s_d2(double a, double x)
{
    return 6.0 * (1.0 - 3.0 * a) * x + 2.0 * a;
}

// D^g (t^3 - t^2 + t + 1)
double caputo_of_temporal(double g, double t)
{
    return 6.0 * time_power(t, 3.0 - g) / std::tgamma(4.0 - g) - 2.0 * time_power(t, 2.0 - g) / std::tgamma(3.0 - g)
           + time_power(t, 1.0 - g) / std::tgamma(2.0 - g);
}

ProblemData manufactured_data(double a, double b, double g)
{
    ProblemData d;
    d.gamma = g;
    d.alpha = a;
    d.beta = b;
    d.k = [](double x) { return std::exp(x); };
    d.f = [a, g](double x, double t) {
        return cubic_s(a, x) * caputo_of_temporal(g, t)
               - std::exp(x) * (cubic_s_d1(a, x) + cubic_s_d2(a, x)) * ManufacturedProblem::temporal(t);
    };
    d.mu = [a, b](double t) { return (e * (3.0 - 6.0 * a) - b * a) * ManufacturedProblem::temporal(t); };
    d.u0 = [a](double x) { return cubic_s(a, x); };
    d.c1 = 1.0;
    d.c2 = e;
    d.exact = [a](double x, double t) { return cubic_s(a, x) * ManufacturedProblem::temporal(t); };
    return d;
}

} // namespace

ManufacturedProblem::ManufacturedProblem(double alpha, double beta, double gamma, double T)
    : alpha_(alpha)
    , gamma_(gamma)
    , T_(T)
    , problem_(manufactured_data(alpha, beta, gamma))
{
    if (!(T > 0.0))
        throw DomainError(fmt::format("final time must be positive, got {}", T));
}

double ManufacturedProblem::spatial(double x) const { return cubic_s(alpha_, x); }
double ManufacturedProblem::spatial_d1(double x) const { return cubic_s_d1(alpha_, x); }
double ManufacturedProblem::spatial_d2(double x) const { return cubic_s_d2(alpha_, x); }

double ManufacturedProblem::temporal(double t) { return ((t - 1.0) * t + 1.0) * t + 1.0; }
double ManufacturedProblem::temporal_d1(double t) { return (3.0 * t - 2.0) * t + 1.0; }

double ManufacturedProblem::temporal_caputo(double t) const { return caputo_of_temporal(gamma_, t); }

CompatibilityReport verify_compatibility(const ManufacturedProblem& mp, const Problem& candidate, int samples, std::uint64_t seed)
{
    constexpr double pde_tol = 1e-8;
    constexpr double identity_tol = 1e-12;

    const Problem& ref = mp.problem();
    const double alpha = ref.alpha();
    const double beta = ref.beta();
    const double gamma = ref.gamma();
    SplitMix64 rng(seed);
    CompatibilityReport report;
    report.samples = samples;

    // Residuals are measured relative to max(1, sum of |terms|).
    auto relative = [](double residual, std::initializer_list<double> terms) {
        double scale = 1.0;
        double sum = 0.0;
        for (double t : terms)
            sum += std::abs(t);
        scale = std::max(scale, sum);
        return std::abs(residual) / scale;
    };

    for (int s = 0; s < samples; ++s) {
        const double x = rng.uniform();
        const double t = mp.final_time() * (1.0 - rng.uniform());  // (0, T]

        const double caputo = mp.spatial(x) * caputo_oracle(ManufacturedProblem::temporal_d1, t, gamma);
        const double flux_div = std::exp(x) * (mp.spatial_d1(x) + mp.spatial_d2(x)) * ManufacturedProblem::temporal(t);
        const double f = candidate.f(x, t);
        report.max_pde_residual = std::max(report.max_pde_residual, relative(caputo - flux_div - f, {caputo, flux_div, f}));

        const double left = ref.exact(0.0, t);
        const double right = ref.exact(1.0, t);
        report.max_value_coupling_residual
            = std::max(report.max_value_coupling_residual, relative(left - alpha * right, {left, alpha * right}));

        const double tt = ManufacturedProblem::temporal(t);
        const double flux_right = candidate.k(1.0) * mp.spatial_d1(1.0) * tt;
        const double flux_left = beta * candidate.k(0.0) * mp.spatial_d1(0.0) * tt;
        const double mu = candidate.mu(t);
        report.max_flux_coupling_residual = std::max(report.max_flux_coupling_residual,
                                                     relative(flux_right - flux_left - mu, {flux_right, flux_left, mu}));

        const double u0 = candidate.u0(x);
        const double initial = ref.exact(x, 0.0);
        report.max_initial_residual = std::max(report.max_initial_residual, relative(u0 - initial, {u0, initial}));
    }

    if (!(report.max_pde_residual <= pde_tol))
        throw CompatibilityError(fmt::format("PDE residual {:.3e} exceeds {:.0e}", report.max_pde_residual, pde_tol));
    if (!(report.max_value_coupling_residual <= identity_tol))
        throw CompatibilityError(fmt::format("value coupling u(0,t) = alpha u(1,t) violated by {:.3e}",
                                             report.max_value_coupling_residual));
    if (!(report.max_flux_coupling_residual <= identity_tol))
        throw CompatibilityError(fmt::format("flux coupling k(1)u_x(1,t) = beta k(0)u_x(0,t) + mu(t) violated by {:.3e}",
                                             report.max_flux_coupling_residual));
    if (!(report.max_initial_residual <= identity_tol))
        throw CompatibilityError(fmt::format("initial condition violated by {:.3e}", report.max_initial_residual));
    return report;
}

Problem make_catalog_problem(std::string_view name, const CatalogParams& params)
{
    if (name == "paper-sec3")
        return build_manufactured(params.alpha, params.beta, params.gamma, params.T).problem();
    if (name == "zero") {
        ProblemData d;
        d.gamma = params.gamma;
        d.alpha = params.alpha;
        d.beta = params.beta;
        d.k = [](double x) { return std::exp(x); };
        d.f = [](double, double) { return 0.0; };
        d.mu = [](double) { return 0.0; };
        d.u0 = [](double) { return 0.0; };
        d.c1 = 1.0;
        d.c2 = e;
        d.exact = [](double, double) { return 0.0; };
        return Problem(std::move(d));
    }
    std::string known;
    for (const auto& n : catalog_names())
        known += (known.empty() ? "" : ", ") + n;
    throw DomainError(fmt::format("unknown problem '{}'; available: {}", name, known));
}

std::vector<std::string> catalog_names()
{
    return {"paper-sec3", "zero"};
}

} // namespace tfnl
