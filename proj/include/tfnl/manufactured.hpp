#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tfnl/core.hpp"

namespace tfnl
{

/// Raised when a manufactured problem fails one of its consistency checks.
class CompatibilityError : public Error
{
public:
    using Error::Error;
};

/// Exact solution u(x,t) = S(x) T(t) with
///   S(x) = (1-3a) x^3 + a x^2 + a x + a,   T(t) = t^3 - t^2 + t + 1,
/// diffusivity k(x) = e^x (c1 = 1, c2 = e), and source and flux datum
/// derived so that u solves the nonlocal problem for (alpha, beta, gamma).
class ManufacturedProblem
{
public:
    ManufacturedProblem(double alpha, double beta, double gamma, double T = 1.0);

    const Problem& problem() const noexcept { return problem_; }
    double final_time() const noexcept { return T_; }

    double spatial(double x) const;
    double spatial_d1(double x) const;
    double spatial_d2(double x) const;
    static double temporal(double t);
    static double temporal_d1(double t);
    /// Closed-form Caputo derivative of T(t).
    double temporal_caputo(double t) const;

private:
    double alpha_;
    double gamma_;
    double T_;
    Problem problem_;
};

inline ManufacturedProblem build_manufactured(double alpha, double beta, double gamma, double T = 1.0)
{
    return ManufacturedProblem(alpha, beta, gamma, T);
}

struct CompatibilityReport
{
    double max_pde_residual = 0.0;
    double max_value_coupling_residual = 0.0;
    double max_flux_coupling_residual = 0.0;
    double max_initial_residual = 0.0;
    int samples = 0;
};

/// Checks at random (x,t) samples that the exact field satisfies the PDE
/// (Caputo part through the quadrature oracle, tolerance 1e-8), both boundary
/// couplings and the initial condition (tolerance 1e-12). Throws
/// CompatibilityError naming the failed identity.
/// candidate supplies f, mu and u0 (normally mp.problem() itself).
CompatibilityReport verify_compatibility(const ManufacturedProblem& mp,
                                         const Problem& candidate,
                                         int samples = 50,
                                         std::uint64_t seed = 1);

inline CompatibilityReport verify_compatibility(const ManufacturedProblem& mp, int samples = 50, std::uint64_t seed = 1)
{
    return verify_compatibility(mp, mp.problem(), samples, seed);
}

// ---------------------------------------------------------------------------
// Named problems for the command line
// ---------------------------------------------------------------------------

struct CatalogParams
{
    double alpha = 3.0;
    double beta = 2.0;
    double gamma = 0.5;
    double T = 1.0;
};

/// "paper-sec3": the manufactured problem above.
/// "zero":       k = e^x with f, mu, u0 identically zero.
Problem make_catalog_problem(std::string_view name, const CatalogParams& params);

std::vector<std::string> catalog_names();

} // namespace tfnl
