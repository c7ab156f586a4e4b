#include "tfnl/core.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace tfnl
{

BoundsViolation::BoundsViolation(int index, double value, double c1, double c2)
    : Error(fmt::format("diffusivity a_{} = {} outside [c1, c2] = [{}, {}]", index, value, c1, c2))
    , index_(index)
{
}

Grid::Grid(int N, int Nt, double T)
    : N_(N)
    , Nt_(Nt)
    , T_(T)
{
    if (N < 2)
        throw DomainError(fmt::format("grid needs N >= 2, got {}", N));
    if (Nt < 1)
        throw DomainError(fmt::format("grid needs Nt >= 1, got {}", Nt));
    if (!(T > 0.0) || !std::isfinite(T))
        throw DomainError(fmt::format("final time must be positive, got {}", T));
    h_ = 1.0 / N;
    tau_ = T / Nt;
}

Grid Grid::paper_coupled(int N, double gamma, double T)
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError(fmt::format("gamma must lie in (0,1), got {}", gamma));
    if (N < 2)
        throw DomainError(fmt::format("grid needs N >= 2, got {}", N));
    const double h = 1.0 / N;
    const double tau_target = std::pow(h, 2.0 / (2.0 - gamma));
    // Guard against T/tau_target landing a hair above an integer.
    const double steps = T / tau_target;
    int Nt = static_cast<int>(std::ceil(steps - 1e-9 * steps));
    if (T / Nt > tau_target)
        ++Nt;
    return Grid(N, std::max(Nt, 1), T);
}

Problem::Problem(ProblemData data)
    : d_(std::move(data))
{
    if (!(d_.gamma > 0.0 && d_.gamma < 1.0))
        throw DomainError(fmt::format("gamma must lie in (0,1), got {}", d_.gamma));
    if (!(d_.alpha * d_.beta > 0.0))
        throw DomainError(fmt::format("alpha*beta must be positive, got alpha={}, beta={}", d_.alpha, d_.beta));
    if (!(d_.c1 > 0.0 && d_.c1 <= d_.c2))
        throw DomainError(fmt::format("need 0 < c1 <= c2, got c1={}, c2={}", d_.c1, d_.c2));
    if (!d_.k || !d_.f || !d_.mu || !d_.u0)
        throw DomainError("problem needs k, f, mu and u0");
}

SchemeParams::SchemeParams(double sigma)
    : sigma_(sigma)
{
    if (!(sigma >= 0.0 && sigma <= 1.0))
        throw DomainError(fmt::format("sigma must lie in [0,1], got {}", sigma));
}

std::vector<double> face_coefficients(const Problem& problem, const Grid& grid)
{
    const int N = grid.N();
    std::vector<double> a(N);
    for (int i = 1; i <= N; ++i) {
        const double value = problem.k(grid.x(i) - 0.5 * grid.h());
        if (!(value >= problem.c1() && value <= problem.c2()))
            throw BoundsViolation(i, value, problem.c1(), problem.c2());
        a[i - 1] = value;
    }
    return a;
}

TimeLevel weighted_level(std::span<const double> next, std::span<const double> curr, double sigma)
{
    if (next.size() != curr.size())
        throw DimensionError(fmt::format("level lengths differ: {} vs {}", next.size(), curr.size()));
    TimeLevel out(next.size());
    for (std::size_t i = 0; i < next.size(); ++i)
        out[i] = sigma * next[i] + (1.0 - sigma) * curr[i];
    return out;
}

TimeLevel sample_initial(const Problem& problem, const Grid& grid)
{
    TimeLevel y(grid.N() + 1);
    for (int i = 0; i <= grid.N(); ++i)
        y[i] = problem.u0(grid.x(i));
    return y;
}

} // namespace tfnl
