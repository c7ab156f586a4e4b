#include "tfnl/norms.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace tfnl
{

namespace
{

double norm0_sq(std::span<const double> y, double h)
{
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        sum += y[i] * y[i];
    return sum * h;
}

double direct_norm_sq(std::span<const double> y, const EnergyWeights& w, double h)
{
    double weighted = 0.0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        weighted += w.p1_sq[i] * y[i] * y[i];
    return norm0_sq(y, h) + w.delta1 * weighted * h + w.gamma1 * y[0] * y[0] * h;
}

void check_lengths(std::span<const double> y, std::span<const double> faces)
{
    if (y.size() != faces.size() + 1)
        throw DimensionError(fmt::format("level of length {} does not match {} face coefficients", y.size(), faces.size()));
}

std::vector<double> reversed(std::span<const double> v)
{
    return std::vector<double>(v.rbegin(), v.rend());
}

} // namespace

double norm0(std::span<const double> y, double h)
{
    return std::sqrt(norm0_sq(y, h));
}

double norm_full(std::span<const double> y, double h)
{
    if (y.size() < 2)
        throw DimensionError("full norm needs at least two nodes");
    const double ends = 0.5 * h * (y.front() * y.front() + y.back() * y.back());
    return std::sqrt(ends + norm0_sq(y, h));
}

double norm_max(std::span<const double> y)
{
    double m = 0.0;
    for (double v : y) {
        if (std::isnan(v))
            return v;
        m = std::max(m, std::abs(v));
    }
    return m;
}

EnergyCase classify_energy_case(double alpha, double beta)
{
    const double ratio = beta / alpha - 1.0;
    const double square = alpha * alpha - 1.0;
    if (ratio >= 0.0 && square >= 0.0)
        return EnergyCase::Direct;
    if (ratio <= 0.0 && square <= 0.0)
        return EnergyCase::Reflected;
    throw UndefinedNormError(
        fmt::format("energy norm undefined for alpha={}, beta={}: (beta/alpha-1)(alpha^2-1) < 0", alpha, beta));
}

EnergyWeights energy_weights(double alpha, double beta, std::span<const double> faces, double h)
{
    const int N = static_cast<int>(faces.size());
    EnergyWeights w;
    w.kind = classify_energy_case(alpha, beta);
    w.p1_sq.assign(N + 1, 0.0);
    for (int i = N - 1; i >= 0; --i)
        w.p1_sq[i] = w.p1_sq[i + 1] + h / faces[i];  // faces[i] is a_{i+1}
    w.delta1 = (beta / alpha - 1.0) / w.p1_sq[0];
    w.gamma1 = (alpha * beta + 1.0) / (2.0 * alpha * alpha);
    return w;
}

double energy_norm1(std::span<const double> y, double alpha, double beta, std::span<const double> faces, double h)
{
    check_lengths(y, faces);
    if (classify_energy_case(alpha, beta) == EnergyCase::Direct)
        return std::sqrt(direct_norm_sq(y, energy_weights(alpha, beta, faces, h), h));

    const std::vector<double> v = reversed(y);
    const std::vector<double> faces_bar = reversed(faces);
    const EnergyWeights w = energy_weights(1.0 / alpha, 1.0 / beta, faces_bar, h);
    return std::sqrt(direct_norm_sq(v, w, h));
}

double energy_norm1(std::span<const double> y, const Problem& problem, const Grid& grid, std::span<const double> faces)
{
    return energy_norm1(y, problem.alpha(), problem.beta(), faces, grid.h());
}

double energy_norm1_reflected_closed_form(std::span<const double> y,
                                          double alpha,
                                          double beta,
                                          std::span<const double> faces,
                                          double h)
{
    check_lengths(y, faces);
    if (classify_energy_case(alpha, beta) != EnergyCase::Reflected)
        throw UndefinedNormError(fmt::format("alpha={}, beta={} is not in the reflected regime", alpha, beta));

    const int N = static_cast<int>(faces.size());
    // p1 of the reflected coefficients, evaluated at 1 - x_i:
    // pbar_sq(x_j) = sum_{s=j}^{N-1} h / a_{N-s}, taken at j = N - i.
    std::vector<double> pbar_sq(N + 1, 0.0);
    for (int j = N - 1; j >= 0; --j)
        pbar_sq[j] = pbar_sq[j + 1] + h / faces[N - j - 1];

    const double ia = 1.0 / alpha;
    const double ib = 1.0 / beta;
    const double delta1 = (ib / ia - 1.0) / pbar_sq[0];
    const double gamma1 = (ia * ib + 1.0) / (2.0 * ia * ia);

    double weighted = 0.0;
    for (int i = 1; i < N; ++i)
        weighted += pbar_sq[N - i] * y[i] * y[i];
    const double sq = norm0_sq(y, h) + delta1 * weighted * h + gamma1 * ia * ia * y[0] * y[0] * h;
    return std::sqrt(sq);
}

double sigma_threshold(double gamma, double h, double tau, double c2)
{
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw DomainError(fmt::format("gamma must lie in (0,1], got {}", gamma));
    if (!(h > 0.0) || !(tau > 0.0) || !(c2 > 0.0))
        throw DomainError(fmt::format("need h, tau, c2 > 0, got {}, {}, {}", h, tau, c2));
    const double q = std::pow(2.0, 1.0 - gamma);
    const double lead = 1.0 / (3.0 - q);
    const double correction = h * h * (2.0 - q) / (2.0 * c2 * std::pow(tau, gamma) * (3.0 - q) * std::tgamma(2.0 - gamma));
    return lead - correction;
}

double convergence_order(double norm_coarse, double norm_fine, double h_coarse, double h_fine)
{
    if (!(norm_coarse > 0.0) || !(norm_fine > 0.0) || !std::isfinite(norm_coarse) || !std::isfinite(norm_fine))
        throw DomainError(fmt::format("convergence order needs positive norms, got {} and {}", norm_coarse, norm_fine));
    if (!(h_fine > 0.0) || !(h_coarse > h_fine))
        throw DomainError(fmt::format("need h_coarse > h_fine > 0, got {} and {}", h_coarse, h_fine));
    return std::log(norm_coarse / norm_fine) / std::log(h_coarse / h_fine);
}

} // namespace tfnl
