#pragma once

#include <span>
#include <vector>

#include "tfnl/core.hpp"

namespace tfnl
{

/// The energy norm is only defined when (beta/alpha - 1)(alpha^2 - 1) >= 0.
class UndefinedNormError : public Error
{
public:
    using Error::Error;
};

/// sqrt(sum_{i=1}^{N-1} y_i^2 h), endpoints excluded.
double norm0(std::span<const double> y, double h);

/// sqrt(h y_0^2/2 + h y_N^2/2 + norm0(y)^2)
double norm_full(std::span<const double> y, double h);

double norm_max(std::span<const double> y);

enum class EnergyCase
{
    Direct,     ///< beta/alpha >= 1 and alpha^2 >= 1
    Reflected,  ///< beta/alpha <= 1 and alpha^2 <= 1, handled through x -> 1 - x
};

/// Throws UndefinedNormError for mixed signs.
EnergyCase classify_energy_case(double alpha, double beta);

/// Weights of the direct-case energy norm for coefficients a_1..a_N.
///   p1_sq[i] = sum_{s=i}^{N-1} h / a_{s+1},  p1_sq[N] = 0
///   delta1   = (beta/alpha - 1) / p1_sq[0]
///   gamma1   = (alpha beta + 1) / (2 alpha^2)
struct EnergyWeights
{
    std::vector<double> p1_sq;
    double delta1 = 0.0;
    double gamma1 = 0.0;
    EnergyCase kind = EnergyCase::Direct;
};

/// Weights for (alpha, beta) as given; kind records the regime but the
/// coefficients are always the direct-case formulas.
EnergyWeights energy_weights(double alpha, double beta, std::span<const double> faces, double h);

/// ||y||_1^2 = ||y||_0^2 + delta1 ||p1 y||_0^2 + gamma1 y_0^2 h in the direct
/// case. In the reflected case the same formula is evaluated on v_i = y_{N-i}
/// with coefficients a_{N-i+1} and parameters (1/alpha, 1/beta).
double energy_norm1(std::span<const double> y, double alpha, double beta, std::span<const double> faces, double h);

double energy_norm1(std::span<const double> y, const Problem& problem, const Grid& grid, std::span<const double> faces);

/// Reflected-case norm written directly in terms of y:
///   ||y||_0^2 + delta1(1/a, 1/b) ||p1(1-x) y||_0^2 + gamma1(1/a, 1/b) y_0^2 h / alpha^2.
/// Agrees with energy_norm1 whenever y_0 = alpha y_N.
double energy_norm1_reflected_closed_form(std::span<const double> y,
                                          double alpha,
                                          double beta,
                                          std::span<const double> faces,
                                          double h);

/// Smallest sigma for which energy decay is guaranteed:
///   1/(3 - 2^{1-g}) - h^2 (2 - 2^{1-g}) / (2 c2 tau^g (3 - 2^{1-g}) Gamma(2-g)).
/// Valid for 0 < gamma <= 1.
double sigma_threshold(double gamma, double h, double tau, double c2);

/// ln(coarse/fine) / ln(h_coarse/h_fine)
double convergence_order(double norm_coarse, double norm_fine, double h_coarse, double h_fine);

} // namespace tfnl
