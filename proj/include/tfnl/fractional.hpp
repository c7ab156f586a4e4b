#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tfnl/core.hpp"

namespace tfnl
{

/// Raised when the Caputo quadrature cannot reach its target accuracy.
class OracleFailure : public Error
{
public:
    OracleFailure(double achieved, double requested);
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// t^p computed as exp(p ln t), with 0^p = 0.
double time_power(double t, double p);

/// Weights of the L1 sum at time index n:
///   D^gamma y(t_{n+1}) ~ sum_{s=0}^{n} c[s] * (y^{s+1} - y^s),
///   c[s] = (t_{n-s+1}^{1-gamma} - t_{n-s}^{1-gamma}) / (tau Gamma(2-gamma)).
/// c is increasing in s; c[n] = tau^{-gamma} / Gamma(2-gamma).
struct L1Weights
{
    int n = 0;
    double gamma = 0.0;
    double tau = 0.0;
    std::vector<double> c;
};

L1Weights l1_weights(int n, double gamma, double tau);

/// L1 approximation of the Caputo derivative at t_{n+1} from y^0 .. y^{n+1}.
double discrete_caputo(std::span<const double> series, double gamma, double tau);

/// The L1 sum with the newest value y^{n+1} left symbolic:
/// discrete_caputo(y^0..y^n, y_next) == c_new * y_next + load.
struct ImplicitSplit
{
    double c_new;
    double load;
};

ImplicitSplit split_implicit(std::span<const double> series, double gamma, double tau);

/// Caputo derivative (1/Gamma(1-gamma)) int_0^t v'(eta) (t-eta)^{-gamma} d eta
/// by tanh-sinh quadrature after s = (t-eta)^{1-gamma}, which removes the
/// endpoint singularity. Absolute accuracy 1e-10 or OracleFailure.
double caputo_oracle(const std::function<double(double)>& derivative, double t, double gamma);

/// Remainders J1, J2 of the discrete energy identities
///   y^{n+1} D y = D(y^2)/2 + tau^nu Gamma(2-nu)/2 (D y)^2 + J1
///   y^{n}   D y = D(y^2)/2 - tau^nu Gamma(2-nu)/(2(2-2^{1-nu})) (D y)^2 + J2
/// where D is the L1 operator of order nu at t_{n+1}. Both are nonnegative.
struct EnergyRemainders
{
    double j1;
    double j2;
};

EnergyRemainders lemma2_terms(std::span<const double> series, double nu, double tau);

} // namespace tfnl
