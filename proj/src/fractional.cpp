#include "tfnl/fractional.hpp"

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/core.h>

namespace tfnl
{

namespace
{

void check_order(double gamma)
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError(fmt::format("fractional order must lie in (0,1), got {}", gamma));
}

void check_step(double tau)
{
    if (!(tau > 0.0))
        throw DomainError(fmt::format("time step must be positive, got {}", tau));
}

// w[j] = t_{j+1}^{1-nu} - t_j^{1-nu}, j = 0..n
std::vector<double> power_increments(int n, double nu, double tau)
{
    std::vector<double> w(n + 1);
    double prev = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double next = time_power((j + 1) * tau, 1.0 - nu);
        w[j] = next - prev;
        prev = next;
    }
    return w;
}

} // namespace

OracleFailure::OracleFailure(double achieved, double requested)
    : Error(fmt::format("Caputo quadrature reached error estimate {:.3e}, requested {:.3e}", achieved, requested))
    , achieved_(achieved)
{
}

double time_power(double t, double p)
{
    if (t == 0.0)
        return 0.0;
    return std::exp(p * std::log(t));
}

L1Weights l1_weights(int n, double gamma, double tau)
{
    check_order(gamma);
    check_step(tau);
    if (n < 0)
        throw DomainError(fmt::format("time index must be nonnegative, got {}", n));

    const std::vector<double> w = power_increments(n, gamma, tau);
    const double scale = 1.0 / (tau * std::tgamma(2.0 - gamma));

    L1Weights out{n, gamma, tau, std::vector<double>(n + 1)};
    for (int s = 0; s <= n; ++s)
        out.c[s] = w[n - s] * scale;
    return out;
}

double discrete_caputo(std::span<const double> series, double gamma, double tau)
{
    if (series.size() < 2)
        throw DimensionError("discrete Caputo derivative needs at least two levels");
    const int n = static_cast<int>(series.size()) - 2;
    const L1Weights w = l1_weights(n, gamma, tau);
    double sum = 0.0;
    for (int s = 0; s <= n; ++s)
        sum += w.c[s] * (series[s + 1] - series[s]);
    return sum;
}

ImplicitSplit split_implicit(std::span<const double> series, double gamma, double tau)
{
    if (series.empty())
        throw DimensionError("implicit split needs at least one level");
    const int n = static_cast<int>(series.size()) - 1;
    const L1Weights w = l1_weights(n, gamma, tau);
    double load = -w.c[n] * series[n];
    for (int s = 0; s < n; ++s)
        load += w.c[s] * (series[s + 1] - series[s]);
    return {w.c[n], load};
}

double caputo_oracle(const std::function<double(double)>& derivative, double t, double gamma)
{
    check_order(gamma);
    if (!(t > 0.0))
        throw DomainError(fmt::format("Caputo oracle needs t > 0, got {}", t));

    constexpr double requested = 1e-10;
    const double p = 1.0 / (1.0 - gamma);
    auto integrand = [&](double s) { return p * derivative(t - std::pow(s, p)); };

    double error = 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> quad;
    const double integral = quad.integrate(integrand, 0.0, time_power(t, 1.0 - gamma), 1e-14, &error);
    const double value = integral / std::tgamma(1.0 - gamma);
    const double abs_error = error / std::tgamma(1.0 - gamma);
    if (!(abs_error <= requested) || !std::isfinite(value))
        throw OracleFailure(abs_error, requested);
    return value;
}

EnergyRemainders lemma2_terms(std::span<const double> series, double nu, double tau)
{
    check_order(nu);
    check_step(tau);
    if (series.size() < 2)
        throw DimensionError("energy remainders need at least two levels");
    const int n = static_cast<int>(series.size()) - 2;
    const std::vector<double> w = power_increments(n, nu, tau);
    const double g = std::tgamma(2.0 - nu);

    // zeta[k] = sum_{s=0}^{k-1} w[n-s] * y_t^s, k = 0..n+1
    std::vector<double> zeta(n + 2, 0.0);
    for (int k = 0; k <= n; ++k)
        zeta[k + 1] = zeta[k] + w[n - k] * (series[k + 1] - series[k]) / tau;

    auto history_sum = [&](int upper) {
        double sum = 0.0;
        for (int k = 0; k <= upper; ++k)
            sum += tau * (1.0 / w[n - k] - 1.0 / w[n - k - 1]) * zeta[k + 1] * zeta[k + 1];
        return sum / (2.0 * g);
    };

    const double q = std::pow(2.0, 1.0 - nu);
    const double lead = zeta[n + 1] + (2.0 - q) / (q - 1.0) * zeta[n];
    const double j1 = history_sum(n - 1);
    const double j2 = std::pow(tau, nu) * (q - 1.0) / (2.0 * g * (2.0 - q)) * lead * lead + history_sum(n - 2);
    return {j1, j2};
}

} // namespace tfnl
