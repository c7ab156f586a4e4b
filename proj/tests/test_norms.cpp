#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "tfnl/norms.hpp"
#include "tfnl/rng.hpp"

using namespace tfnl;

namespace
{

std::vector<double> exp_faces(int N)
{
    const double h = 1.0 / N;
    std::vector<double> a(N);
    for (int i = 1; i <= N; ++i)
        a[i - 1] = std::exp(i * h - h / 2.0);
    return a;
}

std::vector<double> coupled_level(SplitMix64& rng, int N, double alpha)
{
    std::vector<double> y(N + 1);
    for (double& v : y)
        v = rng.uniform(-1.0, 1.0);
    y[0] = alpha * y[N];
    return y;
}

} // namespace

TEST_CASE("discrete L2 and max norms")
{
    const std::vector<double> y{5.0, 1.0, 2.0, -7.0};
    CHECK(norm0(y, 0.5) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));
    CHECK(norm_full(y, 0.5) == doctest::Approx(std::sqrt(2.5 + 0.25 * 25.0 + 0.25 * 49.0)).epsilon(1e-15));
    CHECK(norm_max(y) == 7.0);
    CHECK(std::isnan(norm_max(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN(), 2.0})));

    const int N = 100;
    const double h = 1.0 / N;
    std::vector<double> x(N + 1);
    for (int i = 0; i <= N; ++i)
        x[i] = i * h;
    CHECK(std::abs(norm0(x, h) * norm0(x, h) - 1.0 / 3.0) <= h);
}

TEST_CASE("energy regimes")
{
    CHECK(classify_energy_case(2.0, 5.0) == EnergyCase::Direct);
    CHECK(classify_energy_case(1.0, 1.0) == EnergyCase::Direct);
    CHECK(classify_energy_case(0.5, 1.0 / 3.0) == EnergyCase::Reflected);
    CHECK_THROWS_AS(classify_energy_case(3.0, 2.0), UndefinedNormError);
    CHECK_THROWS_AS(classify_energy_case(0.1, 10.0), UndefinedNormError);
    CHECK(classify_energy_case(0.7, 0.1) == EnergyCase::Reflected);
    CHECK_THROWS_AS(energy_norm1(std::vector<double>(9, 0.0), 3.0, 2.0, exp_faces(8), 0.125), UndefinedNormError);
}

TEST_CASE("energy norm special cases")
{
    SplitMix64 rng(3);
    const int N = 16;
    const double h = 1.0 / N;
    const auto faces = exp_faces(N);

    SUBCASE("alpha = beta: delta1 vanishes")
    {
        const auto w = energy_weights(1.5, 1.5, faces, h);
        CHECK(w.delta1 == 0.0);
        CHECK(w.gamma1 == doctest::Approx((1.5 * 1.5 + 1.0) / (2.0 * 1.5 * 1.5)).epsilon(1e-15));
    }
    SUBCASE("alpha = beta = 1 reduces to ||y||_0^2 + y_0^2 h")
    {
        const auto y = coupled_level(rng, N, 1.0);
        const double e = energy_norm1(y, 1.0, 1.0, faces, h);
        const double expected = std::sqrt(norm0(y, h) * norm0(y, h) + y[0] * y[0] * h);
        CHECK(e == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("p1 weights telescope to the total resistance")
    {
        const auto w = energy_weights(2.0, 5.0, faces, h);
        double total = 0.0;
        for (double a : faces)
            total += h / a;
        CHECK(w.p1_sq[0] == doctest::Approx(total).epsilon(1e-14));
        CHECK(w.p1_sq[N] == 0.0);
        CHECK(w.delta1 == doctest::Approx(1.5 / total).epsilon(1e-14));
    }
}

TEST_CASE("reflected regime agrees with its closed form")
{
    SplitMix64 rng(8);
    for (int N : {4, 8, 16, 64}) {
        const auto faces = exp_faces(N);
        const double h = 1.0 / N;
        for (int trial = 0; trial < 10; ++trial) {
            const auto y = coupled_level(rng, N, 0.5);
            const double via_reflection = energy_norm1(y, 0.5, 1.0 / 3.0, faces, h);
            const double closed = energy_norm1_reflected_closed_form(y, 0.5, 1.0 / 3.0, faces, h);
            CHECK(std::abs(via_reflection - closed) <= 1e-13 * closed);
        }
    }
}

TEST_CASE("norm equivalence bounds")
{
    // On levels with y_0 = alpha y_N, ||y||_1^2 / [y]_0^2 lies in
    // [min(1, (ab+1)/(a^2+1)), max(b/a, (ab+1)/(a^2+1))], with (a, b) = (1/alpha, 1/beta)
    // in the reflected regime.
    struct Case
    {
        double alpha, beta;
    };
    SplitMix64 rng(12);
    for (const Case c : {Case{2.0, 5.0}, Case{1.0, 1.0}, Case{1.2, 4.0}, Case{0.5, 1.0 / 3.0}, Case{0.8, 0.2}}) {
        const bool direct = classify_energy_case(c.alpha, c.beta) == EnergyCase::Direct;
        const double a = direct ? c.alpha : 1.0 / c.alpha;
        const double b = direct ? c.beta : 1.0 / c.beta;
        const double ratio_ab = (a * b + 1.0) / (a * a + 1.0);
        const double lo = std::min(1.0, ratio_ab);
        const double hi = std::max(b / a, ratio_ab);
        for (int N : {8, 16, 32, 64}) {
            const auto faces = exp_faces(N);
            const double h = 1.0 / N;
            for (int trial = 0; trial < 20; ++trial) {
                const auto y = coupled_level(rng, N, c.alpha);
                const double e = energy_norm1(y, c.alpha, c.beta, faces, h);
                const double full = norm_full(y, h);
                const double r = e * e / (full * full);
                CHECK(r >= lo * (1.0 - 1e-12));
                CHECK(r <= hi * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("energy norm is absolutely homogeneous")
{
    SplitMix64 rng(21);
    const auto faces = exp_faces(10);
    for (int trial = 0; trial < 30; ++trial) {
        const auto y = coupled_level(rng, 10, 2.0);
        const double a = rng.uniform(-4.0, 4.0);
        std::vector<double> ay(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            ay[i] = a * y[i];
        CHECK(energy_norm1(ay, 2.0, 5.0, faces, 0.1) == doctest::Approx(std::abs(a) * energy_norm1(y, 2.0, 5.0, faces, 0.1)).epsilon(1e-13));
    }
}

TEST_CASE("sigma threshold")
{
    const double h = 1.0 / 20.0;
    const double tau = std::pow(h, 4.0 / 3.0);
    CHECK(sigma_threshold(0.5, h, tau, std::numbers::e) == doctest::Approx(0.629189664879209511770370695853).epsilon(1e-13));

    // gamma = 1: 1/2 - h^2 / (4 c2 tau)
    CHECK(std::abs(sigma_threshold(1.0, 0.1, 0.01, 2.0) - (0.5 - 0.01 / (4.0 * 2.0 * 0.01))) <= 1e-10);

    for (double g : {0.1, 0.5, 0.9}) {
        const double q = std::pow(2.0, 1.0 - g);
        const double limit = 1.0 / (3.0 - q);
        CHECK(sigma_threshold(g, 1e-8, 0.01, 1.0) == doctest::Approx(limit).epsilon(1e-10));
        CHECK(sigma_threshold(g, 0.1, 0.01, 1.0) < limit);
    }
    CHECK_THROWS_AS(sigma_threshold(0.0, 0.1, 0.01, 1.0), DomainError);
    CHECK_THROWS_AS(sigma_threshold(0.5, 0.1, 0.0, 1.0), DomainError);
}

TEST_CASE("convergence order")
{
    CHECK(convergence_order(4.0 * std::numbers::e, std::numbers::e, 0.1, 0.05) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(convergence_order(8.0, 1.0, 0.2, 0.1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(convergence_order(0.0, 1.0, 0.2, 0.1), DomainError);
    CHECK_THROWS_AS(convergence_order(1.0, 1.0, 0.1, 0.1), DomainError);
    CHECK_THROWS_AS(convergence_order(1.0, std::numeric_limits<double>::infinity(), 0.2, 0.1), DomainError);
}
