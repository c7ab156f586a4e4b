#include "tfnl/stepper.hpp"

#include <cmath>

#include <fmt/core.h>

#include "tfnl/fractional.hpp"

namespace tfnl
{

namespace
{

constexpr double tiny_pivot = 1e-300;

double max_abs(std::span<const double> y)
{
    double m = 0.0;
    for (double v : y) {
        if (!std::isfinite(v))
            return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(v));
    }
    return m;
}

// L1 history load for every node: sum_{s<n} c_s (y^{s+1} - y^s) - c_n y^n.
std::vector<double> history_loads(const History& history, const L1Weights& w)
{
    const int n = w.n;
    const std::size_t len = history.front().size();
    std::vector<double> load(len, 0.0);
    for (int s = 0; s < n; ++s) {
        const auto& lo = history[s];
        const auto& hi = history[s + 1];
        const double c = w.c[s];
        for (std::size_t j = 0; j < len; ++j)
            load[j] += c * (hi[j] - lo[j]);
    }
    const auto& last = history[n];
    for (std::size_t j = 0; j < len; ++j)
        load[j] -= w.c[n] * last[j];
    return load;
}

} // namespace

std::vector<double> StepSystem::to_dense() const
{
    const int N = size();
    const int m = N - 1;
    std::vector<double> A(static_cast<std::size_t>(N) * N, 0.0);
    auto at = [&](int r, int c) -> double& { return A[static_cast<std::size_t>(r) * N + c]; };
    for (int r = 0; r < m; ++r) {
        if (r > 0)
            at(r, r - 1) += lower[r];
        at(r, r) += diag[r];
        at(r, r + 1) += upper[r];
    }
    at(0, N - 1) += corner_col;
    at(N - 1, 0) += last_row.first;
    at(N - 1, N - 2) += last_row.before_last;
    at(N - 1, N - 1) += last_row.last;
    return A;
}

StepSystem assemble_step(const Problem& problem,
                         const Grid& grid,
                         const SchemeParams& params,
                         const History& history,
                         std::span<const double> faces)
{
    const int N = grid.N();
    if (history.empty())
        throw DimensionError("assembly needs at least the initial level");
    if (static_cast<int>(faces.size()) != N)
        throw DimensionError(fmt::format("expected {} face coefficients, got {}", N, faces.size()));
    for (const auto& level : history)
        if (static_cast<int>(level.size()) != N + 1)
            throw DimensionError(fmt::format("history level has length {}, expected {}", level.size(), N + 1));

    const int n = static_cast<int>(history.size()) - 1;
    const double h = grid.h();
    const double h2 = h * h;
    const double sigma = params.sigma();
    const double alpha = problem.alpha();
    const double beta = problem.beta();
    const double t_sigma = grid.t(n) + sigma * grid.tau();

    const L1Weights w = l1_weights(n, problem.gamma(), grid.tau());
    const double c_new = w.c[n];
    const std::vector<double> load = history_loads(history, w);
    const TimeLevel& y = history[n];
    auto a = [&](int i) { return faces[i - 1]; };

    StepSystem sys;
    sys.lower.assign(N - 1, 0.0);
    sys.diag.assign(N - 1, 0.0);
    sys.upper.assign(N - 1, 0.0);
    sys.rhs.assign(N, 0.0);

    for (int i = 1; i <= N - 1; ++i) {
        const int r = i - 1;
        const double left = a(i) / h2;
        const double right = a(i + 1) / h2;
        if (r > 0)
            sys.lower[r] = -sigma * left;
        sys.diag[r] = c_new + sigma * (left + right);
        sys.upper[r] = -sigma * right;

        const double old_flux = right * (y[i + 1] - y[i]) - left * (y[i] - y[i - 1]);
        sys.rhs[r] = problem.f(grid.x(i), t_sigma) + (1.0 - sigma) * old_flux - load[i];
    }
    sys.corner_col = -sigma * alpha * a(1) / h2;

    const double scale = 2.0 / h2;
    sys.last_row.first = -sigma * scale * beta * a(1);
    sys.last_row.before_last = -sigma * scale * a(N);
    sys.last_row.last = c_new * (1.0 + alpha * beta) + sigma * scale * (a(N) + alpha * beta * a(1));

    const double old_boundary_flux = a(N) * (y[N] - y[N - 1]) - beta * a(1) * (y[1] - y[0]);
    sys.rhs[N - 1] = 2.0 / h * problem.mu(t_sigma) + problem.f(grid.x(N), t_sigma) + beta * problem.f(grid.x(0), t_sigma)
                     - beta * load[0] - load[N] - (1.0 - sigma) * scale * old_boundary_flux;

    for (int r = 0; r < N - 1; ++r)
        if (sys.diag[r] == 0.0)
            throw SingularSystemError(fmt::format("assembled zero diagonal in row {}", r + 1));
    if (sys.last_row.last == 0.0)
        throw SingularSystemError("assembled zero diagonal in the flux row");
    return sys;
}

std::vector<double> solve_bordered(const StepSystem& system)
{
    const int N = system.size();
    const int m = N - 1;

    // P solves T P = rhs, Q solves T Q = -(couplings of y_N); then y' = P + y_N Q.
    std::vector<double> P(system.rhs.begin(), system.rhs.begin() + m);
    std::vector<double> Q(m, 0.0);
    Q[0] -= system.corner_col;
    Q[m - 1] -= system.upper[m - 1];

    std::vector<double> cprime(m, 0.0);
    double pivot = system.diag[0];
    for (int r = 0; r < m; ++r) {
        if (r > 0) {
            pivot = system.diag[r] - system.lower[r] * cprime[r - 1];
            P[r] -= system.lower[r] * P[r - 1];
            Q[r] -= system.lower[r] * Q[r - 1];
        }
        if (std::abs(pivot) < tiny_pivot)
            throw SingularSystemError(fmt::format("zero pivot in tridiagonal sweep at row {}", r));
        if (r < m - 1)
            cprime[r] = system.upper[r] / pivot;
        P[r] /= pivot;
        Q[r] /= pivot;
    }
    for (int r = m - 2; r >= 0; --r) {
        P[r] -= cprime[r] * P[r + 1];
        Q[r] -= cprime[r] * Q[r + 1];
    }

    const FluxRow& row = system.last_row;
    const double closure = row.last + row.first * Q[0] + row.before_last * Q[m - 1];
    if (!(std::abs(closure) >= tiny_pivot))
        throw SingularSystemError(fmt::format("singular closure for y_N (pivot {})", closure));
    const double yN = (system.rhs[N - 1] - row.first * P[0] - row.before_last * P[m - 1]) / closure;

    std::vector<double> out(N);
    for (int r = 0; r < m; ++r)
        out[r] = P[r] + yN * Q[r];
    out[N - 1] = yN;
    return out;
}

std::vector<double> solve_dense_oracle(const StepSystem& system)
{
    const int N = system.size();
    std::vector<double> A = system.to_dense();
    std::vector<double> b = system.rhs;
    auto at = [&](int r, int c) -> double& { return A[static_cast<std::size_t>(r) * N + c]; };

    double norm = 0.0;
    for (double v : A)
        norm = std::max(norm, std::abs(v));

    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(at(r, col)) > std::abs(at(piv, col)))
                piv = r;
        if (std::abs(at(piv, col)) <= 1e-14 * norm || at(piv, col) == 0.0)
            throw SingularSystemError(fmt::format("dense elimination found no pivot in column {}", col));
        if (piv != col) {
            for (int c = 0; c < N; ++c)
                std::swap(at(col, c), at(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < N; ++r) {
            const double factor = at(r, col) / at(col, col);
            if (factor == 0.0)
                continue;
            for (int c = col; c < N; ++c)
                at(r, c) -= factor * at(col, c);
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(N);
    for (int r = N - 1; r >= 0; --r) {
        double sum = b[r];
        for (int c = r + 1; c < N; ++c)
            sum -= at(r, c) * x[c];
        x[r] = sum / at(r, r);
    }
    return x;
}

double relative_residual(const StepSystem& system, std::span<const double> y)
{
    const int N = system.size();
    if (static_cast<int>(y.size()) != N)
        throw DimensionError(fmt::format("solution has length {}, system has {} unknowns", y.size(), N));
    const std::vector<double> A = system.to_dense();
    double worst = 0.0;
    for (int r = 0; r < N; ++r) {
        double ax = 0.0;
        double scale = std::abs(system.rhs[r]);
        for (int c = 0; c < N; ++c) {
            const double term = A[static_cast<std::size_t>(r) * N + c] * y[c];
            ax += term;
            scale += std::abs(term);
        }
        if (scale > 0.0)
            worst = std::max(worst, std::abs(ax - system.rhs[r]) / scale);
    }
    return worst;
}

SolveOutcome march(const Problem& problem, const Grid& grid, const SchemeParams& params, const MarchOptions& options)
{
    const int N = grid.N();
    const std::vector<double> faces = face_coefficients(problem, grid);

    SolveOutcome out;
    out.history.reserve(grid.Nt() + 1);
    if (options.initial) {
        if (static_cast<int>(options.initial->size()) != N + 1)
            throw DimensionError(fmt::format("initial level has length {}, expected {}", options.initial->size(), N + 1));
        out.history.push_back(*options.initial);
    } else {
        out.history.push_back(sample_initial(problem, grid));
    }

    for (int n = 0; n < grid.Nt(); ++n) {
        const StepSystem sys = assemble_step(problem, grid, params, out.history, faces);
        const std::vector<double> unknowns = solve_bordered(sys);
        if (options.check_residuals)
            out.per_step_residuals.push_back(relative_residual(sys, unknowns));

        TimeLevel level(N + 1);
        level[0] = problem.alpha() * unknowns[N - 1];
        std::copy(unknowns.begin(), unknowns.end(), level.begin() + 1);
        const double size = max_abs(level);
        out.history.push_back(std::move(level));
        if (!(size <= blow_up_threshold)) {
            out.blow_up = BlowUp{n + 1, size};
            break;
        }
    }
    return out;
}

} // namespace tfnl
