#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tfnl/core.hpp"

namespace tfnl
{

/// Coefficients of the discrete flux condition on y_1, y_{N-1} and y_N.
/// For N = 2 the first two refer to the same unknown and add up.
struct FluxRow
{
    double first = 0.0;
    double before_last = 0.0;
    double last = 0.0;
};

/// Linear system for y_1 .. y_N at one time level, y_0 = alpha*y_N eliminated.
///
/// Rows 0..N-2 are the interior equations i = 1..N-1 in tridiagonal form:
/// row r couples unknowns r-1, r, r+1 through lower[r], diag[r], upper[r]
/// (lower[0] is always zero). Row 0 additionally carries corner_col on y_N,
/// the image of y_0. Row N-1 is the flux condition.
struct StepSystem
{
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    double corner_col = 0.0;
    FluxRow last_row;
    std::vector<double> rhs;  ///< length N

    int size() const noexcept { return static_cast<int>(rhs.size()); }

    /// Row-major N x N matrix.
    std::vector<double> to_dense() const;
};

/// Assemble the weighted scheme for level n+1, where n + 1 = history.size().
/// faces are a_1..a_N as returned by face_coefficients.
StepSystem assemble_step(const Problem& problem,
                         const Grid& grid,
                         const SchemeParams& params,
                         const History& history,
                         std::span<const double> faces);

/// O(N) solve: two tridiagonal sweeps sharing one factorisation, then a scalar
/// closure for y_N from the flux row.
std::vector<double> solve_bordered(const StepSystem& system);

/// Dense Gaussian elimination with partial pivoting. Reference for tests.
std::vector<double> solve_dense_oracle(const StepSystem& system);

/// max_r |(A y - b)_r| / (sum_j |A_rj y_j| + |b_r|)
double relative_residual(const StepSystem& system, std::span<const double> y);

/// First level whose max-norm exceeded the blow-up threshold or went non-finite.
struct BlowUp
{
    int level;
    double norm;
};

struct SolveOutcome
{
    History history;
    std::optional<BlowUp> blow_up;
    std::vector<double> per_step_residuals;  ///< filled when residual checking is on
};

struct MarchOptions
{
    bool check_residuals = false;
    /// Overrides the level sampled from u0 (length N+1).
    std::optional<TimeLevel> initial;
};

inline constexpr double blow_up_threshold = 1e100;

SolveOutcome march(const Problem& problem, const Grid& grid, const SchemeParams& params, const MarchOptions& options = {});

} // namespace tfnl
