#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfnl/core.hpp"
#include "tfnl/norms.hpp"
#include "tfnl/stepper.hpp"

namespace tfnl
{

/// Invalid configuration; field() names the offending entry.
class UsageError : public Error
{
public:
    UsageError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// ---------------------------------------------------------------------------
// Error statistics
// ---------------------------------------------------------------------------

/// Maxima over all stored levels n of |[z^n]|_0 and max_i |z_i^n|,
/// with z^n = y^n - u(., t_n).
struct ErrorStats
{
    double max_full = 0.0;
    double max_max = 0.0;
    double final_full = 0.0;
    double final_max = 0.0;
};

ErrorStats error_stats(const SolveOutcome& outcome, const Problem& problem, const Grid& grid);

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

enum class Coupling
{
    Paper,     ///< h^2 = tau^(2-gamma), Nt = ceil(T / h^(2/(2-gamma)))
    FixedTau,  ///< Nt = ceil(T / tau)
};

enum class OutputFormat
{
    Csv,
    Table,
};

/// Flat JSON document, e.g.
///   {"problem": "paper-sec3", "gamma": 0.5, "alpha": 3, "beta": 2,
///    "sigma": 1, "T": 1, "levels": [20, 40, 80], "coupling": "paper",
///    "tau": null, "norms": ["full", "max"], "out": "t1.csv", "format": "csv"}
struct StudyConfig
{
    std::string problem = "paper-sec3";
    double gamma = 0.5;
    double alpha = 3.0;
    double beta = 2.0;
    double sigma = 1.0;
    double T = 1.0;
    std::vector<int> levels{20, 40, 80};
    Coupling coupling = Coupling::Paper;
    double tau = 0.0;  ///< used with FixedTau
    bool norm_full = true;
    bool norm_max = true;
    std::string out;  ///< empty: stdout
    OutputFormat format = OutputFormat::Csv;

    /// Throws UsageError naming the first invalid field.
    void validate() const;

    /// Overlays the keys present in doc onto this config.
    void merge_json(const nlohmann::json& doc);
    static StudyConfig from_json(const nlohmann::json& doc);
};

Grid study_grid(const StudyConfig& config, int N);

struct StudyRow
{
    double h = 0.0;
    int Nt = 0;
    double tau = 0.0;
    double err_full = 0.0;
    std::optional<double> co_full;
    double err_max = 0.0;
    std::optional<double> co_max;
    bool blew_up = false;
    double max_residual = 0.0;  ///< worst per-step relative residual
};

struct StudyReport
{
    StudyConfig config;
    std::vector<StudyRow> rows;
    double wall_seconds = 0.0;
};

struct StudyOptions
{
    bool parallel = true;
    bool check_residuals = false;
};

StudyReport run_convergence(const StudyConfig& config, const StudyOptions& options = {});

/// Header h,Nt,tau,err_full,co_full,err_max,co_max; floats as %.5e; empty
/// cells for missing orders and for norms not selected in the config.
std::string format_csv(const StudyReport& report);
std::string format_table(const StudyReport& report);

// ---------------------------------------------------------------------------
// Truncation order of the L1 operator
// ---------------------------------------------------------------------------

enum class TestFunction
{
    Cubic,     ///< t^3
    Temporal,  ///< t^3 - t^2 + t + 1
    Exp,       ///< e^t
    Linear,    ///< t
};

TestFunction parse_test_function(const std::string& name);
std::string to_string(TestFunction fn);

struct TruncationRow
{
    int steps = 0;
    double tau = 0.0;
    double error = 0.0;
    std::optional<double> order;
};

struct TruncationReport
{
    double gamma = 0.0;
    double T = 1.0;
    TestFunction function = TestFunction::Cubic;
    std::vector<TruncationRow> rows;
    /// Observed order at the finest pair (absent when errors are at roundoff).
    std::optional<double> fitted_order;
};

/// |L1(v)(T) - Caputo(v)(T)| for each step count (must be increasing).
TruncationReport run_lemma1(double gamma, TestFunction fn, double T, const std::vector<int>& step_counts);

std::string format_lemma1(const TruncationReport& report);

// ---------------------------------------------------------------------------
// Energy decay for homogeneous data
// ---------------------------------------------------------------------------

struct StabilityConfig
{
    double gamma = 0.5;
    double alpha = 2.0;
    double beta = 5.0;
    std::optional<double> sigma;  ///< absent: clamp(sigma_threshold, 0, 1)
    int N = 20;
    int Nt = 100;
    double T = 1.0;
    std::uint64_t seed = 1;
};

/// y_i ~ U[-1, 1] for i = 0..N drawn in order from SplitMix64(seed), then
/// y_0 := alpha y_N so the level satisfies the value coupling.
TimeLevel random_initial_level(int N, double alpha, std::uint64_t seed);

struct StabilityReport
{
    StabilityConfig config;
    double sigma = 1.0;
    double threshold = 0.0;
    EnergyCase kind = EnergyCase::Direct;
    std::vector<double> energy;  ///< ||y^n||_1, n = 0..Nt
    bool pass = false;
    std::optional<BlowUp> blow_up;
};

/// Throws UndefinedNormError when (beta/alpha - 1)(alpha^2 - 1) < 0.
StabilityReport run_stability(const StabilityConfig& config);

std::string format_stability(const StabilityReport& report);

} // namespace tfnl
